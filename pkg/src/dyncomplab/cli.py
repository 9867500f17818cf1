"""Command-line entry point.

Subcommands: run, fuzz, oracle, construct, verify-constructions, sym,
validate, fmt.  Every command is deterministic given its flags; the
DYNCOMPLAB_SEED environment variable overrides the default seed.  Reports
print one human-readable line per checkpoint plus (with --json) one JSON
record per checkpoint for machine diffing; fields are documented in the
README.
"""

from __future__ import annotations

import argparse
import itertools
import json
import os
import random
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import constructions as cx
from . import fo_engines as fe
from . import interpreter as ip
from . import oracle as oc
from . import programs as pg
from . import symcircuit as sc
from .structures import (Change, Checkpoint, DynLabError, Structure,
                         apply_change, format_structure, format_script,
                         parse_script, parse_structure)

DEFAULT_SEED = 1729

QUERY_NAMES = {
    "parity": lambda a: oc.QueryId("parity"),
    "size-k": lambda a: oc.QueryId("size_k", _need_k(a)),
    "parity-exists": lambda a: oc.QueryId("parity_exists"),
    "parity-exists-deg": lambda a: oc.QueryId("parity_exists_deg", _need_k(a)),
    "parity-exists-deg-logn": lambda a: oc.QueryId("parity_exists_deg_logn"),
    "parity-degree-div3": lambda a: oc.QueryId("parity_degree_div3"),
}

# target aliases accepted by fuzz/run in addition to catalog names
TARGET_ALIASES = {
    "prop33": lambda k: f"parity_exists_prop_{k if k else 3}",
}


def _need_k(args) -> int:
    if getattr(args, "k", None) is None:
        raise DynLabError("this query needs --k")
    return args.k


def _seed(args) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    env = os.environ.get("DYNCOMPLAB_SEED")
    return int(env) if env else DEFAULT_SEED


# ------------------------------------------------------------------ run

@dataclass
class CheckpointRecord:
    index: int            # checkpoint ordinal
    change_index: int     # changes applied so far
    program_answer: object
    oracle_answer: object
    match: bool
    elapsed: float

    def to_json(self) -> str:
        return json.dumps({
            "checkpoint": self.index, "change_index": self.change_index,
            "program": _jsonable(self.program_answer),
            "oracle": _jsonable(self.oracle_answer), "match": self.match,
            "elapsed": round(self.elapsed, 6)})


def _jsonable(v):
    if isinstance(v, (bool, type(None))):
        return v
    if isinstance(v, frozenset):
        return sorted(list(t) for t in v)
    return v


@dataclass
class RunReport:
    records: list[CheckpointRecord] = field(default_factory=list)
    skipped: int = 0

    @property
    def mismatches(self) -> list[CheckpointRecord]:
        return [r for r in self.records if not r.match]

    def emit(self, out=None, as_json: bool = False) -> None:
        if out is None:
            out = sys.stdout
        for r in self.records:
            if as_json:
                print(r.to_json(), file=out)
            else:
                status = "ok" if r.match else "MISMATCH"
                print(f"checkpoint {r.index} @change {r.change_index}: "
                      f"program={r.program_answer} oracle={r.oracle_answer} "
                      f"[{status}]", file=out)
        print(f"{len(self.records)} checkpoints, "
              f"{len(self.mismatches)} mismatches, "
              f"{self.skipped} skipped changes", file=out)


def _drive_program(program, script, query, mode="skip",
                   audit: bool = False) -> RunReport:
    state = ip.init_state(program, script.domain_size)
    shadow = state.input
    report = RunReport()
    applied = checkpoint = 0
    for entry in script.entries:
        if isinstance(entry, Checkpoint):
            t0 = time.perf_counter()
            got = state.answer()
            want = oc.eval_query(query, shadow) if query else got
            report.records.append(CheckpointRecord(
                checkpoint, applied, got, want, got == want,
                time.perf_counter() - t0))
            checkpoint += 1
            continue
        before = state
        state = ip.step(state, entry, mode=mode)
        if state is before and program.requires_effective:
            report.skipped += 1
        shadow = apply_change(shadow, entry)
        applied += 1
        if audit:
            bad = oc.audit_aux(state)
            if bad:
                raise DynLabError(
                    f"audit failed after change {applied}: {bad[0]}")
    return report


def _drive_engine(engine, script, bound, audit: bool = False) -> RunReport:
    shadow = engine.graph_structure()
    report = RunReport()
    applied = checkpoint = 0
    query = oc.QueryId("parity_exists_deg", bound)
    for entry in script.entries:
        if isinstance(entry, Checkpoint):
            t0 = time.perf_counter()
            got = engine.answer()
            want = oc.eval_query(query, shadow)
            report.records.append(CheckpointRecord(
                checkpoint, applied, got, want, got == want,
                time.perf_counter() - t0))
            checkpoint += 1
            continue
        engine.apply(entry)
        shadow = apply_change(shadow, entry)
        applied += 1
        if audit:
            bad = oc.audit_aux(engine)
            if bad:
                raise DynLabError(
                    f"audit failed after change {applied}: {bad[0]}")
    return report


def cmd_run(args) -> int:
    script = parse_script(Path(args.script).read_text())
    query = QUERY_NAMES[args.oracle](args) if args.oracle else None
    if args.engine:
        n = script.domain_size
        if args.engine == "fo-degk":
            engine = fe.fo_degk_init(n, _need_k(args))
        elif args.engine == "fo-logn":
            engine = fe.fo_logn_init(n)
        else:
            raise DynLabError(f"unknown engine {args.engine!r}")
        report = _drive_engine(engine, script, engine.k, audit=args.audit)
    else:
        if not args.program:
            raise DynLabError("run needs --program or --engine")
        program = ip.parse_program(Path(args.program).read_text(),
                                   name=Path(args.program).stem)
        report = _drive_program(program, script, query, mode=args.mode,
                                audit=args.audit)
    report.emit(as_json=args.json)
    return 1 if report.mismatches else 0


# ----------------------------------------------------------------- fuzz

def _fuzz_program(name: str, n: int, length: int, seeds: list[int],
                  audit: bool) -> list[str]:
    entry = pg.catalog_entry(name)
    program = entry.build()
    if "U" in program.input_schema:
        base = cx.PROFILES["set"]
    elif "R" in program.input_schema:
        base = cx.PROFILES["default"]
    else:
        base = cx.PROFILES["edges"]
    if length is not None:
        base = cx.ScriptProfile(relations=base.relations, weights=base.weights,
                                p_delete=base.p_delete, length=length,
                                checkpoint_every=base.checkpoint_every)
    failures = []
    for seed in seeds:
        script = cx.random_script(n, base, seed)
        try:
            report = _drive_program(program, script, entry.query,
                                    audit=audit)
        except DynLabError as exc:
            failures.append(f"seed {seed}: {exc}")
            continue
        if report.mismatches:
            r = report.mismatches[0]
            failures.append(f"seed {seed}: first divergence at checkpoint "
                            f"{r.index} (change {r.change_index})")
    return failures


def _fuzz_engine(kind: str, n: int, k: int | None, length: int,
                 seeds: list[int], audit: bool) -> list[str]:
    failures = []
    for seed in seeds:
        script = cx.random_script(n, cx.ScriptProfile(length=length or 120),
                                  seed)
        engine = fe.fo_logn_init(n) if kind == "fo-logn" else \
            fe.fo_degk_init(n, k if k is not None else 3)
        try:
            report = _drive_engine(engine, script, engine.k, audit=audit)
        except DynLabError as exc:
            failures.append(f"seed {seed}: {exc}")
            continue
        if report.mismatches:
            r = report.mismatches[0]
            failures.append(f"seed {seed}: first divergence at checkpoint "
                            f"{r.index}")
    return failures


def _fuzz_sym(seeds: list[int], flips: int) -> list[str]:
    failures = []
    for seed in seeds:
        rng = random.Random(seed)
        m = rng.randrange(1, 65)
        fanin = rng.randrange(1, 7)
        gates = [rng.sample(range(m), rng.randrange(1, min(fanin, m) + 1))
                 for _ in range(rng.randrange(0, 201))]
        h = [rng.random() < 0.5 for _ in range(len(gates) + 1)]
        circuit = sc.make_circuit(m, fanin, gates, h)
        assignment = [rng.random() < 0.5 for _ in range(m)]
        state = sc.sym_init(circuit, assignment)
        for t in range(flips or 1000):
            x = rng.randrange(m)
            sc.sym_flip(state, x)
            assignment[x] = not assignment[x]
            if sc.sym_output(state) != sc.sym_eval_direct(circuit, assignment):
                failures.append(f"seed {seed}: divergence at flip {t}")
                break
    return failures


def cmd_fuzz(args) -> int:
    base = _seed(args)
    seeds = [base + i for i in range(args.seeds)]
    target = args.target
    if target in TARGET_ALIASES:
        target = TARGET_ALIASES[target](args.k)
    if target == "sym":
        failures = _fuzz_sym(seeds, args.length)
    elif target in ("fo-degk", "fo-logn"):
        failures = _fuzz_engine(target, args.n, args.k, args.length, seeds,
                                audit=args.audit)
    else:
        failures = _fuzz_program(target, args.n, args.length, seeds,
                                 audit=args.audit)
    for f in failures:
        print(f)
    print(f"{len(seeds)} seeds, {len(failures)} failures")
    return 1 if failures else 0


# --------------------------------------------------------------- oracle

def cmd_oracle(args) -> int:
    query = QUERY_NAMES[args.query](args)
    if args.structure:
        s = parse_structure(Path(args.structure).read_text())
        print(oc.eval_query(query, s))
        return 0
    if not args.script:
        raise DynLabError("oracle needs --structure or --script")
    script = parse_script(Path(args.script).read_text())
    schema = {"E": 2, "R": 1, "U": 1}
    schema.update(script.declared)
    cur = Structure.make(script.domain_size, schema)
    for entry in script.entries:
        if isinstance(entry, Checkpoint):
            print(oc.eval_query(query, cur))
        else:
            cur = apply_change(cur, entry)
    return 0


# ------------------------------------------------------------ construct

def _parse_collection(n: int, k: int, text: str) -> cx.Collection:
    members = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if chunk:
            members.append({int(x) for x in chunk.split(",")})
    return cx.make_collection(n, k, members)


def cmd_construct(args) -> int:
    if args.what == "lower-bound":
        col = _parse_collection(args.n, args.k, args.collection or "")
        graph, _, _ = cx.lower_bound_graph(col)
        text = format_structure(graph)
    elif args.what == "fixture":
        text = format_structure(cx.figure_fixture(args.name).graph)
    elif args.what == "script":
        script = cx.random_script(args.n, args.profile, _seed(args))
        text = format_script(script)
    else:
        raise DynLabError(f"unknown construct target {args.what!r}")
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_verify_constructions(args) -> int:
    rng = random.Random(_seed(args))
    bad = 0
    fig4 = cx.figure_fixture("fig4")
    if not bool(cx.verify_lower_bound_property(fig4.extra["collection"])):
        print("fig4 collection: FAIL")
        bad += 1
    for n in range(2, args.n_max + 1):
        for k in range(0, args.k_max + 1):
            if n < k + 1:
                continue
            universe = list(itertools.combinations(range(1, n + 1), k + 1))
            exhaustive = 2 ** len(universe) <= args.samples
            if exhaustive:
                pool = [[set(m) for m in members]
                        for r in range(len(universe) + 1)
                        for members in itertools.combinations(universe, r)]
            else:
                pool = [[set(m) for m in rng.sample(
                    universe, rng.randrange(0, len(universe) + 1))]
                    for _ in range(args.samples)]
            for members in pool:
                col = cx.make_collection(n, k, members)
                check = cx.verify_lower_bound_property(col)
                if not check:
                    print(f"n={n} k={k} members={members}: FAIL "
                          f"(counterexample {check.counterexample})")
                    bad += 1
            print(f"n={n} k={k}: {len(pool)} collections "
                  f"({'exhaustive' if exhaustive else 'sampled'}) verified")
    print(f"{bad} violations")
    return 1 if bad else 0


# ------------------------------------------------------------------ sym

def cmd_sym(args) -> int:
    circuit = sc.parse_circuit(Path(args.circuit).read_text())
    assignment = [False] * circuit.m
    state = sc.sym_init(circuit, assignment)
    flips = [int(x) for x in args.flips.split()] if args.flips else []
    bad = 0
    for i, x in enumerate(flips):
        sc.sym_flip(state, x)
        assignment[x] = not assignment[x]
        line = f"flip {x}: activated={state.activated} " \
               f"output={sc.sym_output(state)}"
        if args.check:
            want = sc.sym_eval_direct(circuit, assignment)
            okay = sc.sym_output(state) == want
            line += f" direct={want} [{'ok' if okay else 'MISMATCH'}]"
            bad += 0 if okay else 1
        print(line)
    print(f"final output: {sc.sym_output(state)}")
    return 1 if bad else 0


# ------------------------------------------------------- validate / fmt

def cmd_validate(args) -> int:
    text = Path(args.program).read_text()
    try:
        program = ip.parse_program(text, name=Path(args.program).stem)
    except DynLabError as exc:
        print(f"parse error: {exc}")
        return 1
    problems = ip.validate(program)
    for p in problems:
        print(p)
    if not problems:
        print(f"{program.name}: ok ({program.class_claim}, "
              f"max aux arity {ip.max_aux_arity(program)})")
    return 1 if problems else 0


def cmd_fmt(args) -> int:
    program = ip.parse_program(Path(args.program).read_text(),
                               name=Path(args.program).stem)
    sys.stdout.write(ip.format_program(program))
    return 0


# ----------------------------------------------------------------- main

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dyncomplab")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a program or engine over a script")
    p.add_argument("--program")
    p.add_argument("--engine", choices=["fo-degk", "fo-logn"])
    p.add_argument("--script", required=True)
    p.add_argument("--oracle", choices=sorted(QUERY_NAMES))
    p.add_argument("--k", type=int)
    p.add_argument("--mode", choices=["skip", "strict"], default="skip")
    p.add_argument("--audit", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("fuzz", help="seeded differential fuzzing")
    p.add_argument("--target", required=True)
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--k", type=int)
    p.add_argument("--seeds", type=int, default=20)
    p.add_argument("--length", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--audit", action="store_true")
    p.set_defaults(fn=cmd_fuzz)

    p = sub.add_parser("oracle", help="evaluate a query from scratch")
    p.add_argument("--query", required=True, choices=sorted(QUERY_NAMES))
    p.add_argument("--k", type=int)
    p.add_argument("--structure")
    p.add_argument("--script")
    p.set_defaults(fn=cmd_oracle)

    p = sub.add_parser("construct", help="emit graphs, fixtures, scripts")
    p.add_argument("what", choices=["lower-bound", "fixture", "script"])
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--collection")
    p.add_argument("--name", default="fig1")
    p.add_argument("--profile", default="default")
    p.add_argument("--seed", type=int)
    p.add_argument("-o", "--output")
    p.set_defaults(fn=cmd_construct)

    p = sub.add_parser("verify-constructions",
                       help="check the subset-family encoding property")
    p.add_argument("--n-max", type=int, default=6)
    p.add_argument("--k-max", type=int, default=2)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--seed", type=int)
    p.set_defaults(fn=cmd_verify_constructions)

    p = sub.add_parser("sym", help="flip inputs of a symmetric circuit")
    p.add_argument("--circuit", required=True)
    p.add_argument("--flips", default="")
    p.add_argument("--check", action="store_true")
    p.set_defaults(fn=cmd_sym)

    p = sub.add_parser("validate", help="validate a program file")
    p.add_argument("--program", required=True)
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("fmt", help="pretty-print a program file")
    p.add_argument("--program", required=True)
    p.set_defaults(fn=cmd_fmt)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except DynLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
