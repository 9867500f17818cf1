"""Dynamic-program runtime.

A program owns one update rule per (change op, input relation, auxiliary
relation).  A step recomputes every auxiliary relation simultaneously
against the pre-change state, then applies the input change.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from . import formulas as fm
from .bulk_eval import array_to_relation, bulk_eval, relation_to_array
from .structures import (CHECKPOINT, Change, ChangeScript, Checkpoint,
                         DynLabError, ScriptSyntaxError, Structure,
                         ValidationError, apply_change, is_effective)

log = logging.getLogger(__name__)

BUILTIN_SCHEMAS = {"order": {"leq": 2}, "bit": {"bit": 2}}


class ProgramError(DynLabError):
    pass


class NonEffectiveChangeError(ProgramError):
    pass


@dataclass(frozen=True)
class UpdateRule:
    op: str                      # "ins" | "del"
    relation: str                # changed input relation
    target: str                  # auxiliary relation being recomputed
    params: tuple[str, ...]
    frees: tuple[str, ...]
    body: fm.Formula


@dataclass(frozen=True)
class DynamicProgram:
    name: str
    input_schema: Mapping[str, int]
    aux_schema: Mapping[str, int]
    rules: Mapping[tuple[str, str, str], UpdateRule]  # (op, relation, target)
    init_aux: Mapping[str, frozenset[tuple[int, ...]]]
    answer: str
    requires_effective: bool = False
    builtins: tuple[str, ...] = ()
    class_claim: str = "DynProp"

    def rule_for(self, op: str, relation: str, target: str) -> UpdateRule:
        return self.rules[(op, relation, target)]

    def builtin_schema(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for b in self.builtins:
            out.update(BUILTIN_SCHEMAS[b])
        return out

    def combined_schema(self) -> dict[str, int]:
        return {**self.input_schema, **self.aux_schema, **self.builtin_schema()}


def make_program(name, input_schema, aux_schema, rules: Iterable[UpdateRule],
                 init_aux, answer, requires_effective=False, builtins=(),
                 class_claim="DynProp") -> DynamicProgram:
    keyed: dict[tuple[str, str, str], UpdateRule] = {}
    for r in rules:
        key = (r.op, r.relation, r.target)
        if key in keyed:
            raise ProgramError(f"duplicate rule for {key}")
        keyed[key] = r
    prog = DynamicProgram(
        name=name,
        input_schema=dict(input_schema),
        aux_schema=dict(aux_schema),
        rules=keyed,
        init_aux={k: frozenset(tuple(t) for t in v) for k, v in init_aux.items()},
        answer=answer,
        requires_effective=requires_effective,
        builtins=tuple(builtins),
        class_claim=class_claim,
    )
    problems = validate(prog)
    if problems:
        raise ProgramError(f"invalid program {name}: " + "; ".join(problems))
    return prog


def validate(p: DynamicProgram) -> list[str]:
    """Total rule coverage, arities, binding, and class-claim diagnostics."""
    out = []
    schema = p.combined_schema()
    if p.answer not in p.aux_schema:
        out.append(f"answer relation {p.answer!r} not in aux schema")
    for name in p.builtin_schema():
        if name in p.input_schema or name in p.aux_schema:
            out.append(f"builtin relation name {name!r} clashes")
    seen = set()
    for key, rule in p.rules.items():
        op, relation, target = key
        seen.add(key)
        if relation not in p.input_schema:
            out.append(f"rule on unknown input relation {relation!r}")
            continue
        if target not in p.aux_schema:
            out.append(f"rule targets unknown aux relation {target!r}")
            continue
        if len(rule.params) != p.input_schema[relation]:
            out.append(f"rule {key}: |params| != arity of {relation}")
        if len(rule.frees) != p.aux_schema[target]:
            out.append(f"rule {key}: |frees| != arity of {target}")
        if len(set(rule.params) | set(rule.frees)) != len(rule.params) + len(rule.frees):
            out.append(f"rule {key}: params and frees overlap")
        try:
            fm.validate_formula(rule.body, schema)
        except DynLabError as exc:
            out.append(f"rule {key}: {exc}")
        unbound = fm.free_variables(rule.body) - set(rule.params) - set(rule.frees)
        if unbound:
            out.append(f"rule {key}: unbound names {sorted(unbound)}")
        if p.class_claim == "DynProp" and fm.classify(rule.body) != "quantifier-free":
            out.append(f"rule {key}: not quantifier-free despite DynProp claim")
    for op in ("ins", "del"):
        for relation in p.input_schema:
            for target in p.aux_schema:
                if (op, relation, target) not in seen:
                    out.append(f"missing rule ({op}, {relation}, {target})")
    for name, tuples in p.init_aux.items():
        if name not in p.aux_schema:
            out.append(f"init_aux references unknown relation {name!r}")
            continue
        for t in tuples:
            if len(t) != p.aux_schema[name]:
                out.append(f"init_aux tuple arity mismatch on {name!r}")
    return out


def max_aux_arity(p: DynamicProgram) -> int:
    return max(p.aux_schema.values(), default=0)


@dataclass
class ProgramState:
    """Input structure + auxiliary relations (kept as boolean arrays)."""

    program: DynamicProgram
    input: Structure
    aux_arrays: dict[str, np.ndarray]
    builtin_arrays: dict[str, np.ndarray] = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.input.n

    def aux_structure(self) -> Structure:
        return Structure.make(
            self.n, dict(self.program.aux_schema),
            {name: array_to_relation(arr) for name, arr in self.aux_arrays.items()})

    def combined_structure(self) -> Structure:
        s = self.input.merged(self.aux_structure())
        if self.program.builtins:
            s = s.merged(fm.materialise_builtins(self.n, self.program.builtins))
        return s

    def answer(self):
        arr = self.aux_arrays[self.program.answer]
        if arr.ndim == 0:
            return bool(arr)
        return array_to_relation(arr)


def init_state(p: DynamicProgram, n: int) -> ProgramState:
    if n < 0:
        raise ValidationError("domain size must be non-negative")
    input_structure = Structure.make(n, dict(p.input_schema))
    aux_arrays = {}
    for name, arity in p.aux_schema.items():
        aux_arrays[name] = relation_to_array(p.init_aux.get(name, ()), arity, n)
    builtin_arrays = {}
    if p.builtins:
        b = fm.materialise_builtins(n, p.builtins)
        for name, (arity, tuples) in b.relations.items():
            builtin_arrays[name] = relation_to_array(tuples, arity, n)
    return ProgramState(p, input_structure, aux_arrays, builtin_arrays)


def _input_arrays(state: ProgramState) -> dict[str, np.ndarray]:
    out = {}
    for name, (arity, tuples) in state.input.relations.items():
        out[name] = relation_to_array(tuples, arity, state.n)
    return out


def _check_effectiveness(state: ProgramState, c: Change, mode: str) -> bool:
    """Returns True when the step should be skipped."""
    if not state.program.requires_effective or is_effective(state.input, c):
        return False
    if mode == "strict":
        raise NonEffectiveChangeError(
            f"{state.program.name}: non-effective change {c} rejected")
    log.debug("%s: skipping non-effective change %s", state.program.name, c)
    return True


def step(state: ProgramState, c: Change, mode: str = "skip") -> ProgramState:
    """Advance one change (vectorised; semantics identical to step_reference)."""
    p = state.program
    if c.relation not in p.input_schema:
        raise ValidationError(f"change targets non-input relation {c.relation!r}")
    if _check_effectiveness(state, c, mode):
        return state
    env = {**_input_arrays(state), **state.builtin_arrays, **state.aux_arrays}
    new_aux = {}
    for target in p.aux_schema:
        rule = p.rules[(c.op, c.relation, target)]
        params = dict(zip(rule.params, c.args))
        # np.array (not ascontiguousarray) keeps 0-dim results 0-dim
        new_aux[target] = np.array(
            bulk_eval(rule.body, env, state.n, params, rule.frees), dtype=bool)
    return ProgramState(p, apply_change(state.input, c), new_aux,
                        state.builtin_arrays)


def step_reference(state: ProgramState, c: Change, mode: str = "skip") -> ProgramState:
    """Naive per-tuple reference semantics (slow; used to cross-check step)."""
    p = state.program
    if c.relation not in p.input_schema:
        raise ValidationError(f"change targets non-input relation {c.relation!r}")
    if _check_effectiveness(state, c, mode):
        return state
    snapshot = state.combined_structure()
    new_aux = {}
    for target, arity in p.aux_schema.items():
        rule = p.rules[(c.op, c.relation, target)]
        assignment = dict(zip(rule.params, c.args))
        hits = []
        for b in itertools.product(range(state.n), repeat=arity):
            assignment.update(zip(rule.frees, b))
            if fm.evaluate(rule.body, snapshot, assignment):
                hits.append(b)
        new_aux[target] = relation_to_array(hits, arity, state.n)
    return ProgramState(p, apply_change(state.input, c), new_aux,
                        state.builtin_arrays)


@dataclass
class RunTrace:
    answers: list
    aux_snapshots: list[Structure] | None = None
    skipped: int = 0


def run(p: DynamicProgram, script: ChangeScript, mode: str = "skip",
        trace_aux: bool = False, stepper=step) -> RunTrace:
    state = init_state(p, script.domain_size)
    trace = RunTrace(answers=[], aux_snapshots=[] if trace_aux else None)
    for entry in script.entries:
        if isinstance(entry, Checkpoint):
            trace.answers.append(state.answer())
            if trace_aux:
                trace.aux_snapshots.append(state.aux_structure())
        else:
            before = state
            state = stepper(state, entry, mode)
            if state is before:
                trace.skipped += 1
    return trace


# ---------------------------------------------------------------- file format

def format_program(p: DynamicProgram) -> str:
    lines = [f"# program: {p.name}"]
    for name in p.input_schema:
        lines.append(f"input {name}/{p.input_schema[name]}")
    for b in p.builtins:
        lines.append(f"builtin {b}")
    for name in p.aux_schema:
        lines.append(f"aux {name}/{p.aux_schema[name]}")
    for name in p.init_aux:
        for t in sorted(p.init_aux[name]):
            lines.append(f"init {name} {' '.join(map(str, t))}".rstrip())
    lines.append(f"answer {p.answer}")
    if p.requires_effective:
        lines.append("requires_effective")
    for (op, relation, target) in sorted(p.rules):
        rule = p.rules[(op, relation, target)]
        head = f"on {op} {relation}({', '.join(rule.params)})"
        update = f"update {target}({', '.join(rule.frees)})"
        lines.append(f"{head} {update} := {fm.pretty(rule.body)}")
    return "\n".join(lines) + "\n"


def parse_program(text: str, name: str = "unnamed") -> DynamicProgram:
    input_schema: dict[str, int] = {}
    aux_schema: dict[str, int] = {}
    init_aux: dict[str, list[tuple[int, ...]]] = {}
    rules: list[UpdateRule] = []
    answer: str | None = None
    requires_effective = False
    builtins: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kw = parts[0]
        try:
            if kw in ("input", "aux"):
                rel, _, ar = parts[1].partition("/")
                if not rel or not ar.isdigit():
                    raise ScriptSyntaxError(f"expected: {kw} <Name>/<arity>", lineno)
                (input_schema if kw == "input" else aux_schema)[rel] = int(ar)
            elif kw == "builtin":
                if parts[1] not in BUILTIN_SCHEMAS:
                    raise ScriptSyntaxError(f"unknown builtin {parts[1]!r}", lineno)
                builtins.append(parts[1])
            elif kw == "init":
                init_aux.setdefault(parts[1], []).append(
                    tuple(int(x) for x in parts[2:]))
            elif kw == "answer":
                answer = parts[1]
            elif kw == "requires_effective":
                requires_effective = True
            elif kw == "on":
                rules.append(_parse_rule(line, lineno))
            else:
                raise ScriptSyntaxError(f"unknown directive {kw!r}", lineno)
        except (IndexError, ValueError):
            raise ScriptSyntaxError(f"malformed {kw!r} line", lineno) from None
    if answer is None:
        raise ScriptSyntaxError("missing answer line")
    claim = "DynProp"
    for r in rules:
        if fm.classify(r.body) == "first-order":
            claim = "DynFO"
    return make_program(name, input_schema, aux_schema, rules, init_aux,
                        answer, requires_effective, builtins, claim)


def _parse_rule(line: str, lineno: int) -> UpdateRule:
    # on <op> <Rel>(<params>) update <Aux>(<frees>) := <formula>
    head, sep, body_text = line.partition(":=")
    if not sep:
        raise ScriptSyntaxError("rule missing ':='", lineno)
    tokens = head.split(None, 2)
    if len(tokens) != 3 or tokens[0] != "on" or tokens[1] not in ("ins", "del"):
        raise ScriptSyntaxError("expected: on ins|del <Rel>(...) update ...", lineno)
    op = tokens[1]
    rest = tokens[2]
    rel_part, sep, target_part = rest.partition("update")
    if not sep:
        raise ScriptSyntaxError("rule missing 'update'", lineno)

    def parse_head(part: str) -> tuple[str, tuple[str, ...]]:
        part = part.strip()
        if not part.endswith(")") or "(" not in part:
            raise ScriptSyntaxError("malformed rule head", lineno)
        name, _, args = part[:-1].partition("(")
        names = tuple(a.strip() for a in args.split(",")) if args.strip() else ()
        return name.strip(), names

    relation, params = parse_head(rel_part)
    target, frees = parse_head(target_part)
    try:
        body = fm.parse_formula(body_text.strip())
    except DynLabError as exc:
        raise ScriptSyntaxError(f"bad formula: {exc}", lineno) from None
    return UpdateRule(op, relation, target, params, frees, body)
