"""Finite relational structures, single-tuple changes, and change scripts."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

INSERT = "ins"
DELETE = "del"


class DynLabError(Exception):
    pass


class ValidationError(DynLabError):
    pass


class UnknownRelationError(ValidationError):
    pass


class ArityMismatchError(ValidationError):
    pass


class ElementRangeError(ValidationError):
    pass


class ScriptSyntaxError(DynLabError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class Change:
    op: str  # INSERT or DELETE
    relation: str
    args: tuple[int, ...]

    def __post_init__(self):
        if self.op not in (INSERT, DELETE):
            raise ValidationError(f"unknown change op {self.op!r}")

    def __str__(self) -> str:
        return f"{self.op} {self.relation} {' '.join(map(str, self.args))}".rstrip()


@dataclass(frozen=True)
class Checkpoint:
    """Query marker inside a change script."""


CHECKPOINT = Checkpoint()


@dataclass(frozen=True)
class Structure:
    """Immutable finite structure: domain 0..n-1 plus named relations.

    relations maps name -> (arity, frozenset of tuples).
    """

    n: int
    relations: Mapping[str, tuple[int, frozenset[tuple[int, ...]]]]

    @staticmethod
    def make(n: int, schema: Mapping[str, int],
             contents: Mapping[str, Iterable[tuple[int, ...]]] | None = None) -> "Structure":
        if n < 0:
            raise ValidationError("domain size must be non-negative")
        rels = {}
        for name, arity in schema.items():
            tuples = frozenset(tuple(t) for t in (contents or {}).get(name, ()))
            for t in tuples:
                _check_tuple(name, arity, t, n)
            rels[name] = (arity, tuples)
        return Structure(n, rels)

    def arity(self, name: str) -> int:
        try:
            return self.relations[name][0]
        except KeyError:
            raise UnknownRelationError(f"unknown relation {name!r}") from None

    def tuples(self, name: str) -> frozenset[tuple[int, ...]]:
        try:
            return self.relations[name][1]
        except KeyError:
            raise UnknownRelationError(f"unknown relation {name!r}") from None

    def has(self, name: str, args: tuple[int, ...]) -> bool:
        return tuple(args) in self.tuples(name)

    def schema(self) -> dict[str, int]:
        return {name: ar for name, (ar, _) in self.relations.items()}

    def with_relation(self, name: str, arity: int,
                      tuples: Iterable[tuple[int, ...]]) -> "Structure":
        tuples = frozenset(tuple(t) for t in tuples)
        for t in tuples:
            _check_tuple(name, arity, t, self.n)
        rels = dict(self.relations)
        rels[name] = (arity, tuples)
        return Structure(self.n, rels)

    def merged(self, other: "Structure") -> "Structure":
        """Combine relation maps (disjoint names) over the same domain."""
        assert self.n == other.n
        rels = dict(self.relations)
        for name, val in other.relations.items():
            if name in rels:
                raise ValidationError(f"duplicate relation {name!r} in merge")
            rels[name] = val
        return Structure(self.n, rels)


def _check_tuple(name: str, arity: int, args: tuple[int, ...], n: int) -> None:
    if len(args) != arity:
        raise ArityMismatchError(
            f"{name} expects arity {arity}, got tuple of length {len(args)}")
    for v in args:
        if not 0 <= v < n:
            raise ElementRangeError(f"element {v} out of range [0, {n}) in {name}")


def validate_change(s: Structure, c: Change) -> None:
    _check_tuple(c.relation, s.arity(c.relation), c.args, s.n)


def apply_change(s: Structure, c: Change) -> Structure:
    """Add/remove one tuple; identity on non-effective changes."""
    validate_change(s, c)
    arity, tuples = s.relations[c.relation]
    if c.op == INSERT:
        new = tuples | {c.args}
    else:
        new = tuples - {c.args}
    if new == tuples:
        return s
    rels = dict(s.relations)
    rels[c.relation] = (arity, frozenset(new))
    return Structure(s.n, rels)


def is_effective(s: Structure, c: Change) -> bool:
    validate_change(s, c)
    present = s.has(c.relation, c.args)
    return (c.op == INSERT) != present


def coloured_graph(n: int, edges: Iterable[tuple[int, int]] = (),
                   coloured: Iterable[int] = ()) -> Structure:
    """Directed graph with a unary colour relation: relations E/2 and R/1."""
    return Structure.make(n, {"E": 2, "R": 1},
                          {"E": [tuple(e) for e in edges],
                           "R": [(v,) for v in coloured]})


def graph_edges(s: Structure) -> frozenset[tuple[int, int]]:
    return s.tuples("E")


def graph_coloured(s: Structure) -> frozenset[int]:
    return frozenset(v for (v,) in s.tuples("R"))


@dataclass(frozen=True)
class ChangeScript:
    domain_size: int
    declared: Mapping[str, int]  # relation name -> arity (declared or inferred)
    entries: tuple[Change | Checkpoint, ...]

    def changes(self) -> list[Change]:
        return [e for e in self.entries if isinstance(e, Change)]

    def num_checkpoints(self) -> int:
        return sum(1 for e in self.entries if isinstance(e, Checkpoint))


def parse_script(text: str, schema: Mapping[str, int] | None = None) -> ChangeScript:
    """Parse the line-based script grammar.

    `rel` declarations are optional; undeclared relation arities are inferred
    from first use (and checked against `schema` when one is supplied).
    """
    domain: int | None = None
    declared: dict[str, int] = dict(schema or {})
    entries: list[Change | Checkpoint] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kw = parts[0]
        if kw == "domain":
            if domain is not None:
                raise ScriptSyntaxError("duplicate domain line", lineno)
            if len(parts) != 2 or not parts[1].isdigit():
                raise ScriptSyntaxError("expected: domain <n>", lineno)
            domain = int(parts[1])
        elif kw == "rel":
            if len(parts) != 2 or "/" not in parts[1]:
                raise ScriptSyntaxError("expected: rel <Name>/<arity>", lineno)
            name, _, ar = parts[1].partition("/")
            if not name or not ar.isdigit():
                raise ScriptSyntaxError("expected: rel <Name>/<arity>", lineno)
            if name in declared and declared[name] != int(ar):
                raise ArityMismatchError(
                    f"line {lineno}: relation {name} redeclared with arity {ar}")
            declared[name] = int(ar)
        elif kw in (INSERT, DELETE):
            if domain is None:
                raise ScriptSyntaxError("domain must be declared before changes", lineno)
            if len(parts) < 2:
                raise ScriptSyntaxError(f"expected: {kw} <Name> <id>...", lineno)
            name = parts[1]
            try:
                args = tuple(int(p) for p in parts[2:])
            except ValueError:
                raise ScriptSyntaxError("ids must be decimal integers", lineno) from None
            if name in declared:
                if len(args) != declared[name]:
                    raise ArityMismatchError(
                        f"line {lineno}: {name} expects arity {declared[name]}, "
                        f"got {len(args)}")
            else:
                declared[name] = len(args)
            for v in args:
                if not 0 <= v < domain:
                    raise ElementRangeError(
                        f"line {lineno}: element {v} out of range [0, {domain})")
            entries.append(Change(kw, name, args))
        elif kw == "query":
            if len(parts) != 1:
                raise ScriptSyntaxError("query takes no arguments", lineno)
            entries.append(CHECKPOINT)
        else:
            raise ScriptSyntaxError(f"unknown directive {kw!r}", lineno)
    if domain is None:
        raise ScriptSyntaxError("missing domain line")
    return ChangeScript(domain, declared, tuple(entries))


def format_script(script: ChangeScript, declare: bool = True) -> str:
    lines = [f"domain {script.domain_size}"]
    if declare:
        for name in sorted(script.declared):
            lines.append(f"rel {name}/{script.declared[name]}")
    for e in script.entries:
        lines.append("query" if isinstance(e, Checkpoint) else str(e))
    return "\n".join(lines) + "\n"


def parse_structure(text: str) -> Structure:
    """Parse the structure file format: domain / rel / set lines."""
    n: int | None = None
    schema: dict[str, int] = {}
    contents: dict[str, list[tuple[int, ...]]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kw = parts[0]
        if kw == "domain":
            if len(parts) != 2 or not parts[1].isdigit():
                raise ScriptSyntaxError("expected: domain <n>", lineno)
            n = int(parts[1])
        elif kw == "rel":
            name, _, ar = parts[1].partition("/")
            if not name or not ar.isdigit():
                raise ScriptSyntaxError("expected: rel <Name>/<arity>", lineno)
            schema[name] = int(ar)
        elif kw == "set":
            if n is None:
                raise ScriptSyntaxError("domain must come first", lineno)
            if len(parts) < 2:
                raise ScriptSyntaxError("expected: set <Name> <id>...", lineno)
            name = parts[1]
            try:
                args = tuple(int(p) for p in parts[2:])
            except ValueError:
                raise ScriptSyntaxError("ids must be decimal integers", lineno) from None
            if name not in schema:
                schema[name] = len(args)
            contents.setdefault(name, []).append(args)
        else:
            raise ScriptSyntaxError(f"unknown directive {kw!r}", lineno)
    if n is None:
        raise ScriptSyntaxError("missing domain line")
    return Structure.make(n, schema, contents)


def format_structure(s: Structure) -> str:
    lines = [f"domain {s.n}"]
    for name in sorted(s.relations):
        lines.append(f"rel {name}/{s.arity(name)}")
    for name in sorted(s.relations):
        for t in sorted(s.tuples(name)):
            lines.append(f"set {name} {' '.join(map(str, t))}".rstrip())
    return "\n".join(lines) + "\n"
