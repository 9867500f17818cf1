"""Incremental evaluation of depth-two symmetric circuits.

A circuit is a list of and-gates over input bits plus a symmetric output
function given as a lookup table over the number of activated gates.
The state keeps, for every subset A of some gate's input set, the count
of gates that would be activated if the inputs in A were ignored and
that contain all of A; a single bit flip updates every counter with one
addition, and the output is a table lookup on the A = ∅ counter.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .structures import DynLabError, ValidationError


class CircuitError(DynLabError):
    pass


@dataclass(frozen=True)
class SymCircuit:
    m: int                                  # number of inputs
    fanin: int                              # gate fan-in bound
    gates: tuple[frozenset[int], ...]
    h: tuple[bool, ...]                     # output table, length gates+1


def make_circuit(m: int, fanin: int, gates, h) -> SymCircuit:
    gates = tuple(frozenset(g) for g in gates)
    h = tuple(bool(b) for b in h)
    if m < 0 or fanin < 1:
        raise CircuitError("need m >= 0 and fan-in bound >= 1")
    for g in gates:
        if not g:
            raise CircuitError("empty gate input set")
        if len(g) > fanin:
            raise CircuitError(f"gate {sorted(g)} exceeds fan-in bound {fanin}")
        if not all(0 <= i < m for i in g):
            raise CircuitError(f"gate {sorted(g)} references missing inputs")
    if len(h) != len(gates) + 1:
        raise CircuitError(f"output table needs {len(gates) + 1} entries, "
                           f"got {len(h)}")
    return SymCircuit(m, fanin, gates, h)


@dataclass
class SymState:
    circuit: SymCircuit
    assignment: list[bool]
    counters: dict[frozenset[int], int]
    # per input x: (A, A ∪ {x}) pairs with both subsets tracked
    affected: dict[int, list[tuple[frozenset[int], frozenset[int]]]] = \
        field(repr=False, default_factory=dict)

    @property
    def activated(self) -> int:
        return self.counters.get(frozenset(), 0)


def _tracked_subsets(c: SymCircuit) -> set[frozenset[int]]:
    out: set[frozenset[int]] = set()
    for g in c.gates:
        members = sorted(g)
        for r in range(len(members) + 1):
            out.update(map(frozenset, itertools.combinations(members, r)))
    return out


def sym_init(c: SymCircuit, assignment) -> SymState:
    """Count, for every tracked A, the gates containing A whose inputs
    outside A are all set (brute force; flips afterwards are cheap)."""
    assignment = [bool(b) for b in assignment]
    if len(assignment) != c.m:
        raise CircuitError(f"assignment must have {c.m} bits")
    counters = {a: 0 for a in _tracked_subsets(c)}
    for g in c.gates:
        off = frozenset(i for i in g if not assignment[i])
        rest = sorted(g - off)
        for r in range(len(rest) + 1):
            for extra in itertools.combinations(rest, r):
                counters[off | frozenset(extra)] += 1
    affected: dict[int, list] = {x: [] for x in range(c.m)}
    for a in counters:
        for x in a:
            smaller = a - {x}
            if smaller in counters:
                affected[x].append((smaller, a))
    return SymState(c, assignment, counters, affected)


def sym_flip(state: SymState, x: int) -> SymState:
    """Toggle input bit x, updating every counter in place."""
    if not 0 <= x < state.circuit.m:
        raise ValidationError(f"input index {x} out of range")
    delta = -1 if state.assignment[x] else 1
    counters = state.counters
    for smaller, larger in state.affected.get(x, ()):
        counters[smaller] += delta * counters[larger]
    state.assignment[x] = not state.assignment[x]
    return state


def sym_output(state: SymState) -> bool:
    return state.circuit.h[state.activated]


def sym_eval_direct(c: SymCircuit, assignment) -> bool:
    """From-scratch evaluation; the ground truth for the counter scheme."""
    assignment = [bool(b) for b in assignment]
    if len(assignment) != c.m:
        raise CircuitError(f"assignment must have {c.m} bits")
    activated = sum(1 for g in c.gates if all(assignment[i] for i in g))
    return c.h[activated]


def counters_reference(c: SymCircuit, assignment) -> dict[frozenset[int], int]:
    """Brute-force counter values (used by the audit tests)."""
    return sym_init(c, assignment).counters


# ------------------------------------------------------------ file format

def format_circuit(c: SymCircuit) -> str:
    lines = [f"inputs {c.m}", f"fanin {c.fanin}"]
    for g in c.gates:
        lines.append("gate " + " ".join(map(str, sorted(g))))
    lines.append("sym " + " ".join("1" if b else "0" for b in c.h))
    return "\n".join(lines) + "\n"


def parse_circuit(text: str) -> SymCircuit:
    m = fanin = None
    gates: list[frozenset[int]] = []
    h: tuple | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *rest = line.split()
        try:
            if head == "inputs":
                (m,) = map(int, rest)
            elif head == "fanin":
                (fanin,) = map(int, rest)
            elif head == "gate":
                gates.append(frozenset(map(int, rest)))
            elif head == "sym":
                h = tuple(int(b) != 0 for b in rest)
            else:
                raise CircuitError(f"line {lineno}: unknown directive {head!r}")
        except ValueError as exc:
            raise CircuitError(f"line {lineno}: {exc}") from None
    if m is None or fanin is None or h is None:
        raise CircuitError("circuit needs inputs, fanin, and sym lines")
    return make_circuit(m, fanin, gates, h)
