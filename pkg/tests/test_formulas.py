import random

import pytest
from hypothesis import given, settings, strategies as st

from dyncomplab.bulk_eval import array_to_relation, bulk_eval, relation_to_array
from dyncomplab.formulas import (And, Atom, Const, Eq, Exists, FALSE, Forall,
                                 FormulaError, Not, Or, TRUE, Var, Xor, atom,
                                 classify, conj, disj, eq, evaluate,
                                 free_variables, materialise_builtins, neg,
                                 parse_formula, pretty, validate_formula)
from dyncomplab.structures import DynLabError, Structure

SCHEMA = {"E": 2, "R": 1, "U": 1, "Z": 0}
VARS = ("x", "y", "z")


def random_formula(rng, depth=3):
    if depth == 0 or rng.random() < 0.3:
        kind = rng.randrange(4)
        if kind == 0:
            rel = rng.choice(list(SCHEMA))
            terms = [rng.choice(VARS) if rng.random() < 0.7
                     else rng.randrange(4) for _ in range(SCHEMA[rel])]
            return atom(rel, *terms)
        if kind == 1:
            return eq(rng.choice(VARS), rng.choice(VARS) if rng.random() < .6
                      else rng.randrange(4))
        return TRUE if kind == 2 else FALSE
    kind = rng.randrange(6)
    if kind == 0:
        return Not(random_formula(rng, depth - 1))
    if kind < 4:
        op = (And, Or, Xor)[kind - 1]
        return op(random_formula(rng, depth - 1),
                  random_formula(rng, depth - 1))
    op = Exists if kind == 4 else Forall
    return op(rng.choice(VARS), random_formula(rng, depth - 1))


def random_structure(rng, n):
    contents = {}
    for rel, ar in SCHEMA.items():
        tuples = []
        for t in __import__("itertools").product(range(n), repeat=ar):
            if rng.random() < 0.4:
                tuples.append(t)
        contents[rel] = tuples
    return Structure.make(n, SCHEMA, contents)


def full_assignment(rng, n):
    return {v: rng.randrange(n) for v in VARS}


def test_parse_basics():
    f = parse_formula("E(x, y) & !R(x)")
    assert classify(f) == "quantifier-free"
    g = parse_formula("exists x. E(x, y)")
    assert classify(g) == "first-order"
    assert free_variables(g) == frozenset({"y"})


def test_implication_desugars():
    assert parse_formula("A() -> B()") == Or(Not(atom("A")), atom("B"))


def test_precedence():
    f = parse_formula("R(x) | R(y) & R(z)")
    assert isinstance(f, Or) and isinstance(f.right, And)
    g = parse_formula("!R(x) & R(y)")
    assert isinstance(g, And) and isinstance(g.left, Not)
    h = parse_formula("R(x) ^ R(y) | R(z)")
    assert isinstance(h, Or) and isinstance(h.left, Xor)


def test_quantifier_scope_extends_right():
    f = parse_formula("exists x. E(x, y) & R(x)")
    assert isinstance(f, Exists) and isinstance(f.body, And)


def test_parse_errors():
    for bad in ("E(x", "& R(x)", "exists . R(x)", "R(x) &", "1 = "):
        with pytest.raises(FormulaError):
            parse_formula(bad)


def test_validate_formula():
    validate_formula(parse_formula("E(x, y)"), SCHEMA)
    with pytest.raises(DynLabError):
        validate_formula(parse_formula("E(x)"), SCHEMA)
    with pytest.raises(DynLabError):
        validate_formula(parse_formula("Q(x)"), SCHEMA)


def test_builders():
    assert conj([]) == TRUE and disj([]) == FALSE
    assert neg(atom("R", "x")) == Not(atom("R", Var("x")))
    assert atom("E", "x", 2) == Atom("E", (Var("x"), Const(2)))


def test_builtins_order_and_bit():
    b = materialise_builtins(8, ["order", "bit"])
    assert b.has("leq", (2, 5)) and not b.has("leq", (5, 2))
    assert b.has("leq", (3, 3))
    # bit(v, i): i-th bit of v, least significant bit = 1
    assert b.tuples("bit") >= {(5, 1), (5, 3), (6, 2), (6, 3)}
    assert not b.has("bit", (5, 2)) and not b.has("bit", (0, 1))


def test_evaluate_simple():
    s = Structure.make(3, {"E": 2}, {"E": [(0, 1), (1, 2)]})
    assert evaluate(parse_formula("exists y. E(x, y)"), s, {"x": 0})
    assert not evaluate(parse_formula("exists y. E(x, y)"), s, {"x": 2})
    assert evaluate(parse_formula("forall x. exists y. E(x, y) | x = 2"), s, {})


def test_round_trip_random():
    rng = random.Random(7)
    for _ in range(400):
        f = random_formula(rng)
        assert parse_formula(pretty(f)) == f, pretty(f)


def test_semantic_laws_random():
    rng = random.Random(11)
    for _ in range(300):
        n = rng.randrange(1, 5)
        s = random_structure(rng, n)
        a = full_assignment(rng, n)
        f = random_formula(rng)
        g = random_formula(rng)
        v = rng.choice(VARS)
        assert evaluate(Not(Not(f)), s, a) == evaluate(f, s, a)
        assert evaluate(Xor(f, g), s, a) == (
            evaluate(f, s, a) != evaluate(g, s, a))
        assert evaluate(Not(And(f, g)), s, a) == \
            evaluate(Or(Not(f), Not(g)), s, a)
        assert evaluate(Exists(v, f), s, a) == \
            evaluate(Not(Forall(v, Not(f))), s, a)


def test_bulk_eval_matches_evaluate():
    rng = random.Random(23)
    for _ in range(150):
        n = rng.randrange(1, 5)
        s = random_structure(rng, n)
        f = random_formula(rng)
        frees = tuple(sorted(free_variables(f)))
        arrays = {rel: relation_to_array(tuples, ar, n)
                  for rel, (ar, tuples) in s.relations.items()}
        got = array_to_relation(bulk_eval(f, arrays, n, {}, frees))
        want = frozenset(
            b for b in __import__("itertools").product(range(n),
                                                       repeat=len(frees))
            if evaluate(f, s, dict(zip(frees, b))))
        assert got == want, pretty(f)


@given(st.integers(0, 2 ** 30))
@settings(max_examples=100, deadline=None)
def test_bit_matches_binary(v):
    n = v + 1
    b = materialise_builtins(min(n, 64), ["bit"])
    if v < 64:
        want = {i + 1 for i in range(v.bit_length()) if v >> i & 1}
        assert {i for (w, i) in b.tuples("bit") if w == v} == want
