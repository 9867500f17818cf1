import random

import pytest

from dyncomplab import symcircuit as sc


def _majority3():
    # three inputs, two gates {1,2,3} and {1,2}, output true when at least
    # two gates are active
    return sc.make_circuit(3, 3, [frozenset({0, 1, 2}), frozenset({0, 1})],
                           [False, False, True])


def test_activated_counts():
    st = sc.sym_init(_majority3(), [False] * 3)
    assert st.activated == 0
    sc.sym_flip(st, 0)
    sc.sym_flip(st, 1)
    assert st.activated == 1              # only {1,2} fully on
    sc.sym_flip(st, 2)
    assert st.activated == 2
    assert sc.sym_output(st) is True


def test_flip_is_involution():
    circ = _majority3()
    st = sc.sym_init(circ, [False] * 3)
    base = dict(st.counters)
    sc.sym_flip(st, 2)
    sc.sym_flip(st, 2)
    assert dict(st.counters) == base
    assert st.assignment == [False] * 3


def test_counters_stay_consistent_under_random_flips():
    rng = random.Random(5)
    for trial in range(15):
        m = rng.randrange(2, 7)
        gates = []
        for _ in range(rng.randrange(1, 5)):
            size = rng.randrange(1, m + 1)
            gates.append(frozenset(rng.sample(range(m), size)))
        h = [rng.random() < 0.5 for _ in range(len(gates) + 1)]
        circ = sc.make_circuit(m, m, gates, h)
        st = sc.sym_init(circ, [False] * m)
        for _ in range(60):
            sc.sym_flip(st, rng.randrange(m))
            assert sc.sym_output(st) == sc.sym_eval_direct(
                circ, st.assignment)
        assert st.counters == sc.counters_reference(circ, st.assignment)
        assert all(v >= 0 for v in st.counters.values())


def test_make_circuit_validation():
    with pytest.raises(sc.CircuitError):
        sc.make_circuit(3, 2, [frozenset({0, 1, 2})], [False, True])
    with pytest.raises(sc.CircuitError):
        sc.make_circuit(3, 3, [frozenset()], [False, True])
    with pytest.raises(sc.CircuitError):
        sc.make_circuit(3, 3, [frozenset({3})], [False, True])
    with pytest.raises(sc.CircuitError):
        sc.make_circuit(3, 3, [frozenset({0})], [False])


def test_format_parse_round_trip():
    circ = _majority3()
    text = sc.format_circuit(circ)
    again = sc.parse_circuit(text)
    assert again == circ


def test_parse_circuit_rejects_garbage():
    with pytest.raises(sc.CircuitError):
        sc.parse_circuit("inputs 3\nfanin 3\ngate 1 2\nsym\n")
    with pytest.raises(sc.CircuitError):
        sc.parse_circuit("inputs x\n")


def test_flip_out_of_range():
    from dyncomplab.structures import DynLabError
    st = sc.sym_init(_majority3(), [False] * 3)
    with pytest.raises(DynLabError):
        sc.sym_flip(st, -1)
    with pytest.raises(DynLabError):
        sc.sym_flip(st, 3)
