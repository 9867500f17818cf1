"""Vectorised formula evaluation over boolean numpy arrays.

Computes { b̄ : φ(params; b̄) } for a whole free-variable space at once.
Semantically identical to formulas.evaluate (property-tested against it);
exists purely so the interpreter can meet the acceptance-suite runtime.
"""

from __future__ import annotations

from typing import Mapping

import numpy as np

from .formulas import (And, Atom, Const, Eq, Exists, Forall, Formula,
                       FormulaError, Not, Or, Truth, Var, Xor)


def bulk_eval(f: Formula, rels: Mapping[str, np.ndarray], n: int,
              params: Mapping[str, int], frees: tuple[str, ...]) -> np.ndarray:
    """Boolean array of shape (n,)*len(frees), axis i ranging over frees[i]."""
    shape = (n,) * len(frees)
    axis_of = {v: i for i, v in enumerate(frees)}
    res = _eval(f, rels, n, params, frees, axis_of)
    return np.broadcast_to(res, shape)


def _full(value: bool, n: int, frees) -> np.ndarray:
    return np.full((n,) * len(frees), value, dtype=bool)


def _term_resolve(t, params):
    """Return ('const', id) or ('var', name)."""
    if isinstance(t, Const):
        return ("const", t.value)
    if t.name in params:
        return ("const", params[t.name])
    return ("var", t.name)


def _eval(f, rels, n, params, frees, axis_of) -> np.ndarray:
    if isinstance(f, Truth):
        return _full(f.value, n, frees)
    if isinstance(f, Not):
        return ~_eval(f.sub, rels, n, params, frees, axis_of)
    if isinstance(f, And):
        return _eval(f.left, rels, n, params, frees, axis_of) & \
            _eval(f.right, rels, n, params, frees, axis_of)
    if isinstance(f, Or):
        return _eval(f.left, rels, n, params, frees, axis_of) | \
            _eval(f.right, rels, n, params, frees, axis_of)
    if isinstance(f, Xor):
        return _eval(f.left, rels, n, params, frees, axis_of) ^ \
            _eval(f.right, rels, n, params, frees, axis_of)
    if isinstance(f, (Exists, Forall)):
        inner_frees = frees + (f.var,)
        inner_axis = dict(axis_of)
        inner_axis[f.var] = len(frees)
        inner_params = {k: v for k, v in params.items() if k != f.var}
        body = np.broadcast_to(
            _eval(f.body, rels, n, inner_params, inner_frees, inner_axis),
            (n,) * len(inner_frees))
        if n == 0:
            return _full(isinstance(f, Forall), n, frees)
        reducer = np.any if isinstance(f, Exists) else np.all
        return reducer(body, axis=-1)
    if isinstance(f, Eq):
        return _eval_eq(f, n, params, frees, axis_of)
    if isinstance(f, Atom):
        return _eval_atom(f, rels, n, params, frees, axis_of)
    raise FormulaError(f"unknown node {f!r}")


def _axis_view(arr: np.ndarray, var_order: list[str], n: int, frees, axis_of):
    """Reshape an array over var_order into broadcast position over frees."""
    for v in var_order:
        if v not in axis_of:
            raise FormulaError(f"unbound variable {v!r}")
    order = sorted(range(len(var_order)), key=lambda i: axis_of[var_order[i]])
    arr = np.transpose(arr, order)
    # sorted axes slot straight into the full shape, 1s elsewhere broadcast;
    # indexing by axis (not name) keeps shadowed duplicate names distinct
    out_shape = [1] * len(frees)
    for v in var_order:
        out_shape[axis_of[v]] = n
    return arr.reshape(out_shape)


def _eval_eq(f: Eq, n, params, frees, axis_of):
    left = _term_resolve(f.left, params)
    right = _term_resolve(f.right, params)
    if left[0] == "const" and right[0] == "const":
        return _full(left[1] == right[1], n, frees)
    if left[0] == "const" or right[0] == "const":
        (_, c), (_, v) = (left, right) if left[0] == "const" else (right, left)
        col = np.zeros(n, dtype=bool)
        if 0 <= c < n:
            col[c] = True
        return _axis_view(col, [v], n, frees, axis_of)
    if left[1] == right[1]:
        return _full(True, n, frees)
    eye = np.eye(n, dtype=bool)
    return _axis_view(eye, [left[1], right[1]], n, frees, axis_of)


def _eval_atom(f: Atom, rels, n, params, frees, axis_of):
    try:
        arr = rels[f.rel]
    except KeyError:
        raise FormulaError(f"unknown relation {f.rel!r}") from None
    if arr.ndim != len(f.terms):
        raise FormulaError(f"arity mismatch on {f.rel!r}")
    index = []
    var_positions: list[str] = []
    for t in f.terms:
        kind, val = _term_resolve(t, params)
        if kind == "const":
            if not 0 <= val < n:
                return _full(False, n, frees)
            index.append(val)
        else:
            index.append(slice(None))
            var_positions.append(val)
    sub = arr[tuple(index)]
    # collapse repeated variables to their diagonal
    distinct: list[str] = []
    for v in var_positions:
        if v not in distinct:
            distinct.append(v)
    if len(distinct) < len(var_positions):
        letters = {v: chr(ord("a") + i) for i, v in enumerate(distinct)}
        spec = "".join(letters[v] for v in var_positions)
        out = "".join(letters[v] for v in distinct)
        sub = np.einsum(f"{spec}->{out}", sub.astype(np.uint8)).astype(bool)
    if not distinct:
        return _full(bool(sub), n, frees)
    return _axis_view(sub, distinct, n, frees, axis_of)


def relation_to_array(tuples, arity: int, n: int) -> np.ndarray:
    arr = np.zeros((n,) * arity, dtype=bool)
    if arity == 0:
        if tuples:
            arr[()] = True
        return arr
    for t in tuples:
        arr[t] = True
    return arr


def array_to_relation(arr: np.ndarray) -> frozenset[tuple[int, ...]]:
    if arr.ndim == 0:
        return frozenset([()]) if bool(arr) else frozenset()
    return frozenset(tuple(map(int, idx)) for idx in np.argwhere(arr))
