"""Catalog of dynamic programs with quantifier-free update rules.

Programs maintained here:
  * parity            — is |U| odd?
  * size_k            — is |U| exactly k?  (linked-list technique)
  * degree_rel_k      — exact in-degree classes via per-node lists
  * parity_degree_div3 — odd number of nodes with positive degree ≡ 0 mod 3?
  * parity_exists_prop_k — odd number of covered nodes of in-degree ≤ k?

Each builder returns an immutable DynamicProgram; `write_program_files`
exports them to the repo's programs/ directory in the .dyp format.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable

from .formulas import (FALSE, Formula, TRUE, atom, conj, disj, eq, neg, neq,
                       xor_chain)
from .interpreter import DynamicProgram, ProgramState, UpdateRule, make_program
from .oracle import (Discrepancy, QueryId, audit_list_family, eval_query,
                     in_neighbours, total_degree)
from .structures import Structure, ValidationError, graph_coloured

EDGE_OPS = (("ins", "E"), ("del", "E"))
COLOUR_OPS = (("ins", "R"), ("del", "R"))


# ---------------------------------------------------------------- parity

def parity_program() -> DynamicProgram:
    """Nullary-auxiliary parity of |U|; tolerates non-effective changes."""
    flip_if_new = disj([conj([neg(atom("U", "a")), neg(atom("P"))]),
                        conj([atom("U", "a"), atom("P")])])
    flip_if_present = disj([conj([atom("U", "a"), neg(atom("P"))]),
                            conj([neg(atom("U", "a")), atom("P")])])
    rules = [UpdateRule("ins", "U", "P", ("a",), (), flip_if_new),
             UpdateRule("del", "U", "P", ("a",), (), flip_if_present)]
    return make_program("parity", {"U": 1}, {"P": 0}, rules, {}, "P",
                        requires_effective=False)


# ---------------------------------------------------------------- size_k

def size_k_program(k: int) -> DynamicProgram:
    """Exact-size test |U| = k over a maintained linked list.

    Levels run to L = k+1 so that a deletion can recover the exact size
    from the removed element's distance to both ends.
    """
    if k < 1:
        raise ValidationError("size_k needs k >= 1")
    levels = k + 1
    lname = [f"List_{i}" for i in range(1, levels + 1)]
    fname = [f"First_{i}" for i in range(1, levels + 1)]
    tname = [f"Last_{i}" for i in range(1, levels + 1)]
    iname = [f"Is_{i}" for i in range(0, k + 1)]
    aux = {**{nm: 2 for nm in lname},
           **{nm: 1 for nm in fname + tname},
           **{nm: 0 for nm in iname}, "Is_gt": 0}
    u, x, y = "u", "x", "y"
    rules = []

    def rule(op, target, frees, body):
        rules.append(UpdateRule(op, "U", target, (u,), frees, body))

    # insertion: append u at the tail
    for i in range(1, levels + 1):
        rule("ins", lname[i - 1], (x, y),
             disj([atom(lname[i - 1], x, y),
                   conj([atom(tname[i - 1], x), eq(y, u)])]))
        rule("ins", tname[i - 1], (x,),
             eq(x, u) if i == 1 else atom(tname[i - 2], x))
        rule("ins", fname[i - 1], (x,),
             disj([atom(fname[i - 1], x),
                   conj([eq(x, u), atom(iname[i - 1])])]))
    rule("ins", iname[0], (), FALSE)
    for i in range(1, k + 1):
        rule("ins", iname[i], (), atom(iname[i - 1]))
    rule("ins", "Is_gt", (), disj([atom("Is_gt"), atom(iname[k])]))

    # deletion: splice u out; sizes are read off u's two end distances
    for i in range(1, levels + 1):
        keep = conj([neq(x, u)]
                    + [neg(atom(lname[j - 1], x, u)) for j in range(1, i + 1)]
                    + [atom(lname[i - 1], x, y)])
        splice = disj([conj([atom(lname[j - 1], x, u), atom(lname[jj - 1], u, y)])
                       for j in range(1, levels + 1)
                       for jj in range(1, levels + 1) if j + jj == i + 1])
        rule("del", lname[i - 1], (x, y), disj([keep, splice]))
        rule("del", tname[i - 1], (x,), disj(
            [conj([neg(atom(tname[j - 1], u)) for j in range(1, i + 1)]
                  + [atom(tname[i - 1], x)])]
            + [conj([atom(tname[j - 1], u), atom(lname[i - j], x, u)])
               for j in range(1, i + 1)]))
        rule("del", fname[i - 1], (x,), disj(
            [conj([neg(atom(fname[j - 1], u)) for j in range(1, i + 1)]
                  + [atom(fname[i - 1], x)])]
            + [conj([atom(fname[j - 1], u), atom(lname[i - j], u, x)])
               for j in range(1, i + 1)]))
    for i in range(0, k + 1):
        rule("del", iname[i], (), disj(
            [conj([atom(fname[j - 1], u), atom(tname[jj - 1], u)])
             for j in range(1, levels + 1) for jj in range(1, levels + 1)
             if j + jj == i + 2]))
    rule("del", "Is_gt", (), conj(
        [atom("Is_gt")]
        + [disj([neg(atom(fname[j - 1], u)), neg(atom(tname[jj - 1], u))])
           for j in range(1, levels + 1) for jj in range(1, levels + 1)
           if j + jj == k + 2]))

    return make_program(f"size_{k}", {"U": 1}, aux, rules,
                        {"Is_0": {()}}, iname[k], requires_effective=True)


# -------------------------------------------------- per-node list machinery

@dataclass(frozen=True)
class ListFamily:
    """Per-node element lists with exact-count flags.

    Tracks, for every owner node z, an ordered list of elements, with
    relations  <p>List_i(z,x,y)  (x sits i positions before y),
    <p>First_i(z,x) / <p>Last_i(z,x), exact-count flags count_name(i)(z)
    for i in 1..K, and an overflow flag gt_name(z) for counts > K.
    The count-0 case is the derived predicate `zero` (all flags off),
    which keeps the initial auxiliary state empty and domain-independent.
    """

    prefix: str
    K: int
    count_names: tuple[str, ...]   # count 1..K
    gt_name: str
    owner: str = "z"

    @property
    def levels(self) -> int:
        return self.K + 1

    def list_name(self, i): return f"{self.prefix}List_{i}"
    def first_name(self, i): return f"{self.prefix}First_{i}"
    def last_name(self, i): return f"{self.prefix}Last_{i}"

    def schema(self) -> dict[str, int]:
        out = {}
        for i in range(1, self.levels + 1):
            out[self.list_name(i)] = 3
            out[self.first_name(i)] = 2
            out[self.last_name(i)] = 2
        for nm in self.count_names:
            out[nm] = 1
        out[self.gt_name] = 1
        return out

    def zero(self, node) -> Formula:
        return conj([neg(atom(nm, node)) for nm in self.count_names]
                    + [neg(atom(self.gt_name, node))])

    def count_pred(self, i: int, node) -> Formula:
        if i == 0:
            return self.zero(node)
        return atom(self.count_names[i - 1], node)

    def _targets(self):
        for i in range(1, self.levels + 1):
            yield self.list_name(i), (self.owner, "x", "y")
            yield self.first_name(i), (self.owner, "x")
            yield self.last_name(i), (self.owner, "x")
        for nm in self.count_names:
            yield nm, (self.owner,)
        yield self.gt_name, (self.owner,)

    def identity_rules(self, op, relation, params):
        for target, frees in self._targets():
            yield UpdateRule(op, relation, target, params, frees,
                             atom(target, *frees))

    def append_rules(self, op, relation, params, guard: Formula, elem):
        """Owners z with guard(params, z) append elem to their list."""
        z, x, y = self.owner, "x", "y"
        rules = []

        def rule(target, frees, body):
            rules.append(UpdateRule(op, relation, target, params, frees, body))

        for i in range(1, self.levels + 1):
            rule(self.list_name(i), (z, x, y),
                 disj([atom(self.list_name(i), z, x, y),
                       conj([guard, atom(self.last_name(i), z, x), eq(y, elem)])]))
            rule(self.last_name(i), (z, x), disj(
                [conj([neg(guard), atom(self.last_name(i), z, x)]),
                 conj([guard, eq(x, elem)]) if i == 1
                 else conj([guard, atom(self.last_name(i - 1), z, x)])]))
            rule(self.first_name(i), (z, x), disj(
                [atom(self.first_name(i), z, x),
                 conj([guard, eq(x, elem), self.count_pred(i - 1, z)])]))
        for i in range(1, self.K + 1):
            rule(self.count_names[i - 1], (z,), disj(
                [conj([neg(guard), atom(self.count_names[i - 1], z)]),
                 conj([guard, self.count_pred(i - 1, z)])]))
        rule(self.gt_name, (z,), disj(
            [atom(self.gt_name, z),
             conj([guard, self.count_pred(self.K, z)])]))
        return rules

    def remove_rules(self, op, relation, params, guard: Formula, elem):
        """Owners z with guard(params, z) remove elem (assumed present)."""
        z, x, y = self.owner, "x", "y"
        L = self.levels
        rules = []

        def rule(target, frees, body):
            rules.append(UpdateRule(op, relation, target, params, frees, body))

        for i in range(1, L + 1):
            keep = conj([neq(x, elem)]
                        + [neg(atom(self.list_name(j), z, x, elem))
                           for j in range(1, i + 1)]
                        + [atom(self.list_name(i), z, x, y)])
            splice = disj([conj([atom(self.list_name(j), z, x, elem),
                                 atom(self.list_name(jj), z, elem, y)])
                           for j in range(1, L + 1) for jj in range(1, L + 1)
                           if j + jj == i + 1])
            rule(self.list_name(i), (z, x, y), disj(
                [conj([neg(guard), atom(self.list_name(i), z, x, y)]),
                 conj([guard, disj([keep, splice])])]))
            rule(self.last_name(i), (z, x), disj(
                [conj([neg(guard), atom(self.last_name(i), z, x)]),
                 conj([guard, disj(
                     [conj([neg(atom(self.last_name(j), z, elem))
                            for j in range(1, i + 1)]
                           + [atom(self.last_name(i), z, x)])]
                     + [conj([atom(self.last_name(j), z, elem),
                              atom(self.list_name(i - j + 1), z, x, elem)])
                        for j in range(1, i + 1)])])]))
            rule(self.first_name(i), (z, x), disj(
                [conj([neg(guard), atom(self.first_name(i), z, x)]),
                 conj([guard, disj(
                     [conj([neg(atom(self.first_name(j), z, elem))
                            for j in range(1, i + 1)]
                           + [atom(self.first_name(i), z, x)])]
                     + [conj([atom(self.first_name(j), z, elem),
                              atom(self.list_name(i - j + 1), z, elem, x)])
                        for j in range(1, i + 1)])])]))
        for i in range(1, self.K + 1):
            both_ends = disj([conj([atom(self.first_name(j), z, elem),
                                    atom(self.last_name(jj), z, elem)])
                              for j in range(1, L + 1) for jj in range(1, L + 1)
                              if j + jj == i + 2])
            rule(self.count_names[i - 1], (z,), disj(
                [conj([neg(guard), atom(self.count_names[i - 1], z)]),
                 conj([guard, both_ends])]))
        rule(self.gt_name, (z,), disj(
            [conj([neg(guard), atom(self.gt_name, z)]),
             conj([guard, atom(self.gt_name, z)]
                  + [disj([neg(atom(self.first_name(j), z, elem)),
                           neg(atom(self.last_name(jj), z, elem))])
                     for j in range(1, L + 1) for jj in range(1, L + 1)
                     if j + jj == self.K + 2])]))
        return rules


# ---------------------------------------------------------------- degree_rel

def degree_k_relation_program(k: int) -> DynamicProgram:
    """Exact in-degree classes N_1..N_{k+1} from per-node in-neighbour lists."""
    if k < 1:
        raise ValidationError("degree_k_relation needs k >= 1")
    fam = ListFamily("", k + 1, tuple(f"N_{i}" for i in range(1, k + 2)), "N_gt")
    v, w = "v", "w"
    owner_is_w = eq(fam.owner, w)
    rules = []
    rules += fam.append_rules("ins", "E", (v, w), owner_is_w, v)
    rules += fam.remove_rules("del", "E", (v, w), owner_is_w, v)
    return make_program(f"degree_rel_{k}", {"E": 2}, fam.schema(), rules, {},
                        f"N_{k}", requires_effective=True)


# ---------------------------------------------------------------- deg mod 3

def parity_degree_div3_program() -> DynamicProgram:
    """Odd number of nodes with positive total degree divisible by 3.

    Degree classes M_0/M_1/M_2 cover only nodes of positive degree; the
    "degree hit zero" test on deletion needs per-node emptiness tracking,
    provided by one out-edge and one in-edge list per node.
    """
    out_fam = ListFamily("Out", 1, ("OutOne",), "OutMany")
    in_fam = ListFamily("In", 1, ("InOne",), "InMany")
    v, w, x = "v", "w", "x"
    m0, m1, m2 = (lambda t: atom("M_0", t)), (lambda t: atom("M_1", t)), \
        (lambda t: atom("M_2", t))

    def d0(t):  # total degree zero before the change
        return conj([out_fam.zero(t), in_fam.zero(t)])

    rules = []
    # neighbour lists: edge (v,w) appends w to v's out-list, v to w's in-list
    rules += out_fam.append_rules("ins", "E", (v, w), eq(out_fam.owner, v), w)
    rules += in_fam.append_rules("ins", "E", (v, w), eq(in_fam.owner, w), v)
    rules += out_fam.remove_rules("del", "E", (v, w), eq(out_fam.owner, v), w)
    rules += in_fam.remove_rules("del", "E", (v, w), eq(in_fam.owner, w), v)

    untouched = conj([neq(x, v), neq(x, w)])
    endpoint = disj([eq(x, v), eq(x, w)])
    loop, noloop = eq(v, w), neq(v, w)

    # insertion shifts each distinct endpoint's class by 1, a loop's by 2
    rules.append(UpdateRule("ins", "E", "M_0", (v, w), (x,), disj([
        conj([untouched, m0(x)]),
        conj([noloop, endpoint, m2(x)]),
        conj([loop, eq(x, v), m1(x)])])))
    rules.append(UpdateRule("ins", "E", "M_1", (v, w), (x,), disj([
        conj([untouched, m1(x)]),
        conj([noloop, endpoint, disj([m0(x), d0(x)])]),
        conj([loop, eq(x, v), m2(x)])])))
    rules.append(UpdateRule("ins", "E", "M_2", (v, w), (x,), disj([
        conj([untouched, m2(x)]),
        conj([noloop, endpoint, m1(x)]),
        conj([loop, eq(x, v), disj([m0(x), d0(x)])])])))
    rules.append(UpdateRule("ins", "E", "P", (v, w), (), disj([
        conj([loop, xor_chain([atom("P"), m1(v), m0(v)])]),
        conj([noloop, xor_chain([atom("P"), m2(v), m0(v), m2(w), m0(w)])])])))

    # deletion: degree may hit zero exactly when the endpoint's last edge
    # occurrence goes away (single out-list entry and empty in-list, etc.)
    def drops_to_zero(end: str) -> Formula:
        if end == v:
            last_out = conj([atom("OutOne", v), in_fam.zero(v)])
            return last_out
        return conj([atom("InOne", w), out_fam.zero(w)])

    loop_zero = conj([atom("OutOne", v), atom("InOne", v)])
    rules.append(UpdateRule("del", "E", "M_0", (v, w), (x,), disj([
        conj([untouched, m0(x)]),
        conj([noloop, eq(x, v), m1(x), neg(drops_to_zero(v))]),
        conj([noloop, eq(x, w), m1(x), neg(drops_to_zero(w))]),
        conj([loop, eq(x, v), m2(x), neg(loop_zero)])])))
    rules.append(UpdateRule("del", "E", "M_1", (v, w), (x,), disj([
        conj([untouched, m1(x)]),
        conj([noloop, endpoint, m2(x)]),
        conj([loop, eq(x, v), m0(x)])])))
    rules.append(UpdateRule("del", "E", "M_2", (v, w), (x,), disj([
        conj([untouched, m2(x)]),
        conj([noloop, endpoint, m0(x)]),
        conj([loop, eq(x, v), m1(x)])])))
    rules.append(UpdateRule("del", "E", "P", (v, w), (), disj([
        conj([loop, xor_chain([atom("P"),
                               conj([m2(v), neg(loop_zero)]), m0(v)])]),
        conj([noloop, xor_chain([atom("P"),
                                 conj([m1(v), neg(drops_to_zero(v))]), m0(v),
                                 conj([m1(w), neg(drops_to_zero(w))]), m0(w)])])])))

    aux = {**out_fam.schema(), **in_fam.schema(),
           "M_0": 1, "M_1": 1, "M_2": 1, "P": 0}
    return make_program("parity_degree_div3", {"E": 2}, aux, rules, {}, "P",
                        requires_effective=True)


# ------------------------------------------- covered-nodes parity, bounded k

def _p_name(l: int, m: int) -> str:
    return f"P_{l}_{m}"


def _p_atom(l: int, m: int, xs: list, ys: list) -> Formula:
    return atom(_p_name(l, m), *(list(xs) + list(ys)))


def parity_exists_deg_k_prop_program(k: int) -> DynamicProgram:
    """Odd number of covered nodes of in-degree <= k, arity-max(3,k) aux.

    P_{l,m}(a..., b...) holds when the a's are distinct and coloured, the
    b's distinct and uncoloured, and an odd number of active nodes have
    edges from all of them and no coloured in-neighbour beyond the a's.
    """
    if k < 3:
        raise ValidationError(
            "parity_exists_deg_k_prop needs k >= 3 (arity-3 list machinery)")
    nfam = ListFamily("N", k + 1, tuple(f"N_{i}" for i in range(1, k + 2)),
                      "N_gt")
    cfam = ListFamily("C", k + 1, tuple(f"Nc_{i}" for i in range(1, k + 2)),
                      "Nc_gt")
    v, w = "v", "w"
    rules: list[UpdateRule] = []

    # per-node in-neighbour lists (edge changes only)
    rules += nfam.append_rules("ins", "E", (v, w), eq(nfam.owner, w), v)
    rules += nfam.remove_rules("del", "E", (v, w), eq(nfam.owner, w), v)
    rules += nfam.identity_rules("ins", "R", (v,))
    rules += nfam.identity_rules("del", "R", (v,))

    # per-node coloured in-neighbour lists (edge changes touch one owner,
    # colour changes touch every out-neighbour of the recoloured node)
    rules += cfam.append_rules("ins", "E", (v, w),
                               conj([eq(cfam.owner, w), atom("R", v)]), v)
    rules += cfam.remove_rules("del", "E", (v, w),
                               conj([eq(cfam.owner, w), atom("R", v)]), v)
    rules += cfam.append_rules("ins", "R", (v,), atom("E", v, cfam.owner), v)
    rules += cfam.remove_rules("del", "R", (v,), atom("E", v, cfam.owner), v)

    def n_count(i: int, node) -> Formula:
        return nfam.count_pred(i, node)

    def nc_count(i: int, node) -> Formula:
        return cfam.count_pred(i, node)

    def indeg_at_most(bound: int, node) -> Formula:
        # pre-change in-degree <= bound (bound <= k)
        return disj([n_count(i, node) for i in range(0, bound + 1)])

    active = lambda node: atom("Active", node)

    # Active = in-degree in 1..k, kept in lockstep with the count flags
    z = "z"
    rules.append(UpdateRule("ins", "E", "Active", (v, w), (z,), disj([
        conj([neq(z, w), active(z)]),
        conj([eq(z, w), disj([n_count(i, z) for i in range(0, k)])])])))
    rules.append(UpdateRule("del", "E", "Active", (v, w), (z,), disj([
        conj([neq(z, w), active(z)]),
        conj([eq(z, w), disj([n_count(i, z) for i in range(2, k + 2)])])])))
    rules.append(UpdateRule("ins", "R", "Active", (v,), (z,), active(z)))
    rules.append(UpdateRule("del", "R", "Active", (v,), (z,), active(z)))

    pairs = [(l, m) for l in range(0, k + 1) for m in range(0, k + 1)
             if 1 <= l + m <= k]

    def theta(xs, ys) -> Formula:
        parts = [atom("R", xi) for xi in xs]
        parts += [neg(atom("R", yj)) for yj in ys]
        parts += [neq(a, b) for a, b in itertools.combinations(xs, 2)]
        parts += [neq(a, b) for a, b in itertools.combinations(ys, 2)]
        return conj(parts)

    for l, m in pairs:
        xs = [f"x{i}" for i in range(1, l + 1)]
        ys = [f"y{i}" for i in range(1, m + 1)]
        frees = tuple(xs + ys)
        fresh = conj([neq(v, t) for t in xs + ys])

        # colouring v: tuples gaining v in the coloured block are read from
        # the pre-state with v parked in the uncoloured block; untouched
        # tuples flip by the parity carried with v appended (unless l+m=k)
        move_in = disj([conj([eq(v, xi),
                              _p_atom(l - 1, m + 1,
                                      [t for t in xs if t != xi], ys + [v])])
                        for xi in xs])
        if l + m < k:
            stay = conj([fresh, xor_chain([_p_atom(l, m, xs, ys),
                                           _p_atom(l, m + 1, xs, ys + [v])])])
        else:
            stay = conj([fresh, _p_atom(l, m, xs, ys)])
        rules.append(UpdateRule("ins", "R", _p_name(l, m), (v,), frees,
                                disj([move_in, stay])))

        # uncolouring v: mirror image
        move_out = disj([conj([eq(v, yj),
                               _p_atom(l + 1, m - 1, xs + [v],
                                       [t for t in ys if t != yj])])
                         for yj in ys])
        if l + m < k:
            stay = conj([fresh, xor_chain([_p_atom(l, m, xs, ys),
                                           _p_atom(l + 1, m, xs + [v], ys)])])
        else:
            stay = conj([fresh, _p_atom(l, m, xs, ys)])
        rules.append(UpdateRule("del", "R", _p_name(l, m), (v,), frees,
                                disj([move_out, stay])))

        edges_from = lambda nodes: [atom("E", t, w) for t in nodes]

        # edge insertion (v,w): the only node whose membership in any of the
        # tracked sets can change is w
        psi1 = conj(edges_from(xs) + edges_from(ys)
                    + [nc_count(l, w), active(w),
                       disj([n_count(k, w), atom("R", v)])])
        psi2 = disj([conj([eq(v, xi)]
                          + edges_from([t for t in xs if t != xi])
                          + edges_from(ys)
                          + [nc_count(l - 1, w), indeg_at_most(k - 1, w)])
                     for xi in xs])
        psi3 = disj([conj([eq(v, yj)]
                          + edges_from(xs)
                          + edges_from([t for t in ys if t != yj])
                          + [nc_count(l, w), indeg_at_most(k - 1, w)])
                     for yj in ys])
        rules.append(UpdateRule(
            "ins", "E", _p_name(l, m), (v, w), frees,
            conj([theta(xs, ys),
                  xor_chain([_p_atom(l, m, xs, ys), disj([psi1, psi2, psi3])])])))

        # edge deletion (v,w)
        psi1d = conj(edges_from(xs) + edges_from(ys)
                     + [nc_count(l, w), active(w),
                        disj([eq(v, t) for t in xs + ys])])
        psi2d = conj([conj([neq(v, t) for t in xs + ys])]
                     + edges_from(xs) + edges_from(ys)
                     + [disj([conj([n_count(k + 1, w), neg(atom("R", v)),
                                    nc_count(l, w)]),
                              conj([n_count(k + 1, w), atom("R", v),
                                    nc_count(l + 1, w)]),
                              conj([active(w), atom("R", v),
                                    nc_count(l + 1, w)])])])
        rules.append(UpdateRule(
            "del", "E", _p_name(l, m), (v, w), frees,
            conj([theta(xs, ys),
                  xor_chain([_p_atom(l, m, xs, ys), disj([psi1d, psi2d])])])))

    # the answer flag
    rules.append(UpdateRule("ins", "R", "Ans", (v,), (),
                            xor_chain([atom("Ans"), _p_atom(0, 1, [], [v])])))
    rules.append(UpdateRule("del", "R", "Ans", (v,), (),
                            xor_chain([atom("Ans"), _p_atom(1, 0, [v], [])])))
    rules.append(UpdateRule("ins", "E", "Ans", (v, w), (), xor_chain([
        atom("Ans"),
        disj([conj([n_count(k, w),
                    disj([nc_count(i, w) for i in range(1, k + 1)])]),
              conj([atom("R", v), nc_count(0, w), indeg_at_most(k - 1, w)])])])))
    rules.append(UpdateRule("del", "E", "Ans", (v, w), (), xor_chain([
        atom("Ans"),
        disj([conj([n_count(k + 1, w),
                    disj([nc_count(i, w) for i in range(1, k + 2)]),
                    disj([neg(atom("R", v)), neg(nc_count(1, w))])]),
              conj([atom("R", v), nc_count(1, w), active(w)])])])))

    aux = {**nfam.schema(), **cfam.schema(), "Active": 1, "Ans": 0}
    for l, m in pairs:
        aux[_p_name(l, m)] = l + m
    return make_program(f"parity_exists_prop_{k}", {"E": 2, "R": 1}, aux,
                        rules, {}, "Ans", requires_effective=True)


# ---------------------------------------------------------------- catalog

@dataclass(frozen=True)
class ProgramCatalogEntry:
    name: str
    build: Callable[[], DynamicProgram]
    query: QueryId | None
    class_claim: str
    arity_claim: int


def catalog() -> list[ProgramCatalogEntry]:
    entries = [
        ProgramCatalogEntry("parity", parity_program, QueryId("parity"),
                            "DynProp", 0)]
    for k in range(1, 5):
        entries.append(ProgramCatalogEntry(
            f"size_{k}", lambda k=k: size_k_program(k),
            QueryId("size_k", k), "DynProp", 2))
    for k in range(1, 4):
        entries.append(ProgramCatalogEntry(
            f"degree_rel_{k}", lambda k=k: degree_k_relation_program(k),
            None, "DynProp", 3))
    entries.append(ProgramCatalogEntry(
        "parity_degree_div3", parity_degree_div3_program,
        QueryId("parity_degree_div3"), "DynProp", 3))
    for k in (3, 4):
        entries.append(ProgramCatalogEntry(
            f"parity_exists_prop_{k}",
            lambda k=k: parity_exists_deg_k_prop_program(k),
            QueryId("parity_exists_deg", k), "DynProp", max(3, k)))
    return entries


def catalog_entry(name: str) -> ProgramCatalogEntry:
    for e in catalog():
        if e.name == name:
            return e
    raise ValidationError(f"unknown catalog program {name!r}")


def write_program_files(directory) -> list[str]:
    from pathlib import Path

    from .interpreter import format_program
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for entry in catalog():
        path = directory / f"{entry.name}.dyp"
        path.write_text(format_program(entry.build()))
        written.append(str(path))
    return written


# ---------------------------------------------------------------- audits

def _audit_list_program(aux: Structure, fam: ListFamily, members_of,
                        out: list[Discrepancy]) -> None:
    names = {"list": [fam.list_name(i) for i in range(1, fam.levels + 1)],
             "first": [fam.first_name(i) for i in range(1, fam.levels + 1)],
             "last": [fam.last_name(i) for i in range(1, fam.levels + 1)]}
    for owner in range(aux.n):
        members = members_of(owner)
        audit_list_family(aux, members, names, out, owner=owner)
        size = len(members)
        for i in range(1, fam.K + 1):
            want = size == i
            got = aux.has(fam.count_names[i - 1], (owner,))
            if want != got:
                out.append(Discrepancy(fam.count_names[i - 1],
                                       "missing" if want else "spurious",
                                       (owner,)))
        want = size > fam.K
        if want != aux.has(fam.gt_name, (owner,)):
            out.append(Discrepancy(fam.gt_name,
                                   "missing" if want else "spurious", (owner,)))


def audit_program_state(state: ProgramState) -> list[Discrepancy]:
    """Definitional recomputation of every auxiliary relation."""
    name = state.program.name
    inp = state.input
    aux = state.aux_structure()
    out: list[Discrepancy] = []

    def check_flag(rel: str, want: bool):
        got = aux.has(rel, ())
        if got != want:
            out.append(Discrepancy(rel, "missing" if want else "spurious", ()))

    if name == "parity":
        check_flag("P", eval_query(QueryId("parity"), inp))
        return out

    if name.startswith("size_"):
        k = int(name.split("_")[1])
        members = {u for (u,) in inp.tuples("U")}
        names = {"list": [f"List_{i}" for i in range(1, k + 2)],
                 "first": [f"First_{i}" for i in range(1, k + 2)],
                 "last": [f"Last_{i}" for i in range(1, k + 2)]}
        audit_list_family(aux, members, names, out)
        for i in range(0, k + 1):
            check_flag(f"Is_{i}", len(members) == i)
        check_flag("Is_gt", len(members) > k)
        return out

    if name.startswith("degree_rel_"):
        k = int(name.rsplit("_", 1)[1])
        fam = ListFamily("", k + 1, tuple(f"N_{i}" for i in range(1, k + 2)),
                         "N_gt")
        _audit_list_program(aux, fam, lambda w: in_neighbours(inp, w), out)
        return out

    if name == "parity_degree_div3":
        out_fam = ListFamily("Out", 1, ("OutOne",), "OutMany")
        in_fam = ListFamily("In", 1, ("InOne",), "InMany")
        edges = inp.tuples("E")
        _audit_list_program(aux, out_fam,
                            lambda v: {b for (a, b) in edges if a == v}, out)
        _audit_list_program(aux, in_fam,
                            lambda w: {a for (a, b) in edges if b == w}, out)
        for x in range(inp.n):
            d = total_degree(inp, x)
            for i in range(3):
                want = d > 0 and d % 3 == i
                if want != aux.has(f"M_{i}", (x,)):
                    out.append(Discrepancy(f"M_{i}",
                                           "missing" if want else "spurious",
                                           (x,)))
        check_flag("P", eval_query(QueryId("parity_degree_div3"), inp))
        return out

    if name.startswith("parity_exists_prop_"):
        k = int(name.rsplit("_", 1)[1])
        nfam = ListFamily("N", k + 1, tuple(f"N_{i}" for i in range(1, k + 2)),
                          "N_gt")
        cfam = ListFamily("C", k + 1,
                          tuple(f"Nc_{i}" for i in range(1, k + 2)), "Nc_gt")
        coloured = graph_coloured(inp)
        _audit_list_program(aux, nfam, lambda w: in_neighbours(inp, w), out)
        _audit_list_program(aux, cfam,
                            lambda w: in_neighbours(inp, w) & coloured, out)
        for x in range(inp.n):
            want = 1 <= len(in_neighbours(inp, x)) <= k
            if want != aux.has("Active", (x,)):
                out.append(Discrepancy("Active",
                                       "missing" if want else "spurious", (x,)))
        from .oracle import n_exists_forall
        uncoloured = set(range(inp.n)) - coloured
        for l in range(0, k + 1):
            for m in range(0, k + 1):
                if not 1 <= l + m <= k:
                    continue
                rel = _p_name(l, m)
                want = set()
                for a in itertools.permutations(sorted(coloured), l):
                    for b in itertools.permutations(sorted(uncoloured), m):
                        if len(n_exists_forall(inp, a, b, k)) % 2 == 1:
                            want.add(a + b)
                got = set(aux.tuples(rel))
                for t in got - want:
                    out.append(Discrepancy(rel, "spurious", t))
                for t in want - got:
                    out.append(Discrepancy(rel, "missing", t))
        check_flag("Ans", eval_query(QueryId("parity_exists_deg", k), inp))
        return out

    raise ValidationError(f"no audit available for program {name!r}")
