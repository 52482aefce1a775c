"""OBDD compilation by cofactoring truth tables, plus subfunction counting.

The truth table of ``f`` is laid out with the first variable of the order as
the most significant index bit.  Fixing that variable then just splits the
table into its lower and upper halves, so the distinct tables met at depth i
are exactly the distinct subfunctions F_S over assignments S to the first i
variables.  Those sets are the layers of the uniform OBDD; reducing skips
nodes whose two halves coincide.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import product
from typing import Dict, List, Mapping, Optional, Tuple

from .cnf import Cnf, restrict, table_bits, var_mask
from .config import DEFAULT_CAPS, check_cap
from .decomposition import VariableOrder
from .graphs import Graph, edge_var, vertex_var
from .matching import witness_prefix

FALSE, TRUE = 0, 1


class OrderMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Obdd:
    order: Tuple[int, ...]
    # node id i >= 2 is nodes[i - 2] = (level, low, high); 0 and 1 are terminals
    nodes: Tuple[Tuple[int, int, int], ...]
    root: int
    uniform: bool = False
    names: Optional[Tuple[str, ...]] = None

    @property
    def num_vars(self):
        return len(self.order)

    def level(self, node):
        return self.num_vars if node < 2 else self.nodes[node - 2][0]

    def var(self, node):
        return self.order[self.nodes[node - 2][0]]

    @property
    def internal_size(self):
        return len(self.nodes)

    @property
    def terminal_count(self):
        if self.root < 2:
            return 1
        kids = {c for _, lo, hi in self.nodes for c in (lo, hi) if c < 2}
        return len(kids)

    @property
    def size(self):
        return self.internal_size + self.terminal_count

    def layer_sizes(self) -> List[int]:
        sizes = [0] * self.num_vars
        for lvl, _, _ in self.nodes:
            sizes[lvl] += 1
        return sizes

    def evaluate(self, a) -> bool:
        if not isinstance(a, Mapping):
            a = {i: bool(v) for i, v in enumerate(a, 1)}
        node = self.root
        while node >= 2:
            lvl, lo, hi = self.nodes[node - 2]
            node = hi if a[self.order[lvl]] else lo
        return node == TRUE

    def name(self, var):
        return self.names[var - 1] if self.names else f"x{var}"

    def to_json(self):
        return {
            "order": list(self.order),
            "uniform": self.uniform,
            "internal": self.internal_size,
            "total": self.size,
            "layers": self.layer_sizes(),
            "root": self.root,
            "nodes": [
                {"id": i + 2, "var": self.order[lvl], "low": lo, "high": hi}
                for i, (lvl, lo, hi) in enumerate(self.nodes)
            ],
        }


@dataclass(frozen=True)
class ComputationPath:
    nodes: Tuple[int, ...]
    assignment: Dict[int, bool]


def computation_path(d: Obdd, a: Mapping[int, bool], steps: Optional[int] = None) -> ComputationPath:
    """Follow ``a`` from the root; A(P) binds the variables of all nodes but the last."""
    path = [d.root]
    bound = {}
    while path[-1] >= 2 and (steps is None or len(path) <= steps):
        lvl, lo, hi = d.nodes[path[-1] - 2]
        var = d.order[lvl]
        if var not in a:
            break
        bound[var] = bool(a[var])
        path.append(hi if a[var] else lo)
    return ComputationPath(tuple(path), bound)


def _check_order(f: Cnf, order) -> Tuple[int, ...]:
    order = tuple(order)
    if sorted(order) != list(range(1, f.num_vars + 1)):
        raise ValueError("order is not a permutation of the formula's variables")
    return order


def _ordered_table(f: Cnf, order: Tuple[int, ...]) -> int:
    return table_bits(f, order[::-1])


def _split(t: int, width: int):
    """Cofactors on the top variable of a table over ``width`` variables."""
    half = 1 << (width - 1)
    return t & ((1 << half) - 1), t >> half


def subfunction_layers(f: Cnf, order, upto: Optional[int] = None, cap: Optional[int] = None):
    """Distinct subfunction tables for every prefix length 0..upto."""
    order = _check_order(f, order)
    n = len(order)
    check_cap(n, cap or DEFAULT_CAPS.oracle, "compiled variables")
    upto = n if upto is None else upto
    layers = [[_ordered_table(f, order)]]
    for i in range(upto):
        nxt = {}
        for t in layers[-1]:
            lo, hi = _split(t, n - i)
            nxt.setdefault(lo, None)
            nxt.setdefault(hi, None)
        layers.append(list(nxt))
    return layers


def compile_cnf(f: Cnf, order, uniform: bool = False, cap: Optional[int] = None) -> Obdd:
    order = tuple(order.order if isinstance(order, VariableOrder) else order)
    layers = subfunction_layers(f, order, cap=cap)
    n = len(order)
    ids: Dict[int, int] = {0: FALSE, 1: TRUE}
    raw: List[Tuple[int, int, int]] = []
    for i in range(n - 1, -1, -1):
        here: Dict[int, int] = {}
        for t in layers[i]:
            lo, hi = _split(t, n - i)
            a, b = ids[lo], ids[hi]
            if a == b and not uniform:
                here[t] = a
            else:
                raw.append((i, a, b))
                here[t] = len(raw) + 1
        ids = here
    root = ids[layers[0][0]]
    # renumber so ids grow from the root downwards
    perm = sorted(range(len(raw)), key=lambda j: (raw[j][0], j))
    new_id = {FALSE: FALSE, TRUE: TRUE}
    for pos, j in enumerate(perm):
        new_id[j + 2] = pos + 2
    nodes = tuple((raw[j][0], new_id[raw[j][1]], new_id[raw[j][2]]) for j in perm)
    return Obdd(order, nodes, new_id[root], uniform, f.names)


def clausal_entailment(d: Obdd, partial: Mapping[int, bool]) -> bool:
    """Can ``partial`` be extended to a satisfying assignment?"""
    for var in partial:
        if var not in d.order:
            raise KeyError(f"unknown variable {var}")
    seen = set()
    stack = [d.root]
    while stack:
        node = stack.pop()
        if node == TRUE:
            return True
        if node == FALSE or node in seen:
            continue
        seen.add(node)
        lvl, lo, hi = d.nodes[node - 2]
        value = partial.get(d.order[lvl])
        if value is None:
            stack += [lo, hi]
        else:
            stack.append(hi if value else lo)
    return False


def count_subfunctions(f: Cnf, order, prefix_len: int, cap: Optional[int] = None) -> int:
    """Number of distinct F_S over all assignments S to the first prefix_len variables."""
    cap = cap or DEFAULT_CAPS.oracle
    order = _check_order(f, order)
    if not 0 <= prefix_len <= len(order):
        raise ValueError("prefix length out of range")
    if len(order) <= cap:
        return len(subfunction_layers(f, order, prefix_len, cap)[prefix_len])
    residual = order[prefix_len:]
    check_cap(len(residual), cap, "residual variables")
    check_cap(prefix_len, cap, "prefix variables")
    seen = set()
    for bits in product((False, True), repeat=prefix_len):
        g = restrict(f, dict(zip(order, bits)))
        seen.add(table_bits(g, residual))
    return len(seen)


@dataclass(frozen=True)
class MinSize:
    internal: int
    size: int
    best_order: Tuple[int, ...]


def _cofactors(t: int, pos: int, width: int):
    m = var_mask(pos, width)
    s = 1 << pos
    lo = t & ~m
    hi = t & m
    return lo | (lo << s), hi | (hi >> s)


def min_obdd_size_exact(f: Cnf, cap: Optional[int] = None) -> MinSize:
    """Smallest reduced OBDD over all orders.

    Nodes labelled x after prefix set S are the distinct subfunctions over S
    that depend on x, a number fixed by S and x alone; so the best order is
    found by DP over sets.  Subfunctions are kept as full-width tables that
    ignore already-fixed variables.
    """
    n = f.num_vars
    check_cap(n, cap or DEFAULT_CAPS.exact_order, "exact ordering variables")
    width = n
    t0 = table_bits(f, range(1, n + 1))
    funcs = {0: {t0}}
    best = {0: 0}
    choice = {}
    for _ in range(n):
        nxt_funcs: Dict[int, set] = {}
        for mask, tables in funcs.items():
            base = best[mask]
            for x in range(n):
                bit = 1 << x
                if mask & bit:
                    continue
                dependent = 0
                cofs = set()
                for t in tables:
                    lo, hi = _cofactors(t, x, width)
                    if lo != hi:
                        dependent += 1
                    cofs.add(lo)
                    cofs.add(hi)
                new = mask | bit
                cost = base + dependent
                if new not in best or cost < best[new] or (cost == best[new] and x < choice[new]):
                    best[new] = cost
                    choice[new] = x
                if new not in nxt_funcs:
                    nxt_funcs[new] = cofs
        funcs = nxt_funcs
    full = (1 << n) - 1
    order = []
    mask = full
    while mask:
        x = choice[mask]
        order.append(x + 1)
        mask ^= 1 << x
    order.reverse()
    constant = t0 in (0, (1 << (1 << n)) - 1)
    internal = best[full]
    return MinSize(internal, internal + (1 if constant else 2), tuple(order))


@dataclass(frozen=True)
class FoolingSet:
    prefix: Tuple[int, ...]
    assignments: Tuple[Dict[int, bool], ...]
    matching: Tuple[Tuple[int, int], ...]

    @property
    def t(self):
        return len(self.matching)

    def to_json(self):
        return {
            "prefix": list(self.prefix),
            "t": self.t,
            "matching": [list(e) for e in self.matching],
            "assignments": len(self.assignments),
        }


def fooling_set(g: Graph, full_order) -> FoolingSet:
    """2**t prefix assignments that must reach pairwise distinct OBDD nodes.

    The vertex variables of ``full_order`` induce a vertex order; its shortest
    prefix of maximum cut matching M = {(u_i, v_i)} fixes the prefix of
    ``full_order`` ending at that prefix's last vertex.  Each assignment sets
    the X_{u_i} freely, the X_{u_i,v_i} in the prefix to false and every other
    prefix variable to true.
    """
    full_order = tuple(full_order)
    if sorted(full_order) != list(range(1, g.n + len(g.edges) + 1)):
        raise ValueError("order is not a permutation of the variables of CNF(G)")
    vertex_order = [x - 1 for x in full_order if x <= g.n]
    length, cut = witness_prefix(g, vertex_order)
    if length == 0:
        return FoolingSet((), ({},), ())
    end = full_order.index(vertex_var(g, vertex_order[length - 1]))
    prefix = full_order[: end + 1]
    free = [vertex_var(g, u) for u, _ in cut.matching]
    blocked = {edge_var(g, u, v) for u, v in cut.matching}
    assignments = []
    for bits in product((False, True), repeat=len(free)):
        a = {x: x not in blocked for x in prefix}
        a.update(zip(free, bits))
        assignments.append(a)
    return FoolingSet(prefix, tuple(assignments), cut.matching)


def verify_fooling_set(fs: FoolingSet, f: Cnf, cap: Optional[int] = None) -> bool:
    fixed = set(fs.prefix)
    residual = [x for x in range(1, f.num_vars + 1) if x not in fixed]
    check_cap(len(residual), cap or DEFAULT_CAPS.oracle, "residual variables")
    tables = {table_bits(restrict(f, a), residual) for a in fs.assignments}
    return len(tables) == len(fs.assignments)


def equivalent(d1: Obdd, d2: Obdd) -> bool:
    if d1.order != d2.order:
        raise OrderMismatch("diagrams use different variable orders")
    pairs: Dict[int, int] = {}
    stack = [(d1.root, d2.root)]
    while stack:
        a, b = stack.pop()
        if a < 2 or b < 2:
            if a != b:
                return False
            continue
        if a in pairs:
            if pairs[a] != b:
                return False
            continue
        pairs[a] = b
        la, lo_a, hi_a = d1.nodes[a - 2]
        lb, lo_b, hi_b = d2.nodes[b - 2]
        if la != lb:
            return False
        stack += [(lo_a, lo_b), (hi_a, hi_b)]
    return len(set(pairs.values())) == len(pairs)


def obdd_to_dot(d: Obdd) -> str:
    out = ["digraph OBDD {"]
    by_level: Dict[int, List[int]] = {}
    for i, (lvl, _, _) in enumerate(d.nodes):
        by_level.setdefault(lvl, []).append(i + 2)
    for lvl in sorted(by_level):
        out.append("  { rank = same;")
        for node in by_level[lvl]:
            out.append(f'    n{node} [label="{d.name(d.order[lvl])}", shape=circle];')
        out.append("  }")
    out.append('  n0 [label="false", shape=box];')
    out.append('  n1 [label="true", shape=box];')
    for i, (_, lo, hi) in enumerate(d.nodes):
        out.append(f"  n{i + 2} -> n{lo} [style=dashed];")
        out.append(f"  n{i + 2} -> n{hi} [style=solid];")
    out.append("}")
    return "\n".join(out) + "\n"


def obdd_json(d: Obdd) -> str:
    return json.dumps(d.to_json(), sort_keys=True)
