"""Tree and path decompositions.

Bags hold vertex ids of the decomposed graph.  For primal and incidence
graphs of a CNF, variable ``x`` is vertex ``x - 1``; in an incidence graph
clause ``j`` (0-based) is vertex ``num_vars + j``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Tuple

from .cnf import Cnf, incidence_graph
from .graphs import Graph, clique_tree, edge_var, vertex_var, cnf_of_graph

Bag = FrozenSet[int]


class DecompositionError(ValueError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class NotATree(DecompositionError):
    pass


class UncoveredVertex(DecompositionError):
    pass


class UncoveredEdge(DecompositionError):
    pass


class DisconnectedOccurrence(DecompositionError):
    pass


@dataclass(frozen=True)
class TreeDecomposition:
    tree: Graph
    bags: Tuple[Bag, ...]

    @classmethod
    def make(cls, tree_edges, bags):
        bags = tuple(frozenset(b) for b in bags)
        return cls(Graph.from_edges(len(bags), tree_edges), bags)

    @property
    def width(self):
        return max((len(b) for b in self.bags), default=0) - 1

    def to_json(self):
        return {
            "kind": "tree",
            "nodes": list(range(self.tree.n)),
            "tree_edges": [list(e) for e in self.tree.edges],
            "bags": [sorted(b) for b in self.bags],
            "width": self.width,
        }


@dataclass(frozen=True)
class PathDecomposition:
    bags: Tuple[Bag, ...]

    @classmethod
    def make(cls, bags):
        return cls(tuple(frozenset(b) for b in bags))

    @property
    def width(self):
        return max((len(b) for b in self.bags), default=0) - 1

    def as_tree(self) -> TreeDecomposition:
        edges = [(i, i + 1) for i in range(len(self.bags) - 1)]
        return TreeDecomposition(Graph.from_edges(len(self.bags), edges), self.bags)

    def to_json(self):
        return {
            "kind": "path",
            "nodes": list(range(len(self.bags))),
            "bags": [sorted(b) for b in self.bags],
            "width": self.width,
        }


@dataclass(frozen=True)
class VariableOrder:
    """A permutation; of CNF variables, or of graph vertices for matching width."""

    order: Tuple[int, ...]
    provenance: str = "explicit"

    def __post_init__(self):
        if len(set(self.order)) != len(self.order):
            raise ValueError("order repeats an element")

    def __len__(self):
        return len(self.order)

    def __iter__(self):
        return iter(self.order)

    def __getitem__(self, i):
        return self.order[i]

    def check_permutation_of(self, items):
        if sorted(self.order) != sorted(items):
            raise ValueError("order is not a permutation of the expected elements")


def decomposition_from_json(data) -> "TreeDecomposition | PathDecomposition":
    if isinstance(data, str):
        data = json.loads(data)
    if data["kind"] == "path":
        return PathDecomposition.make(data["bags"])
    return TreeDecomposition.make(data["tree_edges"], data["bags"])


def _is_tree(tree: Graph):
    if tree.n == 0 or len(tree.edges) != tree.n - 1:
        return False
    seen = {0}
    stack = [0]
    while stack:
        for w in tree.adjacency[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == tree.n


def validate(g: Graph, td) -> int:
    """Width of ``td`` if it is a decomposition of ``g``, else a specific error."""
    if isinstance(td, PathDecomposition):
        td = td.as_tree()
    if not _is_tree(td.tree):
        raise NotATree("decomposition tree is not a tree")
    occurrences: Dict[int, List[int]] = {}
    for node, bag in enumerate(td.bags):
        for v in bag:
            if not 0 <= v < g.n:
                raise ValueError(f"bag {node} holds unknown vertex {v}")
            occurrences.setdefault(v, []).append(node)
    for v in range(g.n):
        if v not in occurrences:
            raise UncoveredVertex(f"vertex {v} is in no bag", v)
    for u, v in g.edges:
        if not any(u in td.bags[t] for t in occurrences[v]):
            raise UncoveredEdge(f"no bag contains edge {(u, v)}", (u, v))
    for v, nodes in occurrences.items():
        allowed = set(nodes)
        seen = {nodes[0]}
        stack = [nodes[0]]
        while stack:
            for w in td.tree.adjacency[stack.pop()]:
                if w in allowed and w not in seen:
                    seen.add(w)
                    stack.append(w)
        if len(seen) != len(allowed):
            raise DisconnectedOccurrence(
                f"bags holding vertex {v} are not connected", (v, sorted(nodes))
            )
    return td.width


def simplify(td: TreeDecomposition) -> TreeDecomposition:
    """Merge away every bag that is a subset of a neighbouring bag."""
    bags = {i: b for i, b in enumerate(td.bags)}
    adj = {i: set(td.tree.adjacency[i]) for i in range(td.tree.n)}
    changed = True
    while changed and len(bags) > 1:
        changed = False
        for i in sorted(bags):
            target = next((j for j in sorted(adj[i]) if bags[i] <= bags[j]), None)
            if target is None:
                continue
            for w in adj[i]:
                adj[w].discard(i)
                if w != target:
                    adj[w].add(target)
                    adj[target].add(w)
            del bags[i], adj[i]
            changed = True
    ids = {old: new for new, old in enumerate(sorted(bags))}
    edges = {(ids[a], ids[b]) for a in adj for b in adj[a] if a < b}
    return TreeDecomposition.make(edges, [bags[i] for i in sorted(bags)])


def min_fill(g: Graph) -> TreeDecomposition:
    """Min-fill elimination; ties go to the lowest vertex index."""
    if g.n == 0:
        return TreeDecomposition.make([], [frozenset()])
    adj = [set(a) for a in g.adjacency]
    alive = set(range(g.n))
    elim_order = []
    bags = {}
    while alive:
        best, best_fill = None, None
        for v in sorted(alive):
            nbrs = sorted(adj[v])
            fill = sum(
                1
                for i, a in enumerate(nbrs)
                for b in nbrs[i + 1:]
                if b not in adj[a]
            )
            if best_fill is None or fill < best_fill:
                best, best_fill = v, fill
                if fill == 0:
                    break
        v = best
        nbrs = adj[v]
        for a in nbrs:
            adj[a] |= nbrs - {a}
            adj[a].discard(v)
        bags[v] = frozenset(nbrs | {v})
        elim_order.append(v)
        alive.discard(v)
        adj[v] = set()
    pos = {v: i for i, v in enumerate(elim_order)}
    edges = []
    for i, v in enumerate(elim_order):
        later = bags[v] - {v}
        if later:
            parent = min(later, key=pos.__getitem__)
            edges.append((i, pos[parent]))
        elif i + 1 < len(elim_order):
            # component finished; hook it onto the next bag to keep one tree
            edges.append((i, i + 1))
    td = TreeDecomposition.make(edges, [bags[v] for v in elim_order])
    return simplify(td)


def explicit_cliquetree_decomposition(r: int, k: int) -> TreeDecomposition:
    """Decomposition of the primal graph of F_{r,k} of width at most 2k-1.

    One node per tree node holding its own clique and its parent's clique,
    plus one leaf per edge of CT_{r,k} holding the edge variable and its ends.
    """
    ct, meta = clique_tree(r, k)
    node_bags = []
    for node, clique in enumerate(meta.clique_of_node):
        members = set(clique)
        if meta.parent[node] >= 0:
            members |= set(meta.clique_of_node[meta.parent[node]])
        node_bags.append(frozenset(vertex_var(ct, x) - 1 for x in members))
    tree_edges = [(meta.parent[i], i) for i in range(len(node_bags)) if meta.parent[i] >= 0]
    bags = list(node_bags)
    for a, b in ct.edges:
        na, nb = meta.node_of_vertex[a], meta.node_of_vertex[b]
        home = na if na == nb else (na if meta.parent[na] == nb else nb)
        leaf = len(bags)
        bags.append(frozenset({edge_var(ct, a, b) - 1, vertex_var(ct, a) - 1, vertex_var(ct, b) - 1}))
        tree_edges.append((home, leaf))
    return TreeDecomposition.make(tree_edges, bags)


def incidence_decomposition_from_primal(td: TreeDecomposition, f: Cnf) -> TreeDecomposition:
    """Attach one leaf per clause to a bag holding all of its variables."""
    bags = list(td.bags)
    edges = list(td.tree.edges)
    n = f.num_vars
    for j, clause in enumerate(f.clauses):
        vs = frozenset(abs(lit) - 1 for lit in clause)
        home = next((i for i, b in enumerate(td.bags) if vs <= b), None)
        if home is None:
            raise DecompositionError(f"no bag holds all variables of clause {j + 1}", j)
        edges.append((home, len(bags)))
        bags.append(vs | {n + j})
    return TreeDecomposition.make(edges, bags)


def _components(adj, nodes):
    left = set(nodes)
    comps = []
    for start in sorted(nodes):
        if start not in left:
            continue
        comp = {start}
        left.discard(start)
        stack = [start]
        while stack:
            for w in adj[stack.pop()]:
                if w in left:
                    left.discard(w)
                    comp.add(w)
                    stack.append(w)
        comps.append(comp)
    return comps


def _path_walk(adj, nodes):
    """Node sequence if ``nodes`` induce a path, else None."""
    deg = {u: len(adj[u] & nodes) for u in nodes}
    if any(d > 2 for d in deg.values()):
        return None
    ends = sorted(u for u, d in deg.items() if d <= 1)
    walk = [ends[0]]
    prev = None
    while len(walk) < len(nodes):
        nxt = [w for w in adj[walk[-1]] & nodes if w != prev]
        prev = walk[-1]
        walk.append(nxt[0])
    return walk


def _centroid(adj, nodes):
    best, best_size = None, None
    for c in sorted(nodes):
        rest = nodes - {c}
        size = max((len(comp) for comp in _components(adj, rest)), default=0)
        if best_size is None or size < best_size:
            best, best_size = c, size
    return best


def tree_to_path(td: TreeDecomposition, g: Graph) -> PathDecomposition:
    """Centroid splitting: width stays within (w+1)(floor(log2 t)+1) - 1.

    A part that already forms a path is laid out directly.
    """
    validate(g, td)
    adj = [set(a) for a in td.tree.adjacency]

    def layout(nodes):
        walk = _path_walk(adj, nodes)
        if walk is not None:
            return [td.bags[u] for u in walk]
        c = _centroid(adj, nodes)
        out = []
        for comp in _components(adj, nodes - {c}):
            out.extend(td.bags[c] | b for b in layout(comp))
        return out

    pd = PathDecomposition(tuple(layout(set(range(td.tree.n)))))
    validate(g, pd)
    return pd


def path_width_bound(td: TreeDecomposition) -> int:
    t = td.tree.n
    return (td.width + 1) * (int(math.floor(math.log2(t))) + 1) - 1


def ordering_respecting_f(pd: PathDecomposition, f: Cnf, reverse: bool = False) -> VariableOrder:
    """Variables sorted by the index of the first bag holding them."""
    bags = pd.bags[::-1] if reverse else pd.bags
    first: Dict[int, int] = {}
    for j, bag in enumerate(bags):
        for v in bag:
            if v < f.num_vars:
                first.setdefault(v + 1, j)
    missing = [x for x in range(1, f.num_vars + 1) if x not in first]
    if missing:
        raise UncoveredVertex(f"variables {missing} appear in no bag", missing[0])
    order = sorted(first, key=lambda x: (first[x], x))
    return VariableOrder(tuple(order), "respecting-f")


def first_bag_index(pd: PathDecomposition, f: Cnf) -> Dict[int, int]:
    first: Dict[int, int] = {}
    for j, bag in enumerate(pd.bags):
        for v in bag:
            if v < f.num_vars:
                first.setdefault(v + 1, j)
    return first


def incidence_path_decomposition(f: Cnf, td: Optional[TreeDecomposition] = None):
    """Validated path decomposition of the incidence graph of ``f``.

    Uses min-fill on the incidence graph unless a tree decomposition of it is
    supplied.
    """
    g = incidence_graph(f)
    if td is None:
        td = min_fill(g)
    pd = tree_to_path(td, g)
    return pd, validate(g, pd)


def cliquetree_incidence_path_decomposition(r: int, k: int):
    """The explicit primal decomposition of F_{r,k}, lifted to the incidence graph."""
    f = cnf_of_graph(clique_tree(r, k)[0])
    td = incidence_decomposition_from_primal(explicit_cliquetree_decomposition(r, k), f)
    return incidence_path_decomposition(f, td)


def decomposition_to_dot(td, g: Optional[Graph] = None) -> str:
    if isinstance(td, PathDecomposition):
        td = td.as_tree()
    name = (lambda v: g.label(v)) if g is not None else str
    out = ["graph TD {", "  node [shape=box];"]
    for i, bag in enumerate(td.bags):
        label = ", ".join(name(v) for v in sorted(bag))
        out.append(f'  {i} [label="{{{label}}}"];')
    for a, b in td.tree.edges:
        out.append(f"  {a} -- {b};")
    out.append("}")
    return "\n".join(out) + "\n"
