"""Simple undirected graphs and the instance generators built on them.

Vertices are ``0..n-1``.  Generators number vertices deterministically so
that every instance is reproducible bit for bit: tree nodes in BFS order
(root 0, children ``2i+1`` and ``2i+2``), and clique vertices contiguous per
tree node.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

from .cnf import Cnf

Edge = Tuple[int, int]


@dataclass(frozen=True)
class Graph:
    n: int
    edges: Tuple[Edge, ...]
    labels: Optional[Tuple[str, ...]] = None
    # per-vertex tags, e.g. "variable" / "clause" for incidence graphs
    tags: Optional[Tuple[str, ...]] = None

    @classmethod
    def from_edges(cls, n, edges, labels=None, tags=None):
        norm = set()
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge {(u, v)} out of range for {n} vertices")
            norm.add((min(u, v), max(u, v)))
        return cls(
            n,
            tuple(sorted(norm)),
            tuple(labels) if labels is not None else None,
            tuple(tags) if tags is not None else None,
        )

    @cached_property
    def adjacency(self) -> Tuple[frozenset, ...]:
        adj: List[set] = [set() for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return tuple(frozenset(a) for a in adj)

    @cached_property
    def adjacency_masks(self) -> Tuple[int, ...]:
        return tuple(sum(1 << w for w in a) for a in self.adjacency)

    @cached_property
    def edge_index(self) -> Dict[Edge, int]:
        return {e: i for i, e in enumerate(self.edges)}

    def has_edge(self, u, v):
        return v in self.adjacency[u]

    def degree(self, v):
        return len(self.adjacency[v])

    def label(self, v):
        return self.labels[v] if self.labels else str(v)

    def subgraph(self, vertices: Sequence[int]) -> "Graph":
        """Induced subgraph, vertices renumbered in the given order."""
        pos = {v: i for i, v in enumerate(vertices)}
        edges = [(pos[u], pos[v]) for u, v in self.edges if u in pos and v in pos]
        labels = [self.label(v) for v in vertices] if self.labels else None
        return Graph.from_edges(len(vertices), edges, labels)

    def to_json(self):
        return {
            "n": self.n,
            "edges": [list(e) for e in self.edges],
            "labels": list(self.labels) if self.labels else None,
        }


@dataclass(frozen=True)
class CliqueTreeMeta:
    r: int
    k: int
    tree: Graph
    node_of_vertex: Tuple[int, ...]
    clique_of_node: Tuple[Tuple[int, ...], ...]
    parent: Tuple[int, ...] = field(default=())

    def to_json(self):
        return {
            "r": self.r,
            "k": self.k,
            "tree_nodes": self.tree.n,
            "tree_edges": [list(e) for e in self.tree.edges],
            "parent": list(self.parent),
            "clique_of_node": [list(c) for c in self.clique_of_node],
        }


def complete_binary_tree(r: int) -> Graph:
    if r < 0:
        raise ValueError("height must be non-negative")
    n = 2 ** (r + 1) - 1
    edges = [((i - 1) // 2, i) for i in range(1, n)]
    return Graph.from_edges(n, edges)


def path_graph(n: int) -> Graph:
    if n < 1:
        raise ValueError("path needs at least one vertex")
    return Graph.from_edges(
        n, [(i, i + 1) for i in range(n - 1)], [f"v{i + 1}" for i in range(n)]
    )


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, combinations(range(n), 2))


def _tree_parents(tree: Graph, root=0):
    parent = [-1] * tree.n
    seen = {root}
    queue = [root]
    for u in queue:
        for w in sorted(tree.adjacency[u]):
            if w not in seen:
                seen.add(w)
                parent[w] = u
                queue.append(w)
    if len(seen) != tree.n:
        raise ValueError("tree is not connected")
    return parent


def clique_graph(tree: Graph, sizes) -> Tuple[Graph, CliqueTreeMeta]:
    """Blow every tree node up into a clique and fully join adjacent cliques.

    ``sizes`` is either one clique size for all nodes or a per-node list.
    """
    if isinstance(sizes, int):
        sizes = [sizes] * tree.n
    if len(sizes) != tree.n or min(sizes, default=1) < 1:
        raise ValueError("need a positive clique size per tree node")
    cliques = []
    node_of_vertex = []
    start = 0
    for node, size in enumerate(sizes):
        cliques.append(tuple(range(start, start + size)))
        node_of_vertex.extend([node] * size)
        start += size
    edges = []
    for clique in cliques:
        edges.extend(combinations(clique, 2))
    for a, b in tree.edges:
        edges.extend((u, v) for u in cliques[a] for v in cliques[b])
    labels = []
    for node, clique in enumerate(cliques):
        labels.extend(f"t{node}.{i}" for i in range(len(clique)))
    g = Graph.from_edges(start, edges, labels)
    meta = CliqueTreeMeta(
        r=-1,
        k=min(sizes, default=0),
        tree=tree,
        node_of_vertex=tuple(node_of_vertex),
        clique_of_node=tuple(cliques),
        parent=tuple(_tree_parents(tree)),
    )
    return g, meta


def clique_tree(r: int, k: int) -> Tuple[Graph, CliqueTreeMeta]:
    """CT_{r,k}: complete binary tree of height r with k-cliques at the nodes."""
    if k < 1:
        raise ValueError("clique size must be positive")
    g, meta = clique_graph(complete_binary_tree(r), k)
    return g, CliqueTreeMeta(r, k, meta.tree, meta.node_of_vertex,
                             meta.clique_of_node, meta.parent)


def vertex_var(g: Graph, v: int) -> int:
    """Variable index of X_v in ``cnf_of_graph(g)``."""
    return v + 1


def edge_var(g: Graph, u: int, v: int) -> int:
    """Variable index of X_{u,v} in ``cnf_of_graph(g)``."""
    return g.n + 1 + g.edge_index[(min(u, v), max(u, v))]


def cnf_of_graph(g: Graph) -> Cnf:
    """One variable per vertex and per edge, one clause X_u | X_uv | X_v per edge."""
    names = [f"X_{g.label(v)}" for v in range(g.n)]
    names += [f"X_{{{g.label(u)},{g.label(v)}}}" for u, v in g.edges]
    clauses = [
        (vertex_var(g, u), vertex_var(g, v), edge_var(g, u, v))
        for u, v in g.edges
    ]
    return Cnf.make(g.n + len(g.edges), clauses, names)


def parse_graph(text: str) -> Graph:
    """Read the edge-list format: an ``n m`` header then ``u v`` lines.

    Lines starting with ``c`` or ``#`` are comments.  Vertices are 0-based.
    """
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line[0] in "c#":
            continue
        rows.append(line.split())
    if not rows or len(rows[0]) != 2:
        raise ValueError("missing 'n m' header")
    n, m = int(rows[0][0]), int(rows[0][1])
    edges = []
    for row in rows[1:]:
        if len(row) != 2:
            raise ValueError(f"bad edge line: {' '.join(row)}")
        edges.append((int(row[0]), int(row[1])))
    if len(edges) != m:
        raise ValueError(f"header announces {m} edges, found {len(edges)}")
    return Graph.from_edges(n, edges)


def emit_graph(g: Graph) -> str:
    lines = [f"{g.n} {len(g.edges)}"]
    lines += [f"{u} {v}" for u, v in g.edges]
    return "\n".join(lines) + "\n"


def graph_to_dot(g: Graph, meta: Optional[CliqueTreeMeta] = None) -> str:
    """DOT text; with ``meta`` each tree node's clique becomes a cluster."""
    out = ["graph G {", "  node [shape=circle];"]
    if meta is not None:
        for node, clique in enumerate(meta.clique_of_node):
            out.append(f"  subgraph cluster_{node} {{")
            out.append(f'    label="{node}"; style=rounded;')
            for v in clique:
                out.append(f'    {v} [label="{g.label(v)}"];')
            out.append("  }")
    else:
        for v in range(g.n):
            out.append(f'  {v} [label="{g.label(v)}"];')
    for u, v in g.edges:
        out.append(f"  {u} -- {v};")
    out.append("}")
    return "\n".join(out) + "\n"


def meta_json(meta: CliqueTreeMeta) -> str:
    return json.dumps(meta.to_json(), sort_keys=True)
