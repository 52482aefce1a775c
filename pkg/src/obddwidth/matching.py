"""Matching width: cut matchings, per-permutation width and the exact value.

The matching width of a prefix S is the size of a maximum matching among
edges with one end in S and the other outside.  A permutation's width is the
worst prefix; a graph's width is the best permutation.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from .config import DEFAULT_CAPS
from .graphs import CliqueTreeMeta, Graph, clique_tree
from .orderdp import min_max_prefix_order


@dataclass(frozen=True)
class CutReport:
    prefix: frozenset
    matching: Tuple[Tuple[int, int], ...]  # (inside, outside) pairs
    size: int

    def to_json(self):
        return {
            "prefix": sorted(self.prefix),
            "matching": [list(e) for e in self.matching],
            "size": self.size,
        }


@dataclass(frozen=True)
class MatchingWidthReport:
    value: int
    witness_order: Tuple[int, ...]
    per_prefix: CutReport

    def to_json(self):
        return {
            "value": self.value,
            "witness_order": list(self.witness_order),
            "worst_cut": self.per_prefix.to_json(),
        }


def _max_cut_matching(adj_masks, inside: int):
    """Augmenting-path maximum matching between ``inside`` and its complement.

    Left vertices are scanned in increasing index order, neighbours likewise.
    Returns a dict mapping each matched outside vertex to its partner.
    """
    owner = {}

    def augment(u, visited):
        cand = adj_masks[u] & ~inside & ~visited[0]
        while cand:
            bit = cand & -cand
            cand ^= bit
            visited[0] |= bit
            w = bit.bit_length() - 1
            if w not in owner or augment(owner[w], visited):
                owner[w] = u
                return True
        return False

    m = inside
    while m:
        bit = m & -m
        m ^= bit
        augment(bit.bit_length() - 1, [0])
    return owner


def _mask(vertices):
    out = 0
    for v in vertices:
        out |= 1 << v
    return out


def cut_matching(g: Graph, s) -> CutReport:
    s = frozenset(s)
    if any(not 0 <= v < g.n for v in s):
        raise ValueError("prefix holds vertices outside the graph")
    owner = _max_cut_matching(g.adjacency_masks, _mask(s))
    matching = tuple(sorted((u, w) for w, u in owner.items()))
    return CutReport(s, matching, len(matching))


def cut_matching_size(g: Graph, inside_mask: int) -> int:
    return len(_max_cut_matching(g.adjacency_masks, inside_mask))


def _as_perm(g: Graph, perm) -> Tuple[int, ...]:
    perm = tuple(perm)
    if sorted(perm) != list(range(g.n)):
        raise ValueError("not a permutation of the graph's vertices")
    return perm


def prefix_profile(g: Graph, perm) -> List[int]:
    """Cut-matching size of every prefix, lengths 0..n."""
    perm = _as_perm(g, perm)
    sizes = [0]
    mask = 0
    for v in perm:
        mask |= 1 << v
        sizes.append(cut_matching_size(g, mask))
    return sizes


def permutation_matching_width(g: Graph, perm) -> int:
    return max(prefix_profile(g, perm))


def witness_prefix(g: Graph, perm) -> Tuple[int, CutReport]:
    """Shortest prefix attaining the permutation's matching width."""
    perm = _as_perm(g, perm)
    sizes = prefix_profile(g, perm)
    length = sizes.index(max(sizes))
    return length, cut_matching(g, perm[:length])


def matching_width_exact(g: Graph, cap: Optional[int] = None) -> MatchingWidthReport:
    cap = cap or DEFAULT_CAPS.subset_dp
    masks = g.adjacency_masks
    value, order = min_max_prefix_order(
        g.n, lambda s: len(_max_cut_matching(masks, s)), cap
    )
    _, worst = witness_prefix(g, order)
    return MatchingWidthReport(value, tuple(order), worst)


class LemmaHypothesisError(ValueError):
    pass


def kmatching_witness(ct: Graph, meta: CliqueTreeMeta, white, k: int):
    """A crossing matching of size >= k between ``white`` and the rest.

    Checks the hypotheses first: a tree with at least two nodes, every clique
    of size at least k, and at least k vertices on each side.
    """
    white = frozenset(white)
    if meta.tree.n < 2:
        raise LemmaHypothesisError("tree needs at least two nodes")
    if min(len(c) for c in meta.clique_of_node) < k:
        raise LemmaHypothesisError(f"some clique is smaller than {k}")
    if len(white) < k or ct.n - len(white) < k:
        raise LemmaHypothesisError(f"each colour class needs at least {k} vertices")
    return cut_matching(ct, white).matching


@dataclass
class CltreemtReport:
    r: int
    k: int
    mode: str
    value: int
    bound: int
    permutations: int = 0
    witness_order: Tuple[int, ...] = field(default=())

    @property
    def passed(self):
        return self.value >= self.bound

    def to_json(self):
        return {
            "r": self.r,
            "k": self.k,
            "mode": self.mode,
            "mw_exact" if self.mode == "exact" else "mw_lower_sampled": self.value,
            "bound": self.bound,
            "bound_real": self.r * self.k / 2,
            "permutations": self.permutations,
            "pass": self.passed,
        }


def structured_permutations(meta: CliqueTreeMeta):
    """Orders a human would try first: by tree node, by level, and so on."""
    cliques = meta.clique_of_node
    n = sum(len(c) for c in cliques)
    yield list(range(n))
    yield list(range(n))[::-1]
    # one vertex per clique per sweep
    width = max(len(c) for c in cliques)
    yield [c[i] for i in range(width) for c in cliques if i < len(c)]
    # depth-first over the tree
    children = {i: [] for i in range(len(cliques))}
    for node, p in enumerate(meta.parent):
        if p >= 0:
            children[p].append(node)
    for post in (False, True):
        out = []

        def visit(node):
            if not post:
                out.extend(cliques[node])
            for c in children[node]:
                visit(c)
            if post:
                out.extend(cliques[node])

        visit(0)
        yield out
    # leaves first, then upwards
    depth = [0] * len(cliques)
    for node in range(1, len(cliques)):
        depth[node] = depth[meta.parent[node]] + 1
    by_depth = sorted(range(len(cliques)), key=lambda t: (-depth[t], t))
    yield [v for t in by_depth for v in cliques[t]]


def verify_cltreemt(r: int, k: int, samples: int = 1000, seed: int = 0,
                    mode: str = "auto", cap: Optional[int] = None) -> CltreemtReport:
    """Check mw(CT_{r,k}) >= ceil(rk/2), exactly or on sampled permutations."""
    cap = cap or DEFAULT_CAPS.subset_dp
    ct, meta = clique_tree(r, k)
    bound = math.ceil(r * k / 2)
    if mode == "auto":
        mode = "exact" if ct.n <= cap else "sampled"
    if mode == "exact":
        rep = matching_width_exact(ct, cap)
        return CltreemtReport(r, k, "exact", rep.value, bound, 0, rep.witness_order)
    rng = random.Random(seed)
    perms = list(structured_permutations(meta))
    for _ in range(samples):
        p = list(range(ct.n))
        rng.shuffle(p)
        perms.append(p)
    worst, worst_perm = None, ()
    for p in perms:
        w = permutation_matching_width(ct, p)
        if worst is None or w < worst:
            worst, worst_perm = w, tuple(p)
    return CltreemtReport(r, k, "sampled", worst, bound, len(perms), worst_perm)
