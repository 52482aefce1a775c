import json

import pytest
from hypothesis import given, settings, strategies as st

from obddwidth.cnf import Cnf, incidence_graph, primal_graph
from obddwidth.decomposition import (
    DisconnectedOccurrence,
    NotATree,
    PathDecomposition,
    TreeDecomposition,
    UncoveredEdge,
    UncoveredVertex,
    decomposition_from_json,
    decomposition_to_dot,
    explicit_cliquetree_decomposition,
    incidence_decomposition_from_primal,
    incidence_path_decomposition,
    min_fill,
    ordering_respecting_f,
    path_width_bound,
    tree_to_path,
    validate,
)
from obddwidth.graphs import Graph, clique_tree, cnf_of_graph, complete_binary_tree, complete_graph


@st.composite
def graphs(draw, max_n=9):
    n = draw(st.integers(1, max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    edges = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return Graph.from_edges(n, edges)


def house():
    """Square 0-1-2-3 with roof 4 over 0-1: treewidth 2, largest bag 3."""
    g = Graph.from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 4), (1, 4)])
    td = TreeDecomposition.make([(0, 1), (1, 2)], [{0, 1, 4}, {0, 1, 2}, {0, 2, 3}])
    return g, td


def test_validate_small_decomposition():
    g, td = house()
    assert validate(g, td) == 2


def test_validate_single_bag():
    g = complete_graph(4)
    assert validate(g, PathDecomposition.make([range(4)])) == 3


def test_validate_mutations():
    g, td = house()
    bags = list(td.bags)
    with pytest.raises(UncoveredVertex) as err:
        validate(g, TreeDecomposition.make(td.tree.edges, [b - {4} for b in bags]))
    assert err.value.witness == 4
    with pytest.raises(UncoveredEdge) as err:
        validate(g, TreeDecomposition.make([(0, 1), (1, 2)], [{0, 1, 4}, {0, 1, 2}, {0, 3}]))
    assert err.value.witness == (2, 3)
    with pytest.raises(DisconnectedOccurrence) as err:
        validate(g, TreeDecomposition.make([(0, 1), (1, 2)], [{0, 1, 4}, {1, 2, 0}, {0, 2, 3, 4}]))
    assert err.value.witness[0] == 4
    with pytest.raises(NotATree):
        validate(g, TreeDecomposition.make([(0, 1)], bags))


def test_min_fill_examples():
    tree = complete_binary_tree(3)
    assert validate(tree, min_fill(tree)) == 1
    for n in (1, 2, 5):
        assert validate(complete_graph(n), min_fill(complete_graph(n))) == n - 1
    primal = primal_graph(cnf_of_graph(clique_tree(1, 2)[0]))
    assert validate(primal, min_fill(primal)) >= 3


def test_min_fill_handles_disconnected_and_empty():
    g = Graph.from_edges(5, [(0, 1), (3, 4)])
    assert validate(g, min_fill(g)) == 1
    empty = Graph.from_edges(0, [])
    assert min_fill(empty).width == -1


@given(graphs())
@settings(max_examples=80, deadline=None)
def test_min_fill_always_valid(g):
    validate(g, min_fill(g))


@pytest.mark.parametrize("r,k,width", [(1, 2, 3), (0, 1, 0), (2, 3, 5), (2, 2, 3), (3, 2, 3)])
def test_explicit_decomposition(r, k, width):
    g = primal_graph(cnf_of_graph(clique_tree(r, k)[0]))
    assert validate(g, explicit_cliquetree_decomposition(r, k)) == width


@pytest.mark.parametrize("r", [1, 2, 3])
def test_explicit_decomposition_k1_needs_triangles(r):
    # each clause X_u | X_v | X_uv is a triangle in the primal graph
    g = primal_graph(cnf_of_graph(clique_tree(r, 1)[0]))
    assert validate(g, explicit_cliquetree_decomposition(r, 1)) == 2
    assert validate(g, min_fill(g)) == 2


def test_tree_to_path_single_node():
    g = complete_graph(3)
    td = TreeDecomposition.make([], [{0, 1, 2}])
    assert tree_to_path(td, g).bags == td.bags


def test_tree_to_path_star():
    g = Graph.from_edges(4, [(0, 1), (0, 2), (0, 3)])
    td = TreeDecomposition.make([(0, 1), (0, 2), (0, 3)], [{0}, {0, 1}, {0, 2}, {0, 3}])
    pd = tree_to_path(td, g)
    assert validate(g, pd) <= 3
    g3 = Graph.from_edges(3, [(0, 1), (1, 2)])
    td3 = TreeDecomposition.make([(0, 1), (0, 2)], [{1}, {0, 1}, {1, 2}])
    assert validate(g3, tree_to_path(td3, g3)) <= 3


def test_tree_to_path_branching_tree_bound():
    # a complete binary tree of bags forces the centroid recursion
    tree = complete_binary_tree(3)
    bags = [{i, (i - 1) // 2} if i else {0} for i in range(tree.n)]
    td = TreeDecomposition.make(tree.edges, bags)
    pd = tree_to_path(td, tree)
    assert validate(tree, pd) <= path_width_bound(td)


def test_tree_to_path_explicit_f22():
    f = cnf_of_graph(clique_tree(2, 2)[0])
    g = primal_graph(f)
    td = explicit_cliquetree_decomposition(2, 2)
    pd = tree_to_path(td, g)
    assert validate(g, pd) <= path_width_bound(td)


def test_tree_to_path_rejects_invalid():
    g, td = house()
    bad = TreeDecomposition.make(td.tree.edges, [b - {4} for b in td.bags])
    with pytest.raises(UncoveredVertex):
        tree_to_path(bad, g)


@given(graphs())
@settings(max_examples=80, deadline=None)
def test_tree_to_path_bound_holds(g):
    td = min_fill(g)
    assert validate(g, tree_to_path(td, g)) <= path_width_bound(td)


def test_ordering_respecting_f_examples():
    f = Cnf.make(3, [(1, 2), (2, 3)])
    # vertices: x1=0, x2=1, x3=2, C1=3, C2=4
    pd = PathDecomposition.make([{0, 3, 1}, {1, 4, 2}])
    validate(incidence_graph(f), pd)
    assert ordering_respecting_f(pd, f).order == (1, 2, 3)
    assert ordering_respecting_f(pd, f, reverse=True).order == (2, 3, 1)
    single = PathDecomposition.make([range(5)])
    assert ordering_respecting_f(single, f).order == (1, 2, 3)
    g = Cnf.make(4, [(1, 2), (3, 4)])
    pd2 = PathDecomposition.make([{0, 1, 4}, {2, 3, 5}])
    assert ordering_respecting_f(pd2, g).order == (1, 2, 3, 4)
    with pytest.raises(UncoveredVertex):
        ordering_respecting_f(PathDecomposition.make([{0, 1, 4}]), g)


def test_incidence_lift_of_explicit_decomposition():
    f = cnf_of_graph(clique_tree(1, 1)[0])
    td = incidence_decomposition_from_primal(explicit_cliquetree_decomposition(1, 1), f)
    assert validate(incidence_graph(f), td) == 3
    pd, p = incidence_path_decomposition(f, td)
    assert p == validate(incidence_graph(f), pd)


def test_json_and_dot_export():
    g, td = house()
    data = json.loads(json.dumps(td.to_json()))
    assert data["width"] == 2
    back = decomposition_from_json(data)
    assert validate(g, back) == 2
    pd = PathDecomposition.make([{0, 1}, {1, 2}])
    assert decomposition_from_json(pd.to_json()) == pd
    dot = decomposition_to_dot(td, g)
    assert dot.count("[label=") == 3 and dot.count(" -- ") == 2
