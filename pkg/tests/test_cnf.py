import pytest
from hypothesis import given, settings, strategies as st

from obddwidth.cnf import (
    Cnf,
    DimacsError,
    Literal,
    cnf_to_json,
    emit_dimacs,
    evaluate,
    incidence_graph,
    parse_dimacs,
    primal_graph,
    restrict,
    truth_table,
)
from obddwidth.config import CapExceeded
from obddwidth.graphs import Graph, cnf_of_graph, path_graph

from conftest import FIG1


def brute_table(f, over):
    """Independent truth-table oracle: evaluate every assignment directly."""
    bits = []
    for i in range(2 ** len(over)):
        a = {v: bool((i >> j) & 1) for j, v in enumerate(over)}
        bits.append(all(any(a[abs(l)] == (l > 0) for l in c) for c in f.clauses))
    return bits


@st.composite
def cnfs(draw, max_vars=6, max_clauses=6):
    n = draw(st.integers(1, max_vars))
    clauses = []
    for _ in range(draw(st.integers(0, max_clauses))):
        vs = draw(st.lists(st.integers(1, n), min_size=1, max_size=min(3, n), unique=True))
        clauses.append([v if draw(st.booleans()) else -v for v in vs])
    return Cnf.make(n, clauses)


def test_parse_simple():
    f = parse_dimacs("p cnf 2 1\n1 -2 0")
    assert f.num_vars == 2
    assert f.clauses == ((1, -2),)


def test_parse_fig1():
    f = parse_dimacs(FIG1)
    assert f.clauses == ((1, 2), (3, 4))


def test_parse_rejects_complementary_pair():
    with pytest.raises(DimacsError):
        parse_dimacs("p cnf 1 1\n1 -1 0")


@pytest.mark.parametrize("text", [
    "1 2 0\n",
    "p cnf x 1\n1 0\n",
    "p dnf 2 1\n1 0\n",
    "p cnf 2 1\n3 0\n",
    "p cnf 2 2\n1 0\n",
    "p cnf 2 1\n1 2\n",
])
def test_parse_errors(text):
    with pytest.raises(DimacsError):
        parse_dimacs(text)


def test_parse_bytes_comments_and_multiline_clauses():
    f = parse_dimacs(b"c hello\np cnf 3 2\n1\n2 0 -3\n0\n")
    assert f.clauses == ((1, 2), (-3,))


def test_literal_roundtrip():
    assert Literal.from_int(-4) == Literal(4, False)
    assert Literal(4, True).to_int() == 4


def test_restrict_examples():
    f = parse_dimacs(FIG1)
    assert restrict(f, {1: False}).clauses == ((2,), (3, 4))
    assert restrict(f, {1: True}).clauses == ((3, 4),)
    g = Cnf.make(2, [(1, 2)])
    assert restrict(g, {1: False, 2: False}).is_false
    assert restrict(g, {1: False, 2: False}).clauses == ((),)
    assert restrict(g, {1: True}).is_true


def test_restrict_unknown_variable():
    with pytest.raises(KeyError):
        restrict(parse_dimacs(FIG1), {5: True})


def test_evaluate_examples():
    f = parse_dimacs(FIG1)
    assert evaluate(f, [True, False, True, False])
    assert not evaluate(f, [False, False, True, True])
    assert evaluate(Cnf.true(0), {})
    with pytest.raises(ValueError):
        evaluate(f, {1: True})


def test_truth_table_examples():
    f = Cnf.make(2, [(1, 2)])
    assert truth_table(f).to_list() == [False, True, True, True]
    assert truth_table(Cnf.false(1)).to_list() == [False, False]
    fig1 = parse_dimacs(FIG1)
    tt = truth_table(fig1)
    assert tt.count() == 9
    assert tt.to_list() == brute_table(fig1, (1, 2, 3, 4))


def test_truth_table_cap():
    with pytest.raises(CapExceeded):
        truth_table(Cnf.true(5), cap=4)
    with pytest.raises(ValueError):
        truth_table(Cnf.make(3, [(1, 3)]), over=(1, 2))


def test_primal_graph_examples():
    assert primal_graph(parse_dimacs(FIG1)).edges == ((0, 1), (2, 3))
    k2 = Graph.from_edges(2, [(0, 1)])
    assert primal_graph(cnf_of_graph(k2)).edges == ((0, 1), (0, 2), (1, 2))
    empty = primal_graph(Cnf.true(3))
    assert empty.n == 3 and empty.edges == ()


def test_incidence_graph_examples():
    g = incidence_graph(parse_dimacs(FIG1))
    assert g.n == 6
    assert g.edges == ((0, 4), (1, 4), (2, 5), (3, 5))
    assert g.tags == ("variable",) * 4 + ("clause",) * 2
    star = incidence_graph(Cnf.make(5, [(1, 2, 3, 4, 5)]))
    assert star.degree(5) == 5
    p3 = incidence_graph(cnf_of_graph(path_graph(3)))
    assert [p3.degree(v) for v in range(5, 7)] == [3, 3]


def test_json_export_has_names():
    f = cnf_of_graph(path_graph(2))
    assert '"names": ["X_v1", "X_v2", "X_{v1,v2}"]' in cnf_to_json(f)


@given(cnfs())
def test_dimacs_roundtrip(f):
    assert parse_dimacs(emit_dimacs(f)) == f


def test_dimacs_roundtrip_with_names_and_false():
    f = cnf_of_graph(path_graph(3))
    assert parse_dimacs(emit_dimacs(f)) == f
    assert parse_dimacs(emit_dimacs(Cnf.false(2))).is_false


@given(cnfs(), st.data())
@settings(max_examples=60)
def test_restrict_is_compositional(f, data):
    vs = list(range(1, f.num_vars + 1))
    chosen = data.draw(st.lists(st.sampled_from(vs), unique=True))
    cut = data.draw(st.integers(0, len(chosen)))
    s1 = {v: data.draw(st.booleans()) for v in chosen[:cut]}
    s2 = {v: data.draw(st.booleans()) for v in chosen[cut:]}
    rest = [v for v in vs if v not in s1 and v not in s2]
    lhs = truth_table(restrict(restrict(f, s1), s2), rest)
    rhs = truth_table(restrict(f, {**s1, **s2}), rest)
    assert lhs == rhs


@given(cnfs(), st.data())
@settings(max_examples=60)
def test_evaluate_splits_through_restrict(f, data):
    a = {v: data.draw(st.booleans()) for v in range(1, f.num_vars + 1)}
    w = data.draw(st.sets(st.sampled_from(sorted(a))))
    left = {v: a[v] for v in w}
    right = {v: a[v] for v in a if v not in w}
    assert evaluate(f, a) == evaluate(restrict(f, left), right)


@given(cnfs(), st.data())
@settings(max_examples=60)
def test_restrict_matches_cofactor_slice(f, data):
    n = f.num_vars
    s = {v: data.draw(st.booleans()) for v in data.draw(st.sets(st.integers(1, n)))}
    rest = [v for v in range(1, n + 1) if v not in s]
    full = brute_table(f, tuple(range(1, n + 1)))
    table = truth_table(restrict(f, s), rest).to_list()
    for pos, value in enumerate(table):
        a = dict(s)
        a.update({v: bool((pos >> j) & 1) for j, v in enumerate(rest)})
        assert value == full[sum(a[v] << (v - 1) for v in range(1, n + 1))]


def test_parse_merges_duplicate_literals():
    assert parse_dimacs("p cnf 2 1\n1 1 2 0\n").clauses == ((1, 2),)
