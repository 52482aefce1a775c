import random

import pytest

from obddwidth.cli import random_3cnf
from obddwidth.cnf import Cnf, parse_dimacs
from obddwidth.graphs import clique_tree, cnf_of_graph, path_graph

FIG1 = "p cnf 4 2\n1 2 0\n3 4 0\n"


def f1_and_f2(m):
    """(x | x1) & ... & (x | xm) & (y1 | ... | ym), x first then x_i then y_i."""
    clauses = [(1, 1 + i) for i in range(1, m + 1)]
    clauses.append(tuple(range(m + 2, 2 * m + 2)))
    names = ["x"] + [f"x{i}" for i in range(1, m + 1)] + [f"y{i}" for i in range(1, m + 1)]
    return Cnf.make(2 * m + 1, clauses, names)


def small_corpus():
    """Every formula of at most 12 variables the suite uses as a shared corpus."""
    out = {
        "fig1": parse_dimacs(FIG1),
        "F_1,1": cnf_of_graph(clique_tree(1, 1)[0]),
        "F1&F2(m=4)": f1_and_f2(4),
        "single6": Cnf.make(6, [(1, -2, 3, -4, 5, 6)]),
        "true3": Cnf.true(3),
        "false2": Cnf.false(2),
    }
    for n in range(1, 7):
        out[f"CNF(P_{n})"] = cnf_of_graph(path_graph(n))
    rng = random.Random(7)
    for i in range(10):
        nv = rng.randint(4, 12)
        out[f"rand{i}"] = random_3cnf(nv, rng.randint(2, 2 * nv), rng)
    return out


@pytest.fixture(scope="session")
def corpus():
    return small_corpus()


_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when != "call":
        return
    number, title = marker.args
    failed = call.excinfo is not None
    prev = _criteria.get(number, (title, True))
    _criteria[number] = (title, prev[1] and not failed)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, ok = _criteria[number]
        terminalreporter.write_line(f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {title}")
