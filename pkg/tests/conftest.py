import itertools
import shutil

import pytest

from petrismt.concurrency import ConcurrencyRelation

HAVE_Z3 = shutil.which("z3") is not None

needs_z3 = pytest.mark.skipif(not HAVE_Z3, reason="z3 not on PATH")


def brute_colorable(places, rel, k):
    """Plain enumeration of every map places -> 1..k; independent of the package search code."""
    pairs = [tuple(p) for p in rel]
    for colors in itertools.product(range(1, k + 1), repeat=len(places)):
        c = dict(zip(places, colors))
        if all(c[a] != c[b] for a, b in pairs):
            return True
    return False


def brute_chromatic(places, rel):
    k = 1
    while not brute_colorable(places, rel, k):
        k += 1
    return k


def rel_of(*pairs):
    return ConcurrencyRelation(pairs)


@pytest.fixture
def triangle():
    return ["p1", "p2", "p3"], rel_of(("p1", "p2"), ("p2", "p3"), ("p1", "p3"))


@pytest.fixture
def five_cycle():
    places = [f"p{i}" for i in range(1, 6)]
    rel = ConcurrencyRelation((places[i], places[(i + 1) % 5]) for i in range(5))
    return places, rel


@pytest.fixture
def z3_spec():
    from petrismt.solver import SolverSpec

    if not HAVE_Z3:
        pytest.skip("z3 not on PATH")
    return SolverSpec("z3", ("z3", "-smt2", "{file}"), timeout=60, produces_models=True)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
