"""Shared fixtures and sample instances for graphshuffle tests."""

from __future__ import annotations

import random

import pytest

from graphshuffle.graphs import DirectedGraph, Hypergraph
from graphshuffle.instances import parse_instance

# Directed graph with edges e1..e6 and Aut = {id, (1 3), (4 5), (1 3)(4 5)}
SAMPLE_G34 = """\
digraph 5 6
# e1..e6
1 3
1 2
3 1
3 2
2 4
2 5
"""

# Hypergraph e1 = {1,2,3}, e2 = {2,4}, e3 = {2,5}; same automorphism group
SAMPLE_H54 = """\
hypergraph 5 3
3 1 2 3
2 2 4
2 2 5
"""

SAMPLE_TWO_CYCLE = "digraph 2 2\n1 2\n2 1\n"
SAMPLE_THREE_CYCLE = "digraph 3 3\n1 2\n2 3\n3 1\n"
SAMPLE_PATH = "graph 3 2\n1 2\n2 3\n"
SAMPLE_SINGLE = "digraph 1 0\n"

AUT_G34 = ["()", "(1 3)", "(4 5)", "(1 3)(4 5)"]

GEAR_SAMPLE = "(1 2)(3 4 5 6)"
GEAR_LARGE = "(1 2 3)(4 5 6 7)(8 9 10 11 12 13)"

# exhaustive property suites reject instances above this many branches
PROPERTY_BRANCH_LIMIT = 30_000


@pytest.fixture
def g34() -> DirectedGraph:
    return parse_instance(SAMPLE_G34)


@pytest.fixture
def h54() -> Hypergraph:
    return parse_instance(SAMPLE_H54)


@pytest.fixture
def two_cycle() -> DirectedGraph:
    return parse_instance(SAMPLE_TWO_CYCLE)


@pytest.fixture
def three_cycle() -> DirectedGraph:
    return parse_instance(SAMPLE_THREE_CYCLE)


@pytest.fixture
def instance_file(tmp_path):
    """Write instance text to a file and return its path as a string."""

    def _write(text: str, name: str = "instance.txt") -> str:
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return str(path)

    return _write


def random_digraph(
    rng: random.Random, max_n: int = 4, max_m: int = 5
) -> DirectedGraph:
    n = rng.randint(1, max_n)
    m = rng.randint(0, max_m)
    edges = [(rng.randint(1, n), rng.randint(1, n)) for _ in range(m)]
    return DirectedGraph(n, edges)


def random_hypergraph(
    rng: random.Random, max_n: int = 4, max_m: int = 3
) -> Hypergraph:
    n = rng.randint(1, max_n)
    m = rng.randint(0, max_m)
    edges = [rng.sample(range(1, n + 1), rng.randint(1, n)) for _ in range(m)]
    return Hypergraph(n, edges)
