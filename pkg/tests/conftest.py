import random

import pytest
from hypothesis import strategies as st

from presem import scenarios
from presem.dsl import load
from presem.substrate import (GroupSpec, LinkSpec, Neuron, NeuronGraph, Polarity, Synapse,
                              build_graph)

EXC, INH = Polarity.EXCITATORY, Polarity.INHIBITORY


def amplifier(with_n3=True):
    groups = [GroupSpec(n) for n in ("N1", "N2", "N3", "N4")]
    links = [LinkSpec("N1", "N2", EXC, 1), LinkSpec("N2", "N4", EXC, 1),
             LinkSpec("N1", "N4", INH, 1)]
    if with_n3:
        links += [LinkSpec("N1", "N3", EXC, 1), LinkSpec("N3", "N4", EXC, 1)]
    return build_graph(groups, links)


def graph_from_edges(n, edges, theta=1.0):
    """``edges``: iterable of (src, dst, polarity, weight) over neuron indices."""
    names = [f"n{i}" for i in range(n)]
    return NeuronGraph([Neuron(x, x) for x in names],
                       [Synapse(names[a], names[b], p, w) for a, b, p, w in edges], theta)


def random_graph(rng: random.Random, max_n=8, p_edge=0.3, weights=(0.5, 1.0, 2.0)):
    n = rng.randint(1, max_n)
    edges = []
    for a in range(n):
        for b in range(n):
            if rng.random() < p_edge:
                edges.append((a, b, rng.choice((EXC, INH)), rng.choice(weights)))
    return graph_from_edges(n, edges)


@st.composite
def graphs(draw, max_n=6):
    n = draw(st.integers(1, max_n))
    edge = st.tuples(st.integers(0, n - 1), st.integers(0, n - 1), st.sampled_from((EXC, INH)),
                     st.sampled_from((0.5, 1.0, 1.5, 2.0)))
    return graph_from_edges(n, draw(st.lists(edge, max_size=3 * n)))


@pytest.fixture(scope="session")
def bundled():
    return {name: load(scenarios.path(name)) for name in scenarios.NAMES}


@pytest.fixture(scope="session")
def umbrella(bundled):
    return bundled["umbrella"]


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
