"""Static signed-path analysis between neuron groups.

A path is a chain of synapses in which every edge but the last is
excitatory: an inhibitory edge can end a path but never be passed through,
because an effective inhibitory signal silences its target.  The signal a
group sends another is the sum over paths of sign times the product of
weights.  Parallel paths add up, so several indirect routes can beat a
direct inhibitory edge, and nothing here prefers "more specific" links.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from math import prod
from typing import Iterable

from .substrate import EPS, AttentionMask, NeuronGraph, Polarity, Synapse, group_activation, run


@dataclass(frozen=True)
class Path:
    edges: tuple[Synapse, ...]

    def __post_init__(self):
        if not self.edges:
            raise ValueError("a path has at least one edge")
        for a, b in zip(self.edges, self.edges[1:]):
            if a.target != b.source:
                raise ValueError("path edges are not chained")
        if any(not e.excitatory for e in self.edges[:-1]):
            raise ValueError("only the last edge of a path may be inhibitory")

    @property
    def sign(self) -> int:
        return int(self.edges[-1].polarity)

    @property
    def strength(self) -> float:
        return prod(e.weight for e in self.edges)

    @property
    def nodes(self) -> tuple[str, ...]:
        return (self.edges[0].source, *(e.target for e in self.edges))

    def __len__(self):
        return len(self.edges)

    def __str__(self):
        out = self.edges[0].source
        for e in self.edges:
            out += f" {e.polarity.arrow} {e.target}"
        return out


def _as_set(graph: NeuronGraph, nodes: Iterable[str] | str) -> frozenset[str]:
    if isinstance(nodes, str):
        nodes = graph.groups.get(nodes, (nodes,))
    out = frozenset(nodes)
    missing = out - graph.neurons.keys()
    if missing:
        raise KeyError(f"unknown neurons {sorted(missing)}")
    return out


def enumerate_paths(graph: NeuronGraph, src, dst, max_len: int) -> list[Path]:
    """Every simple path from a ``src`` neuron to a ``dst`` neuron, at most ``max_len`` edges.

    ``src`` and ``dst`` are group names or collections of neuron ids.  Paths
    stop at the first destination neuron and never re-enter the source.
    Sorted by (length, edge keys).
    """
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    src, dst = _as_set(graph, src), _as_set(graph, dst)
    if not src or not dst:
        raise ValueError("src and dst must be non-empty")
    if src & dst:
        raise ValueError("src and dst must be disjoint")

    found: list[tuple[Synapse, ...]] = []

    def walk(node: str, visited: set[str], edges: list[Synapse]):
        for s in graph.outgoing(node):
            v = s.target
            if v in visited or v in src:
                continue
            if v in dst:
                found.append((*edges, s))
            elif s.excitatory and len(edges) + 1 < max_len:
                visited.add(v)
                edges.append(s)
                walk(v, visited, edges)
                edges.pop()
                visited.discard(v)

    for a in sorted(src):
        walk(a, {a}, [])
    found.sort(key=lambda es: (len(es), [e.key for e in es]))
    return [Path(es) for es in found]


@dataclass(frozen=True)
class SignalReport:
    direct_contribution: float
    indirect_contribution: float
    path_count_positive: int
    path_count_negative: int

    @property
    def total(self) -> float:
        return self.direct_contribution + self.indirect_contribution


def effective_signal(graph: NeuronGraph, src, dst, max_len: int = 8) -> SignalReport:
    """Summed signed path strength from ``src`` to ``dst``, per destination neuron."""
    dst_set = _as_set(graph, dst)
    paths = enumerate_paths(graph, src, dst_set, max_len)
    n = len(dst_set)
    direct = sum(p.sign * p.strength for p in paths if len(p) == 1) / n
    indirect = sum(p.sign * p.strength for p in paths if len(p) > 1) / n
    return SignalReport(
        direct_contribution=direct,
        indirect_contribution=indirect,
        path_count_positive=sum(p.sign > 0 for p in paths),
        path_count_negative=sum(p.sign < 0 for p in paths),
    )


class Equivalence(str, enum.Enum):
    AGREE = "agree"
    DISAGREE = "disagree"
    OUT_OF_CLASS = "out-of-class"


def is_acyclic(graph: NeuronGraph) -> bool:
    indeg = {n: 0 for n in graph.neurons}
    for k in graph.synapses:
        indeg[k.target] += 1
    ready = [n for n, d in indeg.items() if d == 0]
    seen = 0
    while ready:
        n = ready.pop()
        seen += 1
        for s in graph.outgoing(n):
            indeg[s.target] -= 1
            if indeg[s.target] == 0:
                ready.append(s.target)
    return seen == len(indeg)


def in_equivalence_class(graph: NeuronGraph) -> bool:
    """Acyclic, unit weights, and every inhibitory edge ends in a sink."""
    if any(s.weight != 1.0 for s in graph.synapses.values()):
        return False
    for s in graph.synapses.values():
        if not s.excitatory and graph.outgoing(s.target):
            return False
    return is_acyclic(graph)


def steady_state_equivalence_check(graph: NeuronGraph, src, dst, rho: float = 0.5) -> Equivalence:
    """Compare the static path-sum verdict with the dynamic fixpoint for ``dst``."""
    if not in_equivalence_class(graph):
        return Equivalence.OUT_OF_CLASS
    src_set, dst_set = _as_set(graph, src), _as_set(graph, dst)
    total = effective_signal(graph, src_set, dst_set, max_len=max(1, len(graph.neurons))).total
    static = total >= graph.theta - EPS
    trace = run(graph, src_set, AttentionMask(), max_ticks=len(graph.neurons) + 2)
    dynamic = group_activation(trace.final, dst_set, rho)
    return Equivalence.AGREE if static == dynamic else Equivalence.DISAGREE


__all__ = [
    "Equivalence", "Path", "Polarity", "SignalReport", "effective_signal", "enumerate_paths",
    "in_equivalence_class", "is_acyclic", "steady_state_equivalence_check",
]
