"""Neuron-level graph and discrete-time binary firing dynamics.

Neurons carry no meaning of their own; they are identified by string ids and
optionally belong to a named group.  Synapses are signed by polarity and
carry a non-negative weight.  Firing is all-or-nothing: a neuron fires on the
next tick iff its net weighted input reaches ``theta`` (or it is clamped).
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple

# Tolerance on the threshold comparison so that additive weight updates such
# as 0.7 + 0.3 still reach a threshold of 1.0.
EPS = 1e-9


class Polarity(enum.IntEnum):
    EXCITATORY = 1
    INHIBITORY = -1

    @property
    def arrow(self) -> str:
        return "->" if self is Polarity.EXCITATORY else "-|"


class SynapseKind(str, enum.Enum):
    """What a connection means on the meaning level (metadata only)."""

    ASSOCIATION = "association"
    INFERENCE = "inference"
    KINSHIP = "kinship"
    DEVELOPMENT = "development"
    BINDING = "binding"


class SynapseKey(NamedTuple):
    source: str
    target: str
    polarity: Polarity


@dataclass(frozen=True)
class Neuron:
    id: str
    owner_group: str | None = None


@dataclass(frozen=True)
class Synapse:
    source: str
    target: str
    polarity: Polarity
    weight: float
    kind: SynapseKind = SynapseKind.ASSOCIATION

    def __post_init__(self):
        if not self.weight >= 0:
            raise ValueError(f"synapse weight must be >= 0, got {self.weight!r}")
        object.__setattr__(self, "polarity", Polarity(self.polarity))
        object.__setattr__(self, "kind", SynapseKind(self.kind))

    @property
    def key(self) -> SynapseKey:
        return SynapseKey(self.source, self.target, self.polarity)

    @property
    def excitatory(self) -> bool:
        return self.polarity is Polarity.EXCITATORY

    @property
    def signed_weight(self) -> float:
        return self.weight * int(self.polarity)


class NeuronGraph:
    """Neurons plus signed, weighted synapses.

    Treated as an immutable value: every modifying operation returns a new
    graph.  Iteration over neurons and synapses follows sorted id order.
    """

    def __init__(self, neurons: Iterable[Neuron], synapses: Iterable[Synapse] = (),
                 theta: float = 1.0):
        if not theta > 0:
            raise ValueError(f"theta must be positive, got {theta!r}")
        self.theta = float(theta)
        table: dict[str, Neuron] = {}
        for n in neurons:
            if n.id in table:
                raise ValueError(f"duplicate neuron id {n.id!r}")
            table[n.id] = n
        self.neurons: dict[str, Neuron] = {k: table[k] for k in sorted(table)}

        merged: dict[SynapseKey, Synapse] = {}
        for s in synapses:
            for end in (s.source, s.target):
                if end not in self.neurons:
                    raise ValueError(f"synapse endpoint {end!r} is not a neuron")
            old = merged.get(s.key)
            if old is not None:
                s = Synapse(s.source, s.target, s.polarity, old.weight + s.weight, old.kind)
            merged[s.key] = s
        self.synapses: dict[SynapseKey, Synapse] = {k: merged[k] for k in sorted(merged)}

        self._incoming: dict[str, list[Synapse]] = {n: [] for n in self.neurons}
        self._outgoing: dict[str, list[Synapse]] = {n: [] for n in self.neurons}
        for s in self.synapses.values():
            self._incoming[s.target].append(s)
            self._outgoing[s.source].append(s)

        groups: dict[str, list[str]] = {}
        for n in self.neurons.values():
            if n.owner_group is not None:
                groups.setdefault(n.owner_group, []).append(n.id)
        self.groups: dict[str, tuple[str, ...]] = {g: tuple(v) for g, v in sorted(groups.items())}

    def __repr__(self):
        return (f"NeuronGraph({len(self.neurons)} neurons, "
                f"{len(self.synapses)} synapses, theta={self.theta})")

    def __eq__(self, other):
        if not isinstance(other, NeuronGraph):
            return NotImplemented
        return (self.theta == other.theta and self.neurons == other.neurons
                and self.synapses == other.synapses)

    __hash__ = None

    def incoming(self, neuron: str) -> list[Synapse]:
        return self._incoming[neuron]

    def outgoing(self, neuron: str) -> list[Synapse]:
        return self._outgoing[neuron]

    def group(self, name: str) -> tuple[str, ...]:
        try:
            return self.groups[name]
        except KeyError:
            raise KeyError(f"unknown group {name!r}") from None

    def weight(self, source: str, target: str,
               polarity: Polarity = Polarity.EXCITATORY) -> float:
        s = self.synapses.get(SynapseKey(source, target, Polarity(polarity)))
        return 0.0 if s is None else s.weight

    def group_weight(self, src: str, dst: str,
                     polarity: Polarity = Polarity.EXCITATORY) -> float:
        """Input one ``dst`` neuron receives when all of ``src`` fires (averaged over dst)."""
        dst_ids = self.group(dst)
        total = sum(self.weight(a, b, polarity) for a in self.group(src) for b in dst_ids)
        return total / len(dst_ids)

    def with_synapses(self, extra: Iterable[Synapse]) -> NeuronGraph:
        """New graph with ``extra`` added; same-key synapses merge by weight addition."""
        return NeuronGraph(self.neurons.values(), [*self.synapses.values(), *extra], self.theta)

    def with_weights(self, weights: Mapping[SynapseKey, float]) -> NeuronGraph:
        """New graph with the given synapses' weights replaced."""
        syns = []
        for k, s in self.synapses.items():
            if k in weights:
                s = Synapse(s.source, s.target, s.polarity, weights[k], s.kind)
            syns.append(s)
        return NeuronGraph(self.neurons.values(), syns, self.theta)

    def without_synapses(self, keys: Iterable[SynapseKey]) -> NeuronGraph:
        drop = set(keys)
        return NeuronGraph(self.neurons.values(),
                           [s for k, s in self.synapses.items() if k not in drop], self.theta)

    def with_theta(self, theta: float) -> NeuronGraph:
        return NeuronGraph(self.neurons.values(), self.synapses.values(), theta)


# -- construction ------------------------------------------------------------

@dataclass(frozen=True)
class GroupSpec:
    name: str
    size: int = 1


@dataclass(frozen=True)
class LinkSpec:
    source: str
    target: str
    polarity: Polarity
    weight: float
    kind: SynapseKind = SynapseKind.ASSOCIATION


def neuron_ids(name: str, size: int) -> list[str]:
    """Neuron ids for a group: the group name itself for size 1, else ``name.i``."""
    if size == 1:
        return [name]
    width = len(str(size - 1))
    return [f"{name}.{i:0{width}d}" for i in range(size)]


def build_graph(group_specs: Iterable[GroupSpec], link_specs: Iterable[LinkSpec] = (),
                *, w_int: float = 1.0, theta: float = 1.0) -> NeuronGraph:
    """Expand group declarations and group-to-group links into a neuron graph.

    A group of size n becomes n neurons joined by all n*(n-1) internal
    excitatory synapses of weight ``w_int``.  A link of weight w fans out to
    every (source member, target member) pair with weight w / |source|, so a
    fully firing source group delivers exactly w to each target neuron.
    """
    members: dict[str, list[str]] = {}
    neurons: list[Neuron] = []
    synapses: list[Synapse] = []
    for g in group_specs:
        if g.name in members:
            raise ValueError(f"duplicate group {g.name!r}")
        if g.size < 1:
            raise ValueError(f"group {g.name!r} has size {g.size}; must be >= 1")
        ids = neuron_ids(g.name, g.size)
        members[g.name] = ids
        neurons.extend(Neuron(i, g.name) for i in ids)
        for a in ids:
            for b in ids:
                if a != b:
                    synapses.append(Synapse(a, b, Polarity.EXCITATORY, w_int, SynapseKind.BINDING))
    for link in link_specs:
        for end in (link.source, link.target):
            if end not in members:
                raise ValueError(f"link references undeclared group {end!r}")
        if link.weight < 0:
            raise ValueError(f"link weight must be >= 0, got {link.weight!r}")
        src, dst = members[link.source], members[link.target]
        w = link.weight / len(src)
        for a in src:
            for b in dst:
                synapses.append(Synapse(a, b, link.polarity, w, link.kind))
    return NeuronGraph(neurons, synapses, theta)


# -- dynamics ------------------------------------------------------------------

@dataclass(frozen=True)
class AttentionMask:
    """Per-neuron and per-edge gains in [0, 1]; absent entries mean 1."""

    neuron_gain: Mapping[str, float] = field(default_factory=dict)
    edge_gain: Mapping[SynapseKey, float] = field(default_factory=dict)

    def __post_init__(self):
        for table in (self.neuron_gain, self.edge_gain):
            for k, g in table.items():
                if not 0.0 <= g <= 1.0:
                    raise ValueError(f"gain for {k!r} outside [0, 1]: {g!r}")

    __hash__ = None

    def neuron(self, n: str) -> float:
        return self.neuron_gain.get(n, 1.0)

    def edge(self, key: SynapseKey) -> float:
        return self.edge_gain.get(key, 1.0)


ALL_ON = AttentionMask()


@dataclass(frozen=True)
class ActivationState:
    firing: frozenset[str] = frozenset()
    clamped: frozenset[str] = frozenset()
    tick: int = 0

    def __post_init__(self):
        object.__setattr__(self, "firing", frozenset(self.firing))
        object.__setattr__(self, "clamped", frozenset(self.clamped))
        if not self.clamped <= self.firing:
            raise ValueError("clamped neurons must be firing")
        if self.tick < 0:
            raise ValueError("tick must be non-negative")


class TraceStatus(str, enum.Enum):
    FIXPOINT = "fixpoint"
    CYCLE = "cycle"
    EXHAUSTED = "tick-budget-exhausted"


@dataclass(frozen=True)
class Trace:
    snapshots: tuple[frozenset[str], ...]
    status: TraceStatus

    @property
    def final(self) -> frozenset[str]:
        return self.snapshots[-1] if self.snapshots else frozenset()

    def __len__(self):
        return len(self.snapshots)


def net_input(graph: NeuronGraph, firing: frozenset[str], neuron: str,
              gains: AttentionMask = ALL_ON) -> float:
    """Sigma+ minus Sigma- arriving at ``neuron`` from the current firing set."""
    pos = neg = 0.0
    for s in graph.incoming(neuron):
        if s.source in firing:
            w = s.weight * gains.edge(s.key)
            if s.excitatory:
                pos += w
            else:
                neg += w
    return (pos - neg) * gains.neuron(neuron)


def step(graph: NeuronGraph, state: ActivationState,
         gains: AttentionMask = ALL_ON) -> ActivationState:
    """Synchronous update of every neuron against the current tick's firing set."""
    unknown = (state.firing | state.clamped) - graph.neurons.keys()
    if unknown:
        raise ValueError(f"state references unknown neurons {sorted(unknown)}")
    theta = graph.theta - EPS
    nxt = set(state.clamped)
    for n in graph.neurons:
        if n not in nxt and net_input(graph, state.firing, n, gains) >= theta:
            nxt.add(n)
    return ActivationState(frozenset(nxt), state.clamped, state.tick + 1)


def run(graph: NeuronGraph, clamps: Iterable[str] = (), gains: AttentionMask = ALL_ON,
        max_ticks: int = 100, *, initial: Iterable[str] | None = None) -> Trace:
    """Iterate ``step`` until a fixpoint, a repeated firing set, or the tick budget.

    The start state fires exactly the clamped neurons, plus ``initial`` if
    given (a one-off kick that is not held).
    """
    if max_ticks < 1:
        raise ValueError("max_ticks must be >= 1")
    clamps = frozenset(clamps)
    start = clamps | frozenset(initial or ())
    state = ActivationState(start, clamps, 0)
    snapshots = [state.firing]
    seen = {state.firing}
    for _ in range(max_ticks):
        state = step(graph, state, gains)
        snapshots.append(state.firing)
        if state.firing == snapshots[-2]:
            return Trace(tuple(snapshots), TraceStatus.FIXPOINT)
        if state.firing in seen:
            return Trace(tuple(snapshots), TraceStatus.CYCLE)
        seen.add(state.firing)
    return Trace(tuple(snapshots), TraceStatus.EXHAUSTED)


def group_activation(state: ActivationState | frozenset[str], group: Iterable[str],
                     rho: float = 0.5) -> bool:
    """True iff at least a ``rho`` fraction of ``group`` is firing."""
    group = frozenset(group)
    if not group:
        raise ValueError("group must be non-empty")
    if not 0.0 < rho <= 1.0:
        raise ValueError(f"rho must be in (0, 1], got {rho!r}")
    firing = state.firing if isinstance(state, ActivationState) else state
    return len(firing & group) >= rho * len(group) - EPS
