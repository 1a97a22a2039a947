"""Weight plasticity: co-activation strengthening, use-strengthening, accessibility.

Only strengthening exists.  Weights grow additively and saturate at
``w_max``; nothing ever decays, and using a connection never consumes it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import permutations
from typing import Iterable, Sequence

from .paths import Path, effective_signal
from .pictures import Picture
from .substrate import EPS, NeuronGraph, Polarity, Synapse, SynapseKey, SynapseKind


@dataclass(frozen=True)
class Episode:
    co_active_groups: frozenset[str]
    used_paths: tuple[Path, ...] = ()
    duration: int = 1

    def __post_init__(self):
        object.__setattr__(self, "co_active_groups", frozenset(self.co_active_groups))
        object.__setattr__(self, "used_paths", tuple(self.used_paths))
        if self.duration < 1:
            raise ValueError("episode duration must be a positive number of ticks")
        if any(not g for g in self.co_active_groups):
            raise ValueError("group names must be non-empty")


@dataclass(frozen=True)
class PlasticityConfig:
    eta: float = 0.5
    w_max: float = 10.0
    use_rate: float = 0.1

    def __post_init__(self):
        if not self.eta > 0:
            raise ValueError("eta must be > 0")
        if not self.use_rate > 0:
            raise ValueError("use_rate must be > 0")
        if not self.w_max >= 1:
            raise ValueError("w_max must be >= 1")


def _check_groups(graph: NeuronGraph, groups: Iterable[str]):
    for g in groups:
        if g not in graph.groups:
            raise KeyError(f"unknown group {g!r}")


def delta_update(graph: NeuronGraph, episode: Episode,
                 cfg: PlasticityConfig = PlasticityConfig()) -> NeuronGraph:
    """Strengthen excitatory synapses between every ordered pair of co-active groups.

    The group-level weight G1 -> G2 gains ``eta * duration`` up to ``w_max``.
    Like link fan-out, this is spread over the source group: each synapse
    gains ``eta * duration / |G1|`` and is capped at ``w_max / |G1|``.  A pair
    with no synapse at all gets a new one between the first neuron of each
    group.
    """
    _check_groups(graph, episode.co_active_groups)
    gain = cfg.eta * episode.duration
    updates: dict[SynapseKey, float] = {}
    created: list[Synapse] = []
    for g1, g2 in permutations(sorted(episode.co_active_groups), 2):
        src, dst = graph.groups[g1], set(graph.groups[g2])
        share, cap = gain / len(src), cfg.w_max / len(src)
        hit = False
        for a in src:
            for s in graph.outgoing(a):
                if s.excitatory and s.target in dst:
                    hit = True
                    updates[s.key] = max(s.weight, min(cap, s.weight + share))
        if not hit:
            created.append(Synapse(src[0], graph.groups[g2][0], Polarity.EXCITATORY,
                                   min(cfg.w_max, gain), SynapseKind.ASSOCIATION))
    out = graph.with_weights(updates) if updates else graph
    return out.with_synapses(created) if created else out


def use_strengthen(graph: NeuronGraph, used: Episode,
                   cfg: PlasticityConfig = PlasticityConfig()) -> NeuronGraph:
    """Used groups gain internal coherence; used paths gain strength.

    Every internal excitatory synapse of a used group and every synapse on a
    used path gains ``use_rate`` once per episode, capped at ``w_max``.
    """
    _check_groups(graph, used.co_active_groups)
    keys: set[SynapseKey] = set()
    for g in used.co_active_groups:
        members = set(graph.groups[g])
        for a in members:
            keys.update(s.key for s in graph.outgoing(a) if s.excitatory and s.target in members)
    for p in used.used_paths:
        for e in p.edges:
            if e.key not in graph.synapses:
                raise KeyError(f"path uses unknown synapse {e.key}")
            keys.add(e.key)
    return graph.with_weights(
        {k: min(cfg.w_max, graph.synapses[k].weight + cfg.use_rate) for k in keys})


def episodes_to_activation(theta: float, w0: float, eta: float, duration: int = 1) -> int:
    """Closed-form count of identical episodes before a cue alone fires its partner."""
    if w0 >= theta - EPS:
        return 0
    return math.ceil((theta - w0) / (eta * duration) - EPS)


def accessibility(memory: Sequence[Picture], graph: NeuronGraph, cue: Picture,
                  max_len: int = 6) -> list[tuple[Picture, float]]:
    """Rank memory pictures by the effective signal they receive from ``cue``.

    Neurons shared with the cue are left out of the destination; a picture
    entirely inside the cue scores 0.  Ties fall back to picture id.
    """
    scored = []
    for p in memory:
        dst = p.members - cue.members
        score = 0.0
        if cue.members and dst:
            score = effective_signal(graph, cue.members, dst, max_len).total
        scored.append((p, score))
    scored.sort(key=lambda ps: (-ps[1], ps[0].id))
    return scored


def apply_episodes(scenario, episodes: Iterable[Episode],
                   cfg: PlasticityConfig = PlasticityConfig()):
    """The Δ-rule at the level of declared group links.

    Returns ``(new_scenario, changes)`` where changes lists
    ``(source, target, before, after)``.  For single-neuron groups this is
    the same update :func:`delta_update` makes on the neuron graph.
    """
    from dataclasses import replace

    from .scenario import LinkDecl

    links = {(l.source, l.target, l.polarity): l for l in scenario.links}
    before = {k: l.weight for k, l in links.items()}
    for ep in episodes:
        for g in ep.co_active_groups:
            if g not in scenario.group_table:
                raise KeyError(f"unknown group {g!r}")
        gain = cfg.eta * ep.duration
        for g1, g2 in permutations(sorted(ep.co_active_groups), 2):
            key = (g1, g2, Polarity.EXCITATORY)
            old = links.get(key)
            if old is None:
                links[key] = LinkDecl(g1, g2, Polarity.EXCITATORY, min(cfg.w_max, gain),
                                      SynapseKind.ASSOCIATION)
            else:
                links[key] = replace(old, weight=max(old.weight, min(cfg.w_max, old.weight + gain)))
    changes = [(k[0], k[1], before.get(k, 0.0), l.weight)
               for k, l in sorted(links.items(), key=lambda kl: (kl[0][0], kl[0][1], kl[0][2].value))
               if before.get(k) != l.weight]
    return replace(scenario, links=tuple(links.values())), changes


__all__ = [
    "Episode", "PlasticityConfig", "accessibility", "apply_episodes", "delta_update",
    "episodes_to_activation", "use_strengthen",
]
