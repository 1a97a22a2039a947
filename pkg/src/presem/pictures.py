"""Pictures: labelled neuron groups with sub-picture structure and feature tags.

A picture is never atomic.  Pictures with declared parts decompose into
those parts; a picture without declared parts but with several neurons
decomposes into synthetic single-neuron leaves that carry no features.

Feature tags are handles for meaning-level bookkeeping.  Each tag is mirrored
by a *carrier*, the set of member neurons that realise it, so that resolving
a conflict during composition can be done with ordinary inhibitory synapses.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Iterable, Iterator, Sequence, Union

from .substrate import (AttentionMask, NeuronGraph, Polarity, Synapse,
                        SynapseKey, SynapseKind)

# Weight of the inhibitory edges composition uses to silence the losing side
# of a feature conflict.  Far above any excitation a scenario can deliver.
VETO_WEIGHT = 1000.0


class PictureError(ValueError):
    pass


class NoViewError(PictureError):
    """The observer has no synapses into the target at all."""


@dataclass(frozen=True)
class Feature:
    name: str
    asserted: bool = True

    @classmethod
    def parse(cls, text: str) -> Feature:
        text = text.strip()
        if text.startswith("!"):
            return cls(text[1:].strip(), False)
        return cls(text, True)

    def negated(self) -> Feature:
        return Feature(self.name, not self.asserted)

    def sort_key(self):
        return (self.name, not self.asserted)

    def __str__(self):
        return self.name if self.asserted else "!" + self.name


def sorted_features(features: Iterable[Feature]) -> list[Feature]:
    return sorted(features, key=Feature.sort_key)


class ConflictPolicy(str, enum.Enum):
    LEFT_WINS = "left-wins"
    RIGHT_WINS = "right-wins"
    KEEP_BOTH = "keep-both"


@dataclass(frozen=True)
class Composition:
    left: str
    right: str
    policy: ConflictPolicy
    conflicts: tuple[str, ...] = ()


Carriers = tuple[tuple[Feature, frozenset[str]], ...]


def _carriers(table: dict[Feature, frozenset[str]]) -> Carriers:
    return tuple((f, frozenset(table[f])) for f in sorted_features(table))


@dataclass(frozen=True)
class Picture:
    id: str
    members: frozenset[str]
    parts: tuple[Picture, ...] = ()
    carriers: Carriers = ()
    provenance: tuple[Composition, ...] = ()
    bindings: tuple[Synapse, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "members", frozenset(self.members))
        object.__setattr__(self, "parts", tuple(self.parts))
        for part in self.parts:
            if not part.members <= self.members:
                raise PictureError(f"part {part.id!r} has members outside {self.id!r}")
        for f, carrier in self.carriers:
            if not carrier <= self.members:
                raise PictureError(f"carrier of {f} lies outside {self.id!r}")
        if not self.parts:
            feats = self.features
            for f in feats:
                if f.asserted and f.negated() in feats:
                    raise PictureError(f"leaf picture {self.id!r} both asserts and denies {f.name!r}")

    # -- constructors ---------------------------------------------------------

    @classmethod
    def leaf(cls, id: str, members: Iterable[str], features: Iterable[Feature] = ()) -> Picture:
        """An undecomposed picture whose features are carried by all members."""
        members = frozenset(members)
        return cls(id, members, (), _carriers({f: members for f in features}))

    @classmethod
    def of_parts(cls, id: str, parts: Sequence[Picture],
                 features: Iterable[Feature] = ()) -> Picture:
        """A picture made of ``parts``; extra ``features`` are carried by all members."""
        members = frozenset().union(*(p.members for p in parts)) if parts else frozenset()
        table: dict[Feature, frozenset[str]] = {}
        for p in parts:
            for f, c in p.carriers:
                table[f] = table.get(f, frozenset()) | c
        for f in features:
            table[f] = table.get(f, frozenset()) | members
        return cls(id, members, tuple(parts), _carriers(table))

    # -- queries ----------------------------------------------------------------

    @property
    def features(self) -> frozenset[Feature]:
        return frozenset(f for f, _ in self.carriers)

    def carrier(self, feature: Feature) -> frozenset[str]:
        for f, c in self.carriers:
            if f == feature:
                return c
        return frozenset()

    def descendants(self) -> Iterator[Picture]:
        """Depth-first walk over declared parts (not including self)."""
        for p in self.parts:
            yield p
            yield from p.descendants()

    def find(self, part_id: str) -> Picture | None:
        if part_id == self.id:
            return self
        for p in self.descendants():
            if p.id == part_id:
                return p
        return None

    def leaves(self) -> list[Picture]:
        """Declared leaf parts, first occurrence per id."""
        if not self.parts:
            return [self]
        out: dict[str, Picture] = {}
        for p in self.descendants():
            if not p.parts and p.id not in out:
                out[p.id] = p
        return list(out.values())

    def __repr__(self):
        feats = ", ".join(map(str, sorted_features(self.features)))
        return f"Picture({self.id!r}, {len(self.members)} neurons, [{feats}])"


def empty_picture(id: str = "empty") -> Picture:
    return Picture(id, frozenset())


def synthetic_leaves(p: Picture) -> list[Picture]:
    return [Picture(f"{p.id}[{n}]", frozenset([n])) for n in sorted(p.members)]


Selector = Union[None, str, Feature, Callable[[Feature], bool]]


def decompose(p: Picture, selector: Selector = None) -> list[Picture]:
    """Cut ``p`` into the parts picked by ``selector``.

    ``None`` selects every immediate part, a string selects the (possibly
    nested) part with that id, and a Feature or a predicate over features
    selects the immediate parts carrying a matching tag.
    """
    if not p.parts and len(p.members) <= 1:
        raise PictureError(f"picture {p.id!r} has nothing to select")
    candidates = list(p.parts) if p.parts else synthetic_leaves(p)
    if selector is None:
        return candidates
    if isinstance(selector, str):
        found = p.find(selector) if p.parts else None
        if found is None or found is p:
            found = next((c for c in candidates if c.id == selector), None)
        if found is None:
            raise PictureError(f"picture {p.id!r} has no part {selector!r}")
        return [found]
    pred = (lambda f: f == selector) if isinstance(selector, Feature) else selector
    picked = [c for c in candidates if any(pred(f) for f in c.features)]
    if not picked:
        raise PictureError(f"no part of {p.id!r} carries a matching feature")
    return picked


# -- composition -----------------------------------------------------------------

@dataclass(frozen=True)
class BindingLink:
    """Glue from a part (or neuron) of the left operand to one of the right.

    ``left`` and ``right`` name a part id, a neuron id, or the operand itself.
    With ``reverse`` the edges run right to left.
    """

    left: str
    right: str
    polarity: Polarity = Polarity.EXCITATORY
    weight: float = 1.0
    reverse: bool = False


@dataclass(frozen=True)
class Binding:
    links: tuple[BindingLink, ...] = ()
    conflict_policy: ConflictPolicy = ConflictPolicy.LEFT_WINS


def _resolve(p: Picture, ref: str) -> frozenset[str]:
    part = p.find(ref)
    if part is not None:
        return part.members
    if ref in p.members:
        return frozenset([ref])
    raise PictureError(f"binding references unknown part {ref!r} of {p.id!r}")


def fan_out(src: Iterable[str], dst: Iterable[str], polarity: Polarity, weight: float,
            kind: SynapseKind = SynapseKind.BINDING) -> list[Synapse]:
    """All-to-all edges from src to dst carrying ``weight`` in total per target."""
    src, dst = sorted(src), sorted(dst)
    if not src:
        return []
    w = weight / len(src)
    return [Synapse(a, b, polarity, w, kind) for a in src for b in dst if a != b]


def conflicts(left: Picture, right: Picture) -> list[tuple[Feature, Feature]]:
    """(left feature, right feature) pairs that assert/deny the same name."""
    rf = right.features
    return [(f, f.negated()) for f in sorted_features(left.features) if f.negated() in rf]


def compose(left: Picture, right: Picture, binding: Binding = Binding(),
            id: str | None = None) -> Picture:
    """Put two pictures together; the order of operands matters.

    The glue edges from ``binding`` are recorded on the result (see
    :func:`realize`).  Under ``left-wins`` the right operand's conflicting
    feature carrier is silenced by inhibitory edges from the left carrier and
    the right tag is dropped; ``right-wins`` mirrors this; ``keep-both``
    keeps both tags and adds no edges.
    """
    policy = ConflictPolicy(binding.conflict_policy)
    edges: list[Synapse] = []
    for link in binding.links:
        if link.weight < 0:
            raise PictureError("binding weights must be >= 0")
        a, b = _resolve(left, link.left), _resolve(right, link.right)
        if link.reverse:
            a, b = b, a
        edges.extend(fan_out(a, b, link.polarity, link.weight))

    dropped_left: set[Feature] = set()
    dropped_right: set[Feature] = set()
    clashes = conflicts(left, right)
    for lf, rf in clashes:
        if policy is ConflictPolicy.LEFT_WINS:
            dropped_right.add(rf)
            edges.extend(fan_out(left.carrier(lf), right.carrier(rf) - left.members,
                                 Polarity.INHIBITORY, VETO_WEIGHT))
        elif policy is ConflictPolicy.RIGHT_WINS:
            dropped_left.add(lf)
            edges.extend(fan_out(right.carrier(rf), left.carrier(lf) - right.members,
                                 Polarity.INHIBITORY, VETO_WEIGHT))

    table: dict[Feature, frozenset[str]] = {}
    for p, dropped in ((left, dropped_left), (right, dropped_right)):
        for f, c in p.carriers:
            if f not in dropped:
                table[f] = table.get(f, frozenset()) | c
    record = Composition(left.id, right.id, policy,
                         tuple(f"{lf}/{rf}" for lf, rf in clashes))
    return Picture(
        id or f"({left.id}+{right.id})",
        left.members | right.members,
        (left, right),
        _carriers(table),
        left.provenance + right.provenance + (record,),
        left.bindings + right.bindings + tuple(edges),
    )


def realize(graph: NeuronGraph, picture: Picture) -> NeuronGraph:
    """The working graph for ``picture``: ``graph`` plus its composition edges."""
    return graph.with_synapses(picture.bindings) if picture.bindings else graph


# -- abstraction and attention ------------------------------------------------------

def abstraction_view(observer: Picture, target: Picture, graph: NeuronGraph) -> Picture:
    """The largest part of ``target`` that ``observer`` sees.

    A target neuron is seen when the observer's excitatory weight into it
    exceeds its inhibitory weight into it.  Returns ``target`` itself when
    every member is seen and an empty picture when none is.
    """
    pos = dict.fromkeys(target.members, 0.0)
    neg = dict.fromkeys(target.members, 0.0)
    touched = False
    for n in observer.members:
        for s in graph.outgoing(n):
            if s.target in pos and s.target not in observer.members:
                touched = True
                if s.excitatory:
                    pos[s.target] += s.weight
                else:
                    neg[s.target] += s.weight
    if not touched:
        raise NoViewError(f"{observer.id!r} has no connections into {target.id!r}")
    seen = {m for m in target.members if pos[m] > neg[m]}
    if seen == target.members:
        return target
    best = None
    for part in [*target.descendants(), *synthetic_leaves(target)]:
        if part.members and part.members <= seen:
            key = (-len(part.members), part.id)
            if best is None or key < best[0]:
                best = (key, part)
    return best[1] if best else empty_picture(f"{target.id}/none")


def focus(targets: Iterable[Picture], graph: NeuronGraph, off_gain: float = 0.0) -> AttentionMask:
    """Full gain on the targets' neurons and the edges among them, ``off_gain`` elsewhere."""
    if not 0.0 <= off_gain < 1.0:
        raise ValueError(f"off_gain must be in [0, 1), got {off_gain!r}")
    on: set[str] = set()
    for t in targets:
        on |= t.members
    neuron_gain = {n: off_gain for n in graph.neurons if n not in on}
    edge_gain = {k: off_gain for k in graph.synapses
                 if not (k.source in on and k.target in on)}
    return AttentionMask(neuron_gain, edge_gain)


def focus_ids(pictures: dict[str, Picture], ids: Iterable[str], graph: NeuronGraph,
              off_gain: float = 0.0) -> AttentionMask:
    targets = []
    for i in ids:
        if i not in pictures:
            raise KeyError(f"unknown picture or part {i!r}")
        targets.append(pictures[i])
    return focus(targets, graph, off_gain)


@dataclass(frozen=True, order=True)
class Contradiction:
    first: str
    second: str


def _inhibits(graph: NeuronGraph, src: frozenset[str], dst: frozenset[str]) -> bool:
    for n in src:
        for s in graph.outgoing(n):
            if not s.excitatory and s.target in dst and s.weight > 0:
                return True
    return False


def consistency_report(p: Picture, mask: AttentionMask, graph: NeuronGraph) -> list[Contradiction]:
    """Pairs of visible leaf parts of ``p`` that inhibit each other both ways.

    A part is visible when every one of its neurons has positive gain, so
    attention can hide a contradiction by dimming either side.
    """
    leaves = sorted((q for q in p.leaves() if q is not p), key=lambda q: q.id)
    visible = [q for q in leaves
               if q.members and all(mask.neuron(n) > 0 for n in q.members)]
    out = []
    for a, b in combinations(visible, 2):
        if a.members & b.members:
            continue
        if _inhibits(graph, a.members, b.members) and _inhibits(graph, b.members, a.members):
            out.append(Contradiction(a.id, b.id))
    return out


__all__ = [
    "Binding", "BindingLink", "Composition", "ConflictPolicy", "Contradiction", "Feature",
    "NoViewError", "Picture", "PictureError", "SynapseKey", "VETO_WEIGHT", "abstraction_view",
    "compose", "conflicts", "consistency_report", "decompose", "empty_picture", "fan_out",
    "focus", "focus_ids", "realize", "sorted_features", "synthetic_leaves",
]
