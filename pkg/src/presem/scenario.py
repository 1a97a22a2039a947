"""Scenario declarations and their resolution into graphs and pictures.

A :class:`Scenario` is a plain value holding what a scenario file declares.
Collections are kept in canonical order (by kind-specific id), so two
scenarios with the same declarations compare equal regardless of the order
they were written in.  Source locations are carried for diagnostics but do
not take part in equality.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

from .pictures import Feature, Picture, PictureError, focus_ids, sorted_features
from .substrate import (ALL_ON, AttentionMask, GroupSpec, LinkSpec, NeuronGraph, Polarity,
                        SynapseKind, build_graph)

ERROR_KINDS = ("syntax", "unknown-reference", "duplicate-id", "range", "arity")


@dataclass(frozen=True)
class Loc:
    line: int
    column: int


@dataclass(frozen=True)
class Diagnostic:
    line: int
    column: int
    message: str
    kind: str

    def __str__(self):
        return f"{self.line}:{self.column}: {self.kind}: {self.message}"


class ScenarioError(ValueError):
    """Raised with every diagnostic collected for an invalid scenario."""

    def __init__(self, diagnostics: list[Diagnostic], origin: str = "<scenario>"):
        self.diagnostics = list(diagnostics)
        self.origin = origin
        first = self.diagnostics[0] if self.diagnostics else None
        super().__init__(f"{origin}:{first}" if first else origin)

    @property
    def line(self):
        return self.diagnostics[0].line

    @property
    def column(self):
        return self.diagnostics[0].column

    @property
    def kind(self):
        return self.diagnostics[0].kind


def _noloc():
    return field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class GroupDecl:
    name: str
    size: int = 1
    features: tuple[Feature, ...] = ()
    loc: Loc | None = _noloc()
    size_loc: Loc | None = _noloc()

    def __post_init__(self):
        object.__setattr__(self, "features", tuple(sorted_features(set(self.features))))


@dataclass(frozen=True)
class LinkDecl:
    source: str
    target: str
    polarity: Polarity
    weight: float
    kind: SynapseKind | None = None
    loc: Loc | None = _noloc()
    source_loc: Loc | None = _noloc()
    target_loc: Loc | None = _noloc()
    weight_loc: Loc | None = _noloc()

    def __post_init__(self):
        object.__setattr__(self, "polarity", Polarity(self.polarity))
        object.__setattr__(self, "weight", float(self.weight))
        if self.kind is not None:
            object.__setattr__(self, "kind", SynapseKind(self.kind))

    @property
    def key(self):
        return (self.source, self.target, -int(self.polarity))


@dataclass(frozen=True)
class PictureDecl:
    name: str
    parts: tuple[str, ...]
    features: tuple[Feature, ...] = ()
    loc: Loc | None = _noloc()
    part_locs: tuple[Loc, ...] = _noloc()

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))
        object.__setattr__(self, "features", tuple(sorted_features(set(self.features))))


@dataclass(frozen=True)
class SituationDecl:
    features: tuple[Feature, ...] = ()
    case: str | None = None
    loc: Loc | None = _noloc()

    def __post_init__(self):
        object.__setattr__(self, "features", tuple(sorted_features(set(self.features))))


@dataclass(frozen=True)
class GoalDecl:
    feature: Feature
    weight: float
    loc: Loc | None = _noloc()
    weight_loc: Loc | None = _noloc()

    def __post_init__(self):
        object.__setattr__(self, "weight", float(self.weight))


@dataclass(frozen=True)
class QueryDecl:
    antecedent: tuple[Feature, ...]
    consequent: tuple[Feature, ...]
    loc: Loc | None = _noloc()
    feature_locs: tuple[tuple[Feature, Loc], ...] = _noloc()

    def __post_init__(self):
        object.__setattr__(self, "antecedent", tuple(sorted_features(set(self.antecedent))))
        object.__setattr__(self, "consequent", tuple(sorted_features(set(self.consequent))))


@dataclass(frozen=True)
class AttentionDecl:
    focus: tuple[str, ...]
    off_gain: float = 0.0
    loc: Loc | None = _noloc()
    focus_locs: tuple[Loc, ...] = _noloc()
    gain_loc: Loc | None = _noloc()

    def __post_init__(self):
        object.__setattr__(self, "focus", tuple(self.focus))
        object.__setattr__(self, "off_gain", float(self.off_gain))


def _case_key(s: SituationDecl):
    return (s.case is not None, s.case or "")


@dataclass(frozen=True, eq=True)
class Scenario:
    name: str = ""
    groups: tuple[GroupDecl, ...] = ()
    links: tuple[LinkDecl, ...] = ()
    pictures: tuple[PictureDecl, ...] = ()
    situations: tuple[SituationDecl, ...] = ()
    goals: tuple[GoalDecl, ...] = ()
    query: QueryDecl | None = None
    attention: AttentionDecl | None = None
    origin: str = field(default="<scenario>", compare=False, repr=False)

    def __post_init__(self):
        canon = {
            "groups": sorted(self.groups, key=lambda g: g.name),
            "links": sorted(self.links, key=lambda l: l.key),
            "pictures": sorted(self.pictures, key=lambda p: p.name),
            "situations": sorted(self.situations, key=_case_key),
            "goals": sorted(self.goals, key=lambda g: g.feature.sort_key()),
        }
        for k, v in canon.items():
            object.__setattr__(self, k, tuple(v))

    __hash__ = None

    # -- lookups --------------------------------------------------------------------

    @cached_property
    def group_table(self) -> dict[str, GroupDecl]:
        return {g.name: g for g in self.groups}

    @cached_property
    def picture_table(self) -> dict[str, PictureDecl]:
        return {p.name: p for p in self.pictures}

    def cases(self) -> list[str | None]:
        return [s.case for s in self.situations]

    def universe(self) -> frozenset[Feature]:
        """Every feature tag declared on a group, picture or situation."""
        out: set[Feature] = set()
        for g in self.groups:
            out.update(g.features)
        for p in self.pictures:
            out.update(p.features)
        for s in self.situations:
            out.update(s.features)
        return frozenset(out)

    def carrier_groups(self, feature: Feature) -> list[str]:
        return [g.name for g in self.groups if feature in g.features]

    # -- resolution -------------------------------------------------------------------

    def graph(self, theta: float = 1.0, w_int: float = 1.0) -> NeuronGraph:
        return build_graph(
            [GroupSpec(g.name, g.size) for g in self.groups],
            [LinkSpec(l.source, l.target, l.polarity, l.weight, l.kind or SynapseKind.ASSOCIATION)
             for l in self.links],
            w_int=w_int, theta=theta)

    @cached_property
    def _members(self) -> dict[str, frozenset[str]]:
        from .substrate import neuron_ids
        return {g.name: frozenset(neuron_ids(g.name, g.size)) for g in self.groups}

    def picture_index(self) -> dict[str, Picture]:
        """Leaf pictures for groups plus every declared picture, keyed by id."""
        out: dict[str, Picture] = {
            g.name: Picture.leaf(g.name, self._members[g.name], g.features) for g in self.groups}
        decls = self.picture_table
        busy: set[str] = set()

        def resolve(name: str) -> Picture:
            if name in out:
                return out[name]
            if name in busy:
                raise PictureError(f"cyclic part reference through {name!r}")
            busy.add(name)
            d = decls[name]
            pic = Picture.of_parts(name, [resolve(p) for p in d.parts], d.features)
            busy.discard(name)
            out[name] = pic
            return pic

        for name in decls:
            resolve(name)
        return out

    def memory(self) -> list[Picture]:
        """Declared pictures that are not a part of another declared picture."""
        used = {part for p in self.pictures for part in p.parts}
        index = self.picture_index()
        return [index[p.name] for p in self.pictures if p.name not in used]

    def situation_decl(self, case: str | None = None) -> SituationDecl:
        if case is None:
            if not self.situations:
                return SituationDecl()
            if len(self.situations) > 1:
                raise KeyError(f"scenario declares cases {self.cases()}; choose one")
            return self.situations[0]
        for s in self.situations:
            if s.case == str(case):
                return s
        raise KeyError(f"unknown case {case!r}")

    def situation(self, case: str | None = None) -> Picture:
        """The present situation as a picture over the groups carrying its features."""
        decl = self.situation_decl(case)
        index = self.picture_index()
        parts: dict[str, Picture] = {}
        carriers: dict[Feature, frozenset[str]] = {}
        for f in decl.features:
            c: frozenset[str] = frozenset()
            for g in self.carrier_groups(f):
                parts[g] = index[g]
                c |= self._members[g]
            carriers[f] = c
        members = frozenset().union(*(p.members for p in parts.values())) if parts else frozenset()
        name = "situation" if decl.case is None else f"case-{decl.case}"
        return Picture(name, members, tuple(parts[k] for k in sorted(parts)),
                       tuple((f, carriers[f]) for f in sorted_features(carriers)))

    def mask(self, graph: NeuronGraph) -> AttentionMask:
        if self.attention is None:
            return ALL_ON
        return focus_ids(self.picture_index(), self.attention.focus, graph,
                         self.attention.off_gain)

    def goal_list(self) -> list[tuple[Feature, float]]:
        return [(g.feature, g.weight) for g in self.goals]


def validate(s: Scenario) -> list[Diagnostic]:
    """Reference, duplicate and range checks over a scenario."""
    diags: list[Diagnostic] = []

    def err(loc: Loc | None, kind: str, msg: str):
        loc = loc or Loc(1, 1)
        diags.append(Diagnostic(loc.line, loc.column, msg, kind))

    names: dict[str, str] = {}
    for g in s.groups:
        if g.name in names:
            err(g.loc, "duplicate-id", f"duplicate id {g.name!r}")
        names[g.name] = "group"
        if g.size < 1:
            err(g.size_loc or g.loc, "range", f"group {g.name!r} size must be >= 1")
        for f in g.features:
            if f.asserted and f.negated() in g.features:
                err(g.loc, "range", f"group {g.name!r} both asserts and denies {f.name!r}")
    for p in s.pictures:
        if p.name in names:
            err(p.loc, "duplicate-id", f"duplicate id {p.name!r}")
        names[p.name] = "picture"

    seen_links = set()
    for l in s.links:
        if l.key in seen_links:
            err(l.loc, "duplicate-id", f"duplicate link {l.source} {l.polarity.arrow} {l.target}")
        seen_links.add(l.key)
        for end, loc in ((l.source, l.source_loc), (l.target, l.target_loc)):
            if names.get(end) != "group":
                err(loc or l.loc, "unknown-reference", f"undeclared group {end!r}")
        if not (math.isfinite(l.weight) and l.weight >= 0):
            err(l.weight_loc or l.loc, "range", f"link weight {l.weight!r} must be >= 0")

    for p in s.pictures:
        if not p.parts:
            err(p.loc, "arity", f"picture {p.name!r} needs at least one part")
        locs = p.part_locs or ()
        for i, part in enumerate(p.parts):
            if part not in names:
                err(locs[i] if i < len(locs) else p.loc, "unknown-reference",
                    f"undeclared part {part!r}")
    if not diags:
        try:
            s.picture_index()
        except PictureError as e:
            bad = next((p for p in s.pictures), None)
            err(bad.loc if bad else None, "unknown-reference", str(e))

    cases = set()
    for sit in s.situations:
        if sit.case in cases:
            err(sit.loc, "duplicate-id" if sit.case is not None else "arity",
                f"duplicate situation {sit.case!r}" if sit.case is not None
                else "more than one situation without a case")
        cases.add(sit.case)
    if None in cases and len(cases) > 1:
        err(next(x.loc for x in s.situations if x.case is None), "arity",
            "mixing a plain situation with case situations")

    universe = s.universe()
    known = {f.name for f in universe}
    goal_seen = set()
    for g in s.goals:
        if g.feature in goal_seen:
            err(g.loc, "duplicate-id", f"duplicate goal {g.feature}")
        goal_seen.add(g.feature)
        if g.feature.name not in known:
            err(g.loc, "unknown-reference", f"goal feature {g.feature.name!r} is not declared")
        if not (math.isfinite(g.weight) and g.weight >= 0):
            err(g.weight_loc or g.loc, "range", f"goal weight {g.weight!r} must be >= 0")

    if s.query is not None:
        locs = dict(s.query.feature_locs or ())
        for f in (*s.query.antecedent, *s.query.consequent):
            if f.name not in known:
                err(locs.get(f, s.query.loc), "unknown-reference",
                    f"query feature {f.name!r} is not declared")
    if s.attention is not None:
        a = s.attention
        locs = a.focus_locs or ()
        for i, ref in enumerate(a.focus):
            if ref not in names:
                err(locs[i] if i < len(locs) else a.loc, "unknown-reference",
                    f"undeclared focus target {ref!r}")
        if not 0.0 <= a.off_gain < 1.0:
            err(a.gain_loc or a.loc, "range", f"off-gain {a.off_gain!r} must be in [0, 1)")
    diags.sort(key=lambda d: (d.line, d.column))
    return diags


def checked(s: Scenario) -> Scenario:
    diags = validate(s)
    if diags:
        raise ScenarioError(diags, s.origin)
    return s


def features(items: Iterable[str]) -> tuple[Feature, ...]:
    return tuple(Feature.parse(x) for x in items)
