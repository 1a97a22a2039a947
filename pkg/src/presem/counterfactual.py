"""Counterfactual evaluation: retrieve, filter, select, compose, simulate, read off.

"If A were the case, C would hold" is evaluated against a present situation
and a memory of pictures.  Pictures sharing nothing with the query are
dropped, pictures in conflict with the situation are too distant, the rest
are ranked by how well they serve the goals.  The best picture (or, when no
single picture supplies the whole consequent, fragments cut from several)
is composed onto the situation and the resulting network is run with the
antecedent held on.  The consequent is read off the fixpoint.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from itertools import permutations
from math import factorial
from typing import Iterable, Sequence

from .learning import accessibility
from .pictures import (Binding, BindingLink, ConflictPolicy, Feature, Picture, PictureError,
                       compose, decompose, realize, sorted_features)
from .scenario import Scenario, checked
from .substrate import (AttentionMask, NeuronGraph, Trace, TraceStatus,
                        group_activation, run)

MAX_FRAGMENTS = 5


class Status(str, enum.Enum):
    HOLDS = "holds"
    FAILS = "fails"
    NO_APPLICABLE = "no-applicable-picture"
    NON_TERMINATING = "non-terminating"


@dataclass(frozen=True)
class Verdict:
    status: Status
    chosen: tuple[str, ...]
    outcome_features: frozenset[Feature]
    explanation: tuple[dict, ...]
    trace: Trace | None
    order: tuple[str, ...] = ()
    plan: Picture | None = field(default=None, compare=False, repr=False)

    def excluded(self) -> dict[str, dict]:
        """Picture id -> the explanation step that excluded it."""
        return {s["picture"]: s for s in self.explanation if s.get("decision") == "excluded"}


def _log(log: list | None, **step):
    if log is not None:
        log.append(step)


# -- pipeline steps -------------------------------------------------------------------

def distance(p: Picture, situation: Picture) -> int:
    """Number of features asserted by one picture and denied by the other."""
    other = situation.features
    return sum(1 for f in p.features if f.negated() in other)


def retrieve(memory: Sequence[Picture], antecedent: Iterable[Feature], mask: AttentionMask,
             graph: NeuronGraph, *, consequent: Iterable[Feature] = (),
             cue: Picture | None = None, log: list | None = None) -> list[Picture]:
    """Pictures that share a feature name with the query or receive signal from ``cue``.

    A picture whose every neuron is dimmed to gain 0 is not found at all.
    """
    names = {f.name for f in antecedent} | {f.name for f in consequent}
    scores = {}
    if cue is not None and cue.members:
        scores = {p.id: s for p, s in accessibility(memory, graph, cue)}
    kept = []
    for p in memory:
        if p.members and all(mask.neuron(n) == 0 for n in p.members):
            _log(log, step="retrieve", picture=p.id, decision="excluded", reason="irrelevant",
                 detail="masked")
            continue
        overlap = sorted({f.name for f in p.features} & names)
        score = scores.get(p.id, 0.0)
        if overlap or score > 0:
            kept.append(p)
            _log(log, step="retrieve", picture=p.id, decision="kept", overlap=overlap,
                 accessibility=score)
        else:
            _log(log, step="retrieve", picture=p.id, decision="excluded", reason="irrelevant")
    return kept


def applicability_filter(candidates: Sequence[Picture], situation: Picture, d_max: int = 0,
                         *, min_fallback: bool = False, log: list | None = None) -> list[Picture]:
    """Keep candidates within ``d_max`` conflicts of the situation.

    With ``min_fallback`` and nothing within ``d_max``, the candidates at the
    smallest distance are kept instead.
    """
    if d_max < 0:
        raise ValueError("d_max must be >= 0")
    dist = {p.id: distance(p, situation) for p in candidates}
    limit = d_max
    if min_fallback and candidates and min(dist.values()) > d_max:
        limit = min(dist.values())
    kept = []
    for p in candidates:
        if dist[p.id] <= limit:
            kept.append(p)
            _log(log, step="filter", picture=p.id, decision="kept", distance=dist[p.id])
        else:
            _log(log, step="filter", picture=p.id, decision="excluded", reason="too-distant",
                 distance=dist[p.id])
    return kept


def goal_score(p: Picture | Iterable[Feature], goals: Sequence[tuple[Feature, float]]) -> float:
    feats = p.features if isinstance(p, Picture) else frozenset(p)
    score = 0.0
    for g, w in goals:
        if g in feats:
            score += w
        elif g.negated() in feats:
            score -= w
    return score


def select(applicable: Sequence[Picture], goals: Sequence[tuple[Feature, float]],
           situation: Picture | None = None) -> list[Picture]:
    """Rank by goal score, then by fewer conflicts with the situation, then by id."""
    def key(p):
        d = distance(p, situation) if situation is not None else 0
        return (-goal_score(p, goals), d, p.id)
    return sorted(applicable, key=key)


# -- evaluation -------------------------------------------------------------------------

@dataclass
class _Plan:
    scenario: Scenario
    graph: NeuronGraph
    mask: AttentionMask
    hypothetical: Picture
    anchors: tuple[str, ...]
    consequent: tuple[Feature, ...]
    goals: list[tuple[Feature, float]]
    chosen: list[Picture]
    fragments: list[Picture]
    log: list[dict]
    max_ticks: int
    rho: float


def _hypothetical(scenario: Scenario, situation: Picture,
                  antecedent: Sequence[Feature]) -> tuple[Picture, tuple[str, ...]]:
    """The situation revised by the antecedent: contradicted parts leave, antecedent groups join."""
    index = scenario.picture_index()
    negs = {f.negated() for f in antecedent}
    parts = {p.id: p for p in situation.parts if not (p.features & negs)}
    anchors = []
    for f in antecedent:
        for g in scenario.carrier_groups(f):
            parts[g] = index[g]
            anchors.append(g)
    table = {}
    for f, c in situation.carriers:
        if f not in negs:
            table[f] = c
    for f in antecedent:
        c = frozenset()
        for g in scenario.carrier_groups(f):
            c |= index[g].members
        table[f] = table.get(f, frozenset()) | c
    ordered = [parts[k] for k in sorted(parts)]
    members = frozenset().union(*(p.members for p in ordered)) if ordered else frozenset()
    table = {f: c & members for f, c in table.items()}
    hyp = Picture("hypothetical", members, tuple(ordered),
                  tuple((f, table[f]) for f in sorted_features(table)))
    return hyp, tuple(sorted(set(anchors)))


def _fragments(ranked: Sequence[Picture], consequent: Sequence[Feature],
               log: list) -> tuple[list[Picture], list[Picture]]:
    """Pick the top picture, plus lower-ranked ones that supply missing consequent features.

    A lone picture is used whole.  When several are needed, each one is cut
    down to its parts carrying the consequent features it contributes.
    """
    needed = set(consequent)
    chosen: list[tuple[Picture, set[Feature]]] = []
    covered: set[Feature] = set()
    for i, p in enumerate(ranked):
        contrib = (needed - covered) & p.features
        if i == 0 or contrib:
            chosen.append((p, contrib))
            covered |= contrib
    if len(chosen) == 1:
        return [chosen[0][0]], [chosen[0][0]]
    fragments = []
    for p, contrib in chosen:
        if not contrib or not p.parts:
            fragments.append(p)
            _log(log, step="cut", picture=p.id, fragments=[p.id], covers=[])
            continue
        try:
            pieces = decompose(p, lambda f, c=contrib: f in c)
        except PictureError:
            pieces = [p]
        fragments.extend(pieces)
        _log(log, step="cut", picture=p.id, fragments=[q.id for q in pieces],
             covers=[str(f) for f in sorted_features(contrib)])
    return [p for p, _ in chosen], fragments


def _prepare(scenario: Scenario, case: str | None, *, theta: float | None, d_max: int,
             min_fallback: bool, max_ticks: int, rho: float) -> _Plan | Verdict:
    scenario = checked(scenario)
    if scenario.query is None:
        raise ValueError("scenario has no query")
    graph = scenario.graph(theta if theta is not None else 1.0)
    mask = scenario.mask(graph)
    antecedent, consequent = scenario.query.antecedent, scenario.query.consequent
    goals = scenario.goal_list()
    log: list[dict] = []
    situation = scenario.situation(case)
    hyp, anchors = _hypothetical(scenario, situation, antecedent)
    index = scenario.picture_index()
    cue = Picture.of_parts("antecedent", [index[g] for g in anchors]) if anchors else None

    memory = scenario.memory()
    found = retrieve(memory, antecedent, mask, graph, consequent=consequent, cue=cue, log=log)
    applicable = applicability_filter(found, hyp, d_max, min_fallback=min_fallback, log=log)
    ranked = select(applicable, goals, hyp)
    plan = _Plan(scenario, graph, mask, hyp, anchors, consequent, goals, [], [], log,
                 max_ticks, rho)
    if not ranked:
        _log(log, step="select", decision="none", reason="no applicable picture")
        return plan
    chosen, fragments = _fragments(ranked, consequent, log)
    chosen_ids = {p.id for p in chosen}
    for rank, p in enumerate(ranked, 1):
        score = goal_score(p, goals)
        if p.id in chosen_ids:
            _log(log, step="select", picture=p.id, decision="chosen", rank=rank, score=score)
        else:
            _log(log, step="select", picture=p.id, decision="excluded", reason="outranked",
                 rank=rank, score=score)
    plan.chosen, plan.fragments = chosen, fragments
    return plan


def _simulate(plan: _Plan, ordered: Sequence[Picture]) -> Verdict:
    log = list(plan.log)
    left = plan.hypothetical
    theta = plan.graph.theta
    anchors = plan.anchors or (plan.hypothetical.id,)
    for frag in ordered:
        links = tuple(BindingLink(a, frag.id, weight=theta) for a in anchors)
        before = left
        left = compose(left, frag, Binding(links, ConflictPolicy.LEFT_WINS))
        _log(log, step="compose", left=before.id, right=frag.id, policy="left-wins",
             conflicts=list(left.provenance[-1].conflicts))

    graph = realize(plan.graph, left)
    trace = run(graph, plan.hypothetical.members, plan.mask, plan.max_ticks)
    _log(log, step="simulate", status=trace.status.value, ticks=len(trace) - 1)

    outcome: set[Feature] = set()
    for g in plan.scenario.groups:
        if g.features and group_activation(trace.final, graph.group(g.name), plan.rho):
            outcome.update(g.features)
    outcome_fs = frozenset(outcome)
    chosen = tuple(p.id for p in plan.chosen)
    order = tuple(p.id for p in ordered)

    if not plan.chosen:
        return Verdict(Status.NO_APPLICABLE, (), outcome_fs, tuple(log), trace, (), left)
    if trace.status is not TraceStatus.FIXPOINT:
        return Verdict(Status.NON_TERMINATING, chosen, outcome_fs, tuple(log), trace, order, left)

    active = {str(f): f in outcome_fs for f in plan.consequent}
    _log(log, step="read-off", consequent=active)
    frag_features = frozenset().union(*(p.features for p in ordered))
    score = goal_score(frag_features, plan.goals)
    against = [g for g, _ in plan.goals if g.negated() in frag_features]
    carriers = sorted({name for g in against for name in plan.scenario.carrier_groups(g.negated())
                       if left.find(name) is not None})
    _log(log, step="goal-check", score=score, goals_denied=[str(g) for g in against],
         carriers=carriers)
    ok = all(active.values()) and score >= 0
    return Verdict(Status.HOLDS if ok else Status.FAILS, chosen, outcome_fs, tuple(log), trace,
                   order, left)


def _ordering(fragments: Sequence[Picture], order) -> list[Picture]:
    if order in (None, "given"):
        return list(fragments)
    if isinstance(order, int):
        k = order
    elif isinstance(order, (tuple, list)) and len(order) == 2 and order[0] == "permute-index":
        k = int(order[1])
    elif isinstance(order, str) and order.startswith("permute-index"):
        k = int(order.split(":", 1)[1] if ":" in order else order.split()[1])
    else:
        raise ValueError(f"unknown order directive {order!r}")
    n = factorial(len(fragments))
    if not 0 <= k < n:
        raise ValueError(f"permutation index {k} out of range 0..{n - 1}")
    return list(next(p for i, p in enumerate(permutations(fragments)) if i == k))


def evaluate(scenario: Scenario, order="given", *, case: str | None = None,
             theta: float | None = None, d_max: int = 0, min_fallback: bool = False,
             max_ticks: int = 64, rho: float = 0.5) -> Verdict:
    """Evaluate the scenario's query and return exactly one verdict.

    ``order`` is ``"given"`` (fragments in rank order) or
    ``("permute-index", k)`` for the k-th permutation of the fragments.
    The situation is always the leftmost composition operand.
    """
    plan = _prepare(scenario, case, theta=theta, d_max=d_max, min_fallback=min_fallback,
                    max_ticks=max_ticks, rho=rho)
    return _simulate(plan, _ordering(plan.fragments, order))


@dataclass(frozen=True)
class OrderComparison:
    fragments: tuple[str, ...]
    results: tuple[tuple[tuple[str, ...], Verdict], ...]
    agree: bool


def compare_orders(scenario: Scenario, *, case: str | None = None, theta: float | None = None,
                   d_max: int = 0, min_fallback: bool = False, max_ticks: int = 64,
                   rho: float = 0.5) -> OrderComparison:
    """Evaluate every composition order of the fragments and say whether they agree.

    Orders agree when all verdicts share status and outcome features.
    """
    plan = _prepare(scenario, case, theta=theta, d_max=d_max, min_fallback=min_fallback,
                    max_ticks=max_ticks, rho=rho)
    if len(plan.fragments) > MAX_FRAGMENTS:
        raise ValueError(f"{len(plan.fragments)} fragments exceed the bound of {MAX_FRAGMENTS}")
    results = []
    for perm in permutations(plan.fragments):
        v = _simulate(plan, perm)
        results.append((tuple(p.id for p in perm), v))
    if not results:
        results.append(((), _simulate(plan, [])))
    first = results[0][1]
    agree = all(v.status == first.status and v.outcome_features == first.outcome_features
                for _, v in results)
    return OrderComparison(tuple(p.id for p in plan.fragments), tuple(results), agree)


__all__ = [
    "MAX_FRAGMENTS", "OrderComparison", "Status", "Verdict", "applicability_filter",
    "compare_orders", "distance", "evaluate", "goal_score", "retrieve", "select",
]
