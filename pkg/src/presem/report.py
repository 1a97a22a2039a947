"""JSON documents for verdicts, order comparisons, path reports and learning runs.

All output is byte-deterministic: keys are sorted, feature and neuron lists
are sorted, and floats are written with ``repr`` precision.
"""
from __future__ import annotations

import json
from typing import Any

from .counterfactual import OrderComparison, Verdict
from .paths import Path, SignalReport
from .pictures import sorted_features
from .substrate import Trace


def _dump(doc: Any) -> bytes:
    return (json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def trace_doc(trace: Trace | None) -> dict:
    if trace is None:
        return {"status": None, "ticks": []}
    return {"status": trace.status.value, "ticks": [sorted(s) for s in trace.snapshots]}


def verdict_doc(v: Verdict) -> dict:
    return {
        "status": v.status.value,
        "chosen": list(v.chosen),
        "order": list(v.order),
        "outcome_features": [str(f) for f in sorted_features(v.outcome_features)],
        "explanation": [dict(step) for step in v.explanation],
        "trace": trace_doc(v.trace),
    }


def emit_trace(v: Verdict) -> bytes:
    """The verdict with its tick-by-tick firing record as a JSON document."""
    return _dump(verdict_doc(v))


def emit_comparison(c: OrderComparison) -> bytes:
    return _dump({
        "fragments": list(c.fragments),
        "agree": c.agree,
        "orders": [{"order": list(order), "verdict": verdict_doc(v)} for order, v in c.results],
    })


def path_doc(p: Path) -> dict:
    return {
        "nodes": list(p.nodes),
        "sign": p.sign,
        "strength": p.strength,
        "edges": [{"source": e.source, "target": e.target, "polarity": int(e.polarity),
                   "weight": e.weight} for e in p.edges],
    }


def emit_signal(report: SignalReport, paths: list[Path]) -> bytes:
    return _dump({
        "direct_contribution": report.direct_contribution,
        "indirect_contribution": report.indirect_contribution,
        "total": report.total,
        "path_count_positive": report.path_count_positive,
        "path_count_negative": report.path_count_negative,
        "paths": [path_doc(p) for p in paths],
    })


def emit(doc: Any) -> bytes:
    return _dump(doc)
