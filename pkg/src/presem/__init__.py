"""Picture semantics on a threshold-neuron substrate."""
from .counterfactual import OrderComparison, Status, Verdict, compare_orders, evaluate
from .dsl import ScenarioSource, load, parse, parse_episodes, serialize
from .learning import (Episode, PlasticityConfig, accessibility, apply_episodes, delta_update,
                       episodes_to_activation, use_strengthen)
from .paths import Equivalence, Path, SignalReport, effective_signal, enumerate_paths, \
    steady_state_equivalence_check
from .pictures import (Binding, BindingLink, ConflictPolicy, Contradiction, Feature, Picture,
                       abstraction_view, compose, consistency_report, decompose, focus, realize)
from .report import emit_trace
from .scenario import Diagnostic, Scenario, ScenarioError
from .substrate import (ALL_ON, ActivationState, AttentionMask, NeuronGraph, Polarity, Synapse,
                        SynapseKind, Trace, TraceStatus, build_graph, group_activation, run, step)

__version__ = "0.1.0"

__all__ = [
    "ALL_ON",
    "ActivationState",
    "AttentionMask",
    "Binding",
    "BindingLink",
    "ConflictPolicy",
    "Contradiction",
    "Diagnostic",
    "Episode",
    "Equivalence",
    "Feature",
    "NeuronGraph",
    "OrderComparison",
    "Path",
    "Picture",
    "PlasticityConfig",
    "Polarity",
    "Scenario",
    "ScenarioError",
    "ScenarioSource",
    "SignalReport",
    "Status",
    "Synapse",
    "SynapseKind",
    "Trace",
    "TraceStatus",
    "Verdict",
    "abstraction_view",
    "accessibility",
    "apply_episodes",
    "build_graph",
    "compare_orders",
    "compose",
    "consistency_report",
    "decompose",
    "delta_update",
    "effective_signal",
    "emit_trace",
    "enumerate_paths",
    "episodes_to_activation",
    "evaluate",
    "focus",
    "group_activation",
    "load",
    "parse",
    "parse_episodes",
    "realize",
    "run",
    "serialize",
    "steady_state_equivalence_check",
    "step",
    "use_strengthen",
]
