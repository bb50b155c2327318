"""Clifford+T circuit synthesis, transpilation, optimisation, analysis and verification."""

from .analysis import Metrics, TDistribution, diff_metrics, metrics, t_distribution
from .ir import (
    Circuit,
    CircuitBuilder,
    GateKind,
    GatePredicate,
    Moment,
    Operation,
    Qubit,
    SchedulePolicy,
    append,
    build_circuit,
    flag_gates,
    op,
)
from .textfmt import parse, serialize

__all__ = [
    "Circuit", "CircuitBuilder", "GateKind", "GatePredicate", "Metrics", "Moment",
    "Operation", "Qubit", "SchedulePolicy", "TDistribution", "append", "build_circuit",
    "diff_metrics", "flag_gates", "metrics", "op", "parse", "serialize", "t_distribution",
]

__version__ = "0.1.0"
