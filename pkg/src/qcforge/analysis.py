"""
Resource metrics and T-gate distribution.

All metrics are taken on a canonical schedule that depends only on the gate
dependency structure, never on how a circuit's moments were built:

    * every gate gets a T-stage: the largest number of T/T-dagger gates on a
      dependency path ending at it;
    * the T gates of one stage share a single moment, placed at the earliest
      time all of them are ready;
    * every other gate is scheduled as early as its predecessors allow.

With this layering the T-depth is the number of T-stages, which is how a
T-depth-1 Toffoli keeps its single column of seven phase gates.
"""
from __future__ import annotations

from collections.abc import Iterable
from dataclasses import asdict, dataclass, fields

from .ir import T_KINDS, Circuit, GateKind, Operation

METRIC_FIELDS = (
    "depth", "t_depth", "t_count", "h_count", "cnot_count",
    "toffoli_count", "gate_count", "qubit_count",
)


@dataclass(frozen=True)
class Metrics:
    depth: int = 0
    t_depth: int = 0
    t_count: int = 0
    h_count: int = 0
    cnot_count: int = 0
    toffoli_count: int = 0
    gate_count: int = 0
    qubit_count: int = 0

    def as_dict(self) -> dict[str, int]:
        return asdict(self)

    def report(self) -> str:
        """Flat ``key=value`` lines."""
        return "\n".join(f"{k}={v}" for k, v in self.as_dict().items())

    def summary(self) -> str:
        """One line with short keys, e.g. ``qubits=7 gates=28 cnot=18 h=3 t=7 t_depth=1 ...``."""
        return (
            f"qubits={self.qubit_count} gates={self.gate_count} cnot={self.cnot_count} "
            f"h={self.h_count} t={self.t_count} t_depth={self.t_depth} depth={self.depth} "
            f"toffoli={self.toffoli_count}"
        )


@dataclass(frozen=True)
class TDistribution:
    per_moment: tuple[int, ...]

    @property
    def total(self) -> int:
        return sum(self.per_moment)


def canonical_times(circuit: Circuit) -> tuple[list[Operation], list[int], list[int]]:
    """Operations in stream order with their canonical moment and T-stage."""
    ops = list(circuit.operations())
    stage_of_wire = [0] * circuit.num_qubits
    stages = []
    for o in ops:
        s = max(stage_of_wire[i] for i in o.indices)
        if o.kind in T_KINDS:
            s += 1
        for i in o.indices:
            stage_of_wire[i] = s
        stages.append(s)

    by_stage: dict[int, list[int]] = {}
    for pos, s in enumerate(stages):
        by_stage.setdefault(s, []).append(pos)

    times = [0] * len(ops)
    ready = [0] * circuit.num_qubits  # earliest free moment per wire
    for s in sorted(by_stage):
        members = by_stage[s]
        t_members = [p for p in members if ops[p].kind in T_KINDS]
        if t_members:
            layer = max(max(ready[i] for i in ops[p].indices) for p in t_members)
            for p in t_members:
                times[p] = layer
                ready[ops[p].indices[0]] = layer + 1
        for p in members:
            o = ops[p]
            if o.kind in T_KINDS:
                continue
            t = max(ready[i] for i in o.indices)
            times[p] = t
            for i in o.indices:
                ready[i] = t + 1
    return ops, times, stages


def metrics(circuit: Circuit) -> Metrics:
    ops, times, stages = canonical_times(circuit)
    counts: dict[GateKind, int] = {}
    for o in ops:
        counts[o.kind] = counts.get(o.kind, 0) + 1
    return Metrics(
        depth=max(times) + 1 if times else 0,
        t_depth=max(stages) if stages else 0,
        t_count=counts.get(GateKind.T, 0) + counts.get(GateKind.TDAG, 0),
        h_count=counts.get(GateKind.H, 0),
        cnot_count=counts.get(GateKind.CNOT, 0),
        toffoli_count=counts.get(GateKind.TOFFOLI, 0),
        gate_count=len(ops),
        qubit_count=circuit.num_qubits,
    )


def t_distribution(circuit: Circuit) -> TDistribution:
    ops, times, _ = canonical_times(circuit)
    per = [0] * (max(times) + 1 if times else 0)
    for o, t in zip(ops, times):
        if o.kind in T_KINDS:
            per[t] += 1
    return TDistribution(tuple(per))


def diff_metrics(before: Metrics, after: Metrics) -> dict[str, int]:
    """Signed per-field change ``after - before``."""
    return {f.name: getattr(after, f.name) - getattr(before, f.name) for f in fields(Metrics)}


def format_diff(delta: dict[str, int], keys: Iterable[str] | None = None) -> str:
    keys = list(keys) if keys is not None else list(delta)
    return " ".join(f"{k}={delta[k]:+d}" for k in keys)
