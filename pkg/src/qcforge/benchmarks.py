"""
Benchmark circuits and the timing harness.

Bucket-brigade QRAM over q = n + 2^(n+1) + 5 wires:

    a0..a{n-1}        address (a0 is the least significant address bit)
    r0..r{2^n-1}      routing: decoded one-hot address
    m0..m{2^n-1}      memory coupling: classical contents loaded by X gates
    bus, readout      data bus and output qubit
    aux0..aux2        spare ancillae (kept idle)

The routing tree is grown one address bit at a time with a Toffoli and a
CNOT per active node, the addressed cell is copied onto the bus, fanned out
to the readout, and everything except the readout is uncomputed.
"""
from __future__ import annotations

import csv
import random
import time
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from enum import Enum
from typing import TextIO

from .analysis import Metrics, metrics
from .errors import InvalidAddressSize, MemoryLengthMismatch, ResourceGuardExceeded
from .ir import Circuit, CircuitBuilder, GateKind, op
from .optimizers import cancel_cnot, cancel_hadamard, run_to_fixed_point
from .transpiler import NONE, decompose_toffoli

AUX_WIRES = ("bus", "readout", "aux0", "aux1", "aux2")
CSV_HEADER = ("scenario", "n", "qubits", "gates", "cnot", "h", "t", "t_depth", "depth", "elapsed_s")


def bb_qubit_count(n: int) -> int:
    return n + 2 ** (n + 1) + 5


@dataclass(frozen=True)
class QramSpec:
    n: int
    memory: tuple[int, ...]
    decomposition: str = NONE

    def __post_init__(self) -> None:
        if self.n < 2:
            raise InvalidAddressSize(f"address size must be >= 2, got {self.n}")
        object.__setattr__(self, "memory", tuple(int(bool(b)) for b in self.memory))
        if len(self.memory) != 2 ** self.n:
            raise MemoryLengthMismatch(f"memory has {len(self.memory)} cells, expected {2 ** self.n}")

    @classmethod
    def random(cls, n: int, seed: int = 0, decomposition: str = NONE) -> QramSpec:
        if n < 2:
            raise InvalidAddressSize(f"address size must be >= 2, got {n}")
        rng = random.Random(seed)
        return cls(n, tuple(rng.randint(0, 1) for _ in range(2 ** n)), decomposition)


def _routing(n: int, address, routing) -> list:
    ops = [op(GateKind.X, routing[0])]
    for i in range(n):
        span = 1 << i
        for j in range(span):
            ops.append(op(GateKind.TOFFOLI, address[i], routing[j], routing[j + span]))
            ops.append(op(GateKind.CNOT, routing[j + span], routing[j]))
    return ops


def synth_bucket_brigade(spec: QramSpec) -> Circuit:
    """Bucket-brigade read circuit; Toffolis are expanded when ``spec.decomposition`` is set."""
    n = spec.n
    cells = 2 ** n
    names = (
        [f"a{i}" for i in range(n)]
        + [f"r{j}" for j in range(cells)]
        + [f"m{j}" for j in range(cells)]
        + list(AUX_WIRES)
    )
    b = CircuitBuilder(names)
    address = [b.qubit(f"a{i}") for i in range(n)]
    routing = [b.qubit(f"r{j}") for j in range(cells)]
    memory = [b.qubit(f"m{j}") for j in range(cells)]
    bus, readout = b.qubit("bus"), b.qubit("readout")

    route = _routing(n, address, routing)
    load = [op(GateKind.X, memory[j]) for j in range(cells) if spec.memory[j]]
    fetch = [op(GateKind.TOFFOLI, routing[j], memory[j], bus) for j in range(cells)]

    b.extend(route)
    b.extend(load)
    b.extend(fetch)
    b.append(op(GateKind.CNOT, bus, readout))
    b.extend(reversed(fetch))
    b.extend(reversed(load))
    b.extend(reversed(route))
    circuit = b.build()
    if spec.decomposition != NONE:
        circuit = decompose_toffoli(circuit, spec.decomposition)
    return circuit


def synth_adder(bits: int) -> Circuit:
    """Ripple-carry adder B <- A + B mod 2^bits (majority / unmajority ladder).

    Registers a0.., b0.. (index 0 least significant) and one carry ancilla c0
    that is restored to 0.
    """
    if bits < 1:
        raise ValueError("adder needs at least one bit")
    names = [f"a{i}" for i in range(bits)] + [f"b{i}" for i in range(bits)] + ["c0"]
    b = CircuitBuilder(names)
    a = [b.qubit(f"a{i}") for i in range(bits)]
    s = [b.qubit(f"b{i}") for i in range(bits)]
    carry = [b.qubit("c0")] + a[:-1]

    def maj(x, y, z):
        return [op(GateKind.CNOT, z, y), op(GateKind.CNOT, z, x), op(GateKind.TOFFOLI, x, y, z)]

    def uma(x, y, z):
        return [op(GateKind.TOFFOLI, x, y, z), op(GateKind.CNOT, z, x), op(GateKind.CNOT, x, y)]

    for i in range(bits):
        b.extend(maj(carry[i], s[i], a[i]))
    for i in reversed(range(bits)):
        b.extend(uma(carry[i], s[i], a[i]))
    return b.build()


class Scenario(Enum):
    SYNTH = "synth"
    SYNTH_TRANSPILE = "synth-transpile"
    SYNTH_OPT = "synth-opt"


DEFAULT_GUARDS = {Scenario.SYNTH: 19, Scenario.SYNTH_TRANSPILE: 19, Scenario.SYNTH_OPT: 12}


@dataclass(frozen=True)
class BenchRecord:
    scenario: Scenario
    n: int
    qubits: int
    gate_count: int
    elapsed_seconds: float
    metrics: Metrics
    pre_opt: Metrics | None = None

    def csv_row(self) -> list[str]:
        m = self.metrics
        return [
            self.scenario.value, str(self.n), str(self.qubits), str(m.gate_count),
            str(m.cnot_count), str(m.h_count), str(m.t_count), str(m.t_depth),
            str(m.depth), f"{self.elapsed_seconds:.6f}",
        ]


def check_guard(scenario: Scenario, n_values: Iterable[int], guard: int | None = None) -> None:
    limit = DEFAULT_GUARDS[scenario] if guard is None else guard
    too_big = [n for n in n_values if n > limit]
    if too_big:
        raise ResourceGuardExceeded(
            f"{scenario.value}: n={max(too_big)} exceeds the resource guard n <= {limit}"
        )


def _pipeline(scenario: Scenario, spec: QramSpec, strategy: str) -> tuple[Circuit, Metrics | None]:
    circuit = synth_bucket_brigade(spec)
    if scenario is Scenario.SYNTH:
        return circuit, None
    circuit = decompose_toffoli(circuit, strategy)
    if scenario is Scenario.SYNTH_TRANSPILE:
        return circuit, None
    before = metrics(circuit)
    circuit, _ = run_to_fixed_point(circuit, (cancel_cnot, cancel_hadamard))
    return circuit, before


def run_bench(scenario: Scenario, n_range: Sequence[int], output: TextIO | None = None,
              strategy: str = "TDEPTH1_4ANC", guard: int | None = None, seed: int = 0,
              force: bool = False, progress=None) -> list[BenchRecord]:
    """Time one scenario for each address size; one CSV row per n.

    The clock covers synthesis plus the scenario's transpile/optimise steps
    only; metric collection and I/O are excluded.  Runs strictly sequentially.
    """
    n_values = list(n_range)
    if not force:
        check_guard(scenario, n_values, guard)
    writer = None
    if output is not None:
        writer = csv.writer(output, lineterminator="\n")
        writer.writerow(CSV_HEADER)
    records = []
    for n in n_values:
        spec = QramSpec.random(n, seed=seed + n)
        start = time.perf_counter()
        circuit, before = _pipeline(scenario, spec, strategy)
        elapsed = time.perf_counter() - start
        m = metrics(circuit)
        record = BenchRecord(scenario, n, bb_qubit_count(n), m.gate_count, elapsed, m, before)
        records.append(record)
        if writer is not None:
            writer.writerow(record.csv_row())
            output.flush()
        if progress is not None:
            progress(record)
    return records


def parse_range(text: str) -> range:
    """``"2..5"`` -> range(2, 6); a bare ``"7"`` is a single value."""
    if ".." in text:
        lo, hi = text.split("..", 1)
        lo_i, hi_i = int(lo), int(hi)
    else:
        lo_i = hi_i = int(text)
    if hi_i < lo_i:
        raise ValueError(f"empty range {text!r}")
    return range(lo_i, hi_i + 1)
