"""
Moment-based circuit representation.

Contains:
    - GateKind: the closed gate set (Clifford+T, Toffoli, mixed-polarity MCT)
    - Qubit, Operation, Moment, Circuit: immutable value types
    - CircuitBuilder: mutable accumulator used by synthesis and parsing
    - flag_gates / GatePredicate: attach integer flags to selected gates

Circuits are immutable; every pass returns a new one.  Operations list their
qubits controls-first, target-last.
"""
from __future__ import annotations

from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import cached_property

from .errors import (
    ArityMismatch,
    CircuitError,
    DuplicateQubitName,
    EmptyRegister,
    UnknownQubit,
)


class GateKind(Enum):
    X = "X"
    H = "H"
    S = "S"
    SDAG = "SDAG"
    T = "T"
    TDAG = "TDAG"
    CNOT = "CNOT"
    CZ = "CZ"
    TOFFOLI = "TOFFOLI"
    MPMCT = "MPMCT"

    @property
    def arity(self) -> int | None:
        """Fixed qubit count, or None for MPMCT (m controls + 1 target)."""
        return _ARITY[self]

    @property
    def num_controls(self) -> int | None:
        if self is GateKind.MPMCT:
            return None
        return {GateKind.CNOT: 1, GateKind.TOFFOLI: 2}.get(self, 0)


_ARITY = {
    GateKind.X: 1,
    GateKind.H: 1,
    GateKind.S: 1,
    GateKind.SDAG: 1,
    GateKind.T: 1,
    GateKind.TDAG: 1,
    GateKind.CNOT: 2,
    GateKind.CZ: 2,
    GateKind.TOFFOLI: 3,
    GateKind.MPMCT: None,
}

T_KINDS = frozenset({GateKind.T, GateKind.TDAG})
CLASSICAL_KINDS = frozenset({GateKind.X, GateKind.CNOT, GateKind.TOFFOLI, GateKind.MPMCT})


class SchedulePolicy(Enum):
    EARLIEST = "earliest"
    NEW_MOMENT = "new_moment"


@dataclass(frozen=True, slots=True)
class Qubit:
    name: str
    index: int

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class Operation:
    kind: GateKind
    qubits: tuple[Qubit, ...]
    polarities: tuple[bool, ...] | None = None
    flags: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        qubits = tuple(self.qubits)
        object.__setattr__(self, "qubits", qubits)
        arity = self.kind.arity
        if arity is None:
            if len(qubits) < 2:
                raise ArityMismatch(f"MPMCT needs at least one control, got {len(qubits)} qubits")
        elif len(qubits) != arity:
            raise ArityMismatch(f"{self.kind.value} takes {arity} qubits, got {len(qubits)}")
        if len({q.index for q in qubits}) != len(qubits):
            raise CircuitError(f"{self.kind.value} repeats a qubit: {[q.name for q in qubits]}")
        ncontrols = len(qubits) - 1 if arity is None else self.kind.num_controls
        if self.polarities is None:
            object.__setattr__(self, "polarities", (True,) * ncontrols)
        else:
            pols = tuple(bool(p) for p in self.polarities)
            if len(pols) != ncontrols:
                raise ArityMismatch(f"expected {ncontrols} polarities, got {len(pols)}")
            if self.kind is not GateKind.MPMCT and not all(pols):
                raise ArityMismatch(f"{self.kind.value} only supports positive controls")
            object.__setattr__(self, "polarities", pols)
        if not isinstance(self.flags, frozenset):
            object.__setattr__(self, "flags", frozenset(self.flags))

    @property
    def controls(self) -> tuple[Qubit, ...]:
        if self.kind in (GateKind.CNOT, GateKind.TOFFOLI, GateKind.MPMCT):
            return self.qubits[:-1]
        return ()

    @property
    def target(self) -> Qubit:
        return self.qubits[-1]

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(q.index for q in self.qubits)

    def with_flags(self, flags: Iterable[int]) -> Operation:
        return replace(self, flags=frozenset(flags))

    def add_flags(self, flags: Iterable[int]) -> Operation:
        return replace(self, flags=self.flags | frozenset(flags))

    def same_gate(self, other: Operation) -> bool:
        """True when both apply the same gate to the same qubits (flags ignored)."""
        return (
            self.kind is other.kind
            and self.qubits == other.qubits
            and self.polarities == other.polarities
        )

    def __str__(self) -> str:
        return f"{self.kind.value}({', '.join(q.name for q in self.qubits)})"


def op(kind: GateKind, *qubits: Qubit, polarities: Sequence[bool] | None = None,
       flags: Iterable[int] = ()) -> Operation:
    """Shorthand constructor: ``op(GateKind.CNOT, c, t)``."""
    return Operation(kind, qubits, None if polarities is None else tuple(polarities), frozenset(flags))


@dataclass(frozen=True, slots=True)
class Moment:
    operations: tuple[Operation, ...]

    def __post_init__(self) -> None:
        # ops in a moment commute; a canonical order makes equality structural
        ops = tuple(sorted(self.operations, key=lambda o: min(q.index for q in o.qubits)))
        object.__setattr__(self, "operations", ops)
        seen: set[int] = set()
        for o in ops:
            for q in o.qubits:
                if q.index in seen:
                    raise CircuitError(f"moment has overlapping supports on qubit {q.name}")
                seen.add(q.index)

    @property
    def support(self) -> frozenset[int]:
        return frozenset(q.index for o in self.operations for q in o.qubits)

    def __iter__(self) -> Iterator[Operation]:
        return iter(self.operations)

    def __len__(self) -> int:
        return len(self.operations)


@dataclass(frozen=True)
class Circuit:
    register: tuple[Qubit, ...]
    moments: tuple[Moment, ...] = ()

    def __post_init__(self) -> None:
        register = tuple(self.register)
        object.__setattr__(self, "register", register)
        object.__setattr__(self, "moments", tuple(self.moments))
        if not register:
            raise EmptyRegister("register must contain at least one qubit")
        names = set()
        for i, q in enumerate(register):
            if q.index != i:
                raise CircuitError(f"qubit {q.name} has index {q.index}, expected {i}")
            if q.name in names:
                raise DuplicateQubitName(q.name)
            names.add(q.name)
        n = len(register)
        for m in self.moments:
            for o in m.operations:
                for q in o.qubits:
                    if q.index >= n or register[q.index] != q:
                        raise UnknownQubit(q.name)

    @cached_property
    def _by_name(self) -> dict[str, Qubit]:
        return {q.name: q for q in self.register}

    def qubit(self, name: str) -> Qubit:
        try:
            return self._by_name[name]
        except KeyError:
            raise UnknownQubit(name) from None

    def has_qubit(self, name: str) -> bool:
        return name in self._by_name

    @property
    def qubit_names(self) -> tuple[str, ...]:
        return tuple(q.name for q in self.register)

    @property
    def num_qubits(self) -> int:
        return len(self.register)

    def operations(self) -> Iterator[Operation]:
        """Operations in moment-major order; a valid wire-wise linearization."""
        for m in self.moments:
            yield from m.operations

    def __len__(self) -> int:
        return len(self.moments)

    def append(self, operation: Operation, policy: SchedulePolicy = SchedulePolicy.EARLIEST) -> Circuit:
        return append(self, operation, policy)

    def with_qubits(self, names: Iterable[str]) -> Circuit:
        """Return a copy whose register is extended by ``names`` (existing names are skipped)."""
        register = list(self.register)
        known = set(self._by_name)
        for name in names:
            if name not in known:
                register.append(Qubit(name, len(register)))
                known.add(name)
        return Circuit(tuple(register), self.moments)


def build_circuit(qubit_names: Sequence[str]) -> Circuit:
    """Create an empty circuit over the named register."""
    names = list(qubit_names)
    if not names:
        raise EmptyRegister("register must contain at least one qubit")
    if len(set(names)) != len(names):
        dup = next(n for n in names if names.count(n) > 1)
        raise DuplicateQubitName(dup)
    return Circuit(tuple(Qubit(n, i) for i, n in enumerate(names)))


def _check_membership(register: tuple[Qubit, ...], operation: Operation) -> None:
    n = len(register)
    for q in operation.qubits:
        if q.index >= n or register[q.index] != q:
            raise UnknownQubit(q.name)


def append(circuit: Circuit, operation: Operation,
           policy: SchedulePolicy = SchedulePolicy.EARLIEST) -> Circuit:
    """Append one operation.

    EARLIEST drops the operation into the moment right after the last moment
    touching any of its qubits (a new moment when that is past the end).
    NEW_MOMENT always opens a fresh moment.
    """
    _check_membership(circuit.register, operation)
    moments = list(circuit.moments)
    support = set(operation.indices)
    slot = len(moments)
    if policy is SchedulePolicy.EARLIEST:
        slot = 0
        for i in range(len(moments) - 1, -1, -1):
            if moments[i].support & support:
                slot = i + 1
                break
    if slot == len(moments):
        moments.append(Moment((operation,)))
    else:
        moments[slot] = Moment(moments[slot].operations + (operation,))
    return Circuit(circuit.register, tuple(moments))


class CircuitBuilder:
    """Mutable accumulator that packs operations into moments in O(1) each.

    ``barrier()`` starts a new segment: later operations never land in an
    earlier moment.  ``build()`` freezes the result.
    """

    def __init__(self, qubit_names: Iterable[str] = ()):
        self._register: list[Qubit] = []
        self._by_name: dict[str, Qubit] = {}
        self._moments: list[list[Operation]] = []
        self._last: list[int] = []
        self._floor = 0
        for name in qubit_names:
            self.add_qubit(name)

    @classmethod
    def from_register(cls, register: Iterable[Qubit]) -> CircuitBuilder:
        return cls(q.name for q in register)

    def add_qubit(self, name: str) -> Qubit:
        if name in self._by_name:
            raise DuplicateQubitName(name)
        q = Qubit(name, len(self._register))
        self._register.append(q)
        self._by_name[name] = q
        self._last.append(-1)
        return q

    def qubit(self, name: str) -> Qubit:
        try:
            return self._by_name[name]
        except KeyError:
            raise UnknownQubit(name) from None

    def get_or_add(self, name: str) -> Qubit:
        q = self._by_name.get(name)
        return q if q is not None else self.add_qubit(name)

    def has_qubit(self, name: str) -> bool:
        return name in self._by_name

    @property
    def num_qubits(self) -> int:
        return len(self._register)

    def append(self, operation: Operation, policy: SchedulePolicy = SchedulePolicy.EARLIEST) -> None:
        n = len(self._register)
        for q in operation.qubits:
            if q.index >= n or self._register[q.index] != q:
                raise UnknownQubit(q.name)
        if policy is SchedulePolicy.NEW_MOMENT:
            slot = len(self._moments)
        else:
            slot = self._floor
            for q in operation.qubits:
                t = self._last[q.index] + 1
                if t > slot:
                    slot = t
        if slot == len(self._moments):
            self._moments.append([])
        self._moments[slot].append(operation)
        for q in operation.qubits:
            self._last[q.index] = slot

    def extend(self, operations: Iterable[Operation],
               policy: SchedulePolicy = SchedulePolicy.EARLIEST) -> None:
        for o in operations:
            self.append(o, policy)

    def barrier(self) -> None:
        self._floor = len(self._moments)

    def build(self) -> Circuit:
        return Circuit(tuple(self._register), tuple(Moment(tuple(m)) for m in self._moments))


def from_operations(register: Sequence[Qubit], operations: Iterable[Operation],
                    policy: SchedulePolicy = SchedulePolicy.EARLIEST) -> Circuit:
    """Pack an operation stream over ``register`` into moments."""
    builder = CircuitBuilder.from_register(register)
    builder.extend(operations, policy)
    return builder.build()


def repack(circuit: Circuit) -> Circuit:
    """Greedy EARLIEST repack of the circuit's own operation stream."""
    return from_operations(circuit.register, circuit.operations())


@dataclass(frozen=True)
class GatePredicate:
    """Selects operations by kind, by qubit region, and/or by moment range.

    ``qubits`` matches an operation whose whole support lies in the named set.
    Unset criteria match everything.
    """

    kinds: frozenset[GateKind] | None = None
    qubits: frozenset[str] | None = None
    moments: range | None = None

    def matches(self, operation: Operation, moment_index: int) -> bool:
        if self.kinds is not None and operation.kind not in self.kinds:
            return False
        if self.qubits is not None and not all(q.name in self.qubits for q in operation.qubits):
            return False
        if self.moments is not None and moment_index not in self.moments:
            return False
        return True


def flag_gates(circuit: Circuit, predicate: GatePredicate, flag: int) -> Circuit:
    """Add ``flag`` to every operation selected by ``predicate``; nothing else changes."""
    moments = []
    for i, m in enumerate(circuit.moments):
        moments.append(Moment(tuple(
            o.add_flags((flag,)) if predicate.matches(o, i) else o for o in m.operations
        )))
    return Circuit(circuit.register, tuple(moments))


# Human-readable names for integer flag labels.
FLAG_NAMES: dict[int, str] = {}


def name_flag(label: int, name: str) -> None:
    FLAG_NAMES[label] = name


def flag_name(label: int) -> str:
    return FLAG_NAMES.get(label, str(label))


def count_operations(circuit: Circuit) -> int:
    return sum(len(m) for m in circuit.moments)


def check_invariants(circuit: Circuit) -> None:
    """Re-assert register membership and disjoint moment supports."""
    Circuit(circuit.register, tuple(Moment(m.operations) for m in circuit.moments))
