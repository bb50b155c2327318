"""
Exhaustive functional verification.

Dense unitary construction for small circuits, classical bit-vector
propagation for reversible circuits, and equivalence up to global phase.
Basis convention everywhere: qubit 0 is the most significant bit.
"""
from __future__ import annotations

import os
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np

from .errors import NonClassicalGate, TooManyQubits, UnsupportedGate
from .ir import CLASSICAL_KINDS, Circuit, GateKind, Operation, Qubit, from_operations

DEFAULT_SIM_LIMIT = 14
TRUTH_TABLE_LIMIT = 24
BACKENDS = ("dense",)

_SQ2 = 1 / np.sqrt(2)
_H = np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex)
_PHASES = {
    GateKind.S: 1j,
    GateKind.SDAG: -1j,
    GateKind.T: np.exp(1j * np.pi / 4),
    GateKind.TDAG: np.exp(-1j * np.pi / 4),
}


def sim_limit() -> int:
    """Simulator qubit limit, overridable through QCFORGE_SIM_LIMIT."""
    value = os.environ.get("QCFORGE_SIM_LIMIT")
    return int(value) if value else DEFAULT_SIM_LIMIT


def _apply(psi: np.ndarray, o: Operation) -> np.ndarray:
    """Apply one gate to a tensor whose leading axes are the qubits."""
    kind = o.kind
    axes = o.indices
    if kind is GateKind.H:
        a = axes[0]
        return np.moveaxis(np.tensordot(_H, psi, axes=(1, a)), 0, a)
    if kind in _PHASES:
        idx = [slice(None)] * psi.ndim
        idx[axes[0]] = 1
        psi[tuple(idx)] *= _PHASES[kind]
        return psi
    if kind is GateKind.CZ:
        idx = [slice(None)] * psi.ndim
        idx[axes[0]] = 1
        idx[axes[1]] = 1
        psi[tuple(idx)] *= -1
        return psi
    if kind in (GateKind.X, GateKind.CNOT, GateKind.TOFFOLI, GateKind.MPMCT):
        idx = [slice(None)] * psi.ndim
        for a, pol in zip(axes[:-1], o.polarities):
            idx[a] = 1 if pol else 0
        target = axes[-1]
        shifted = target - sum(1 for a in axes[:-1] if a < target)
        view = psi[tuple(idx)]
        psi[tuple(idx)] = np.flip(view, axis=shifted).copy()
        return psi
    raise UnsupportedGate(f"cannot simulate {kind.value}")


def _check_size(circuit: Circuit, limit: int | None) -> int:
    limit = sim_limit() if limit is None else limit
    if circuit.num_qubits > limit:
        raise TooManyQubits(f"{circuit.num_qubits} qubits exceeds simulator limit {limit}")
    return circuit.num_qubits


def unitary_of(circuit: Circuit, limit: int | None = None, backend: str = "dense") -> np.ndarray:
    """Full 2^k x 2^k unitary of the circuit (column j = image of basis state j)."""
    if backend not in BACKENDS:
        raise UnsupportedGate(f"unknown simulator backend {backend!r}")
    k = _check_size(circuit, limit)
    dim = 1 << k
    psi = np.eye(dim, dtype=complex).reshape((2,) * k + (dim,))
    for o in circuit.operations():
        psi = _apply(psi, o)
    return np.ascontiguousarray(psi.reshape(dim, dim))


def simulate(circuit: Circuit, basis_state: int = 0, limit: int | None = None) -> np.ndarray:
    """Statevector obtained by running the circuit on one computational basis state."""
    k = _check_size(circuit, limit)
    psi = np.zeros(1 << k, dtype=complex)
    psi[basis_state] = 1.0
    psi = psi.reshape((2,) * k)
    for o in circuit.operations():
        psi = _apply(psi, o)
    return psi.reshape(-1)


def is_unitary(u: np.ndarray, tol: float = 1e-9) -> bool:
    return bool(np.max(np.abs(u @ u.conj().T - np.eye(u.shape[0]))) <= tol)


def _require_classical(circuit: Circuit) -> None:
    for o in circuit.operations():
        if o.kind not in CLASSICAL_KINDS:
            raise NonClassicalGate(f"{o} is not a classical reversible gate")


def truth_table(circuit: Circuit, limit: int = TRUTH_TABLE_LIMIT) -> np.ndarray:
    """Output basis index for every input basis index, by bit-vector propagation."""
    _require_classical(circuit)
    k = circuit.num_qubits
    if k > limit:
        raise TooManyQubits(f"{k} qubits exceeds truth-table limit {limit}")
    states = np.arange(1 << k, dtype=np.int64)
    for o in circuit.operations():
        tbit = np.int64(1 << (k - 1 - o.target.index))
        if o.kind is GateKind.X:
            states ^= tbit
            continue
        fire = np.ones(states.shape, dtype=bool)
        for c, pol in zip(o.controls, o.polarities):
            bit = (states >> (k - 1 - c.index)) & 1
            fire &= bit == (1 if pol else 0)
        states ^= np.where(fire, tbit, np.int64(0))
    return states


def run_classical(circuit: Circuit, state: int) -> int:
    """Propagate a single basis state (arbitrary width) through a reversible circuit."""
    _require_classical(circuit)
    k = circuit.num_qubits
    for o in circuit.operations():
        if all(((state >> (k - 1 - c.index)) & 1) == pol for c, pol in zip(o.controls, o.polarities)):
            state ^= 1 << (k - 1 - o.target.index)
    return state


def encode_bits(circuit: Circuit, values: dict[str, int]) -> int:
    """Basis index with the named qubits set to the given bits, all others 0."""
    k = circuit.num_qubits
    state = 0
    for name, bit in values.items():
        if bit:
            state |= 1 << (k - 1 - circuit.qubit(name).index)
    return state


def decode_bit(circuit: Circuit, state: int, name: str) -> int:
    return (state >> (circuit.num_qubits - 1 - circuit.qubit(name).index)) & 1


@dataclass(frozen=True)
class Equivalence:
    equivalent: bool
    max_deviation: float
    witness: int | None = None
    phase: complex = 1.0

    def __bool__(self) -> bool:
        return self.equivalent


def compare_unitaries(ua: np.ndarray, ub: np.ndarray, tol: float = 1e-9) -> Equivalence:
    """Compare two matrices up to a global phase taken from ``ua``'s largest entry."""
    flat = np.abs(ua).ravel()
    idx = int(np.argmax(flat))
    ref = ub.ravel()[idx]
    if abs(ref) <= tol:
        dev = np.abs(ua - ub)
        col = int(np.argmax(dev.max(axis=0)))
        return Equivalence(False, float(dev.max()), col)
    phase = ua.ravel()[idx] / ref
    phase /= abs(phase)
    dev = np.abs(ua - phase * ub)
    worst = float(dev.max())
    if worst <= tol:
        return Equivalence(True, worst, None, complex(phase))
    col = int(np.argmax(dev.max(axis=0)))
    return Equivalence(False, worst, col, complex(phase))


def equivalent(a: Circuit, b: Circuit, tol: float = 1e-9, limit: int | None = None) -> Equivalence:
    """Unitary equality up to global phase; the witness is the worst basis input."""
    if a.num_qubits != b.num_qubits:
        raise ValueError(f"qubit counts differ: {a.num_qubits} vs {b.num_qubits}")
    return compare_unitaries(unitary_of(a, limit), unitary_of(b, limit), tol)


def embed(circuit: Circuit, register: Sequence[Qubit]) -> Circuit:
    """Re-express ``circuit`` over a larger register, matching qubits by name."""
    by_name = {q.name: q for q in register}
    ops = []
    for o in circuit.operations():
        ops.append(Operation(o.kind, tuple(by_name[q.name] for q in o.qubits), o.polarities, o.flags))
    return from_operations(register, ops)


def equivalent_on_clean_ancillae(reference: Circuit, candidate: Circuit, ancillae: Iterable[str],
                                 tol: float = 1e-9, limit: int | None = None) -> Equivalence:
    """Compare ``candidate`` to ``reference`` on inputs where every ancilla is |0>.

    ``reference`` is embedded into the candidate's register (acting as identity
    on wires it lacks), so a passing check also proves the ancillae are restored.
    """
    ref = embed(reference, candidate.register)
    k = candidate.num_qubits
    anc_mask = 0
    for name in ancillae:
        anc_mask |= 1 << (k - 1 - candidate.qubit(name).index)
    cols = np.array([j for j in range(1 << k) if not j & anc_mask])
    ua = unitary_of(ref, limit)[:, cols]
    ub = unitary_of(candidate, limit)[:, cols]
    result = compare_unitaries(ua, ub, tol)
    if result.witness is not None:
        return Equivalence(result.equivalent, result.max_deviation, int(cols[result.witness]), result.phase)
    return result
