"""
Toffoli and MPMCT lowering to Clifford+T.

Every Toffoli is rewritten as H(target) . CCZ . H(target), where the CCZ core
is a phase-polynomial circuit supplied by a registered strategy.  Because CCZ
is symmetric, a ControlOrder may assign the three Toffoli qubits to the core's
three slots in any order without changing the gate's action.

Ancilla wires are named ``toff_a<i>``; the k-th Toffoli of a pass uses
``toff_a<4k>..toff_a<4k+3>`` (for a 4-ancilla strategy).  A register qubit that
already carries such a name is taken over as that ancilla, so callers may
pre-declare ancilla wires.  MPMCT gates use the Barenco ladder with clean
``mct_a<i>`` ancillae.
"""
from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass

from .errors import UnknownStrategy, UnsupportedGate
from .ir import (
    Circuit,
    CircuitBuilder,
    GateKind,
    Operation,
    Qubit,
    SchedulePolicy,
    op,
    repack,
)

NONE = "NONE"
TOFFOLI_ANCILLA_PREFIX = "toff_a"
MPMCT_ANCILLA_PREFIX = "mct_a"

CczCore = Callable[[Qubit, Qubit, Qubit, Sequence[Qubit]], list[Operation]]


def _ccz_tdepth1(x: Qubit, y: Qubit, z: Qubit, anc: Sequence[Qubit]) -> list[Operation]:
    # Parities x^y^z, x^y, y^z, x^z are spread over the four ancillae so all
    # seven phase gates fire in one layer.
    a0, a1, a2, a3 = anc
    C = GateKind.CNOT
    compute = [
        op(C, y, a2), op(C, x, a0),
        op(C, y, a1), op(C, z, a2), op(C, a0, a3),
        op(C, x, a1), op(C, z, a3), op(C, a2, a0),
    ]
    phases = [
        op(GateKind.T, x), op(GateKind.T, y), op(GateKind.T, z), op(GateKind.T, a0),
        op(GateKind.TDAG, a1), op(GateKind.TDAG, a2), op(GateKind.TDAG, a3),
    ]
    return compute + phases + compute[::-1]


def _ccz_tdepth3(x: Qubit, y: Qubit, z: Qubit, anc: Sequence[Qubit]) -> list[Operation]:
    C, T, TD = GateKind.CNOT, GateKind.T, GateKind.TDAG
    return [
        op(T, x), op(T, y), op(T, z),
        op(C, x, y),            # y <- x^y
        op(C, z, x),            # x <- x^z
        op(C, y, z),            # z <- x^y^z
        op(TD, x), op(TD, y), op(T, z),
        op(C, x, y),            # y <- y^z
        op(TD, y),
        op(C, x, y),
        op(C, y, z),
        op(C, z, x),
        op(C, x, y),
    ]


@dataclass(frozen=True)
class DecompositionStrategy:
    name: str
    ancilla_count: int
    t_count: int
    t_depth: int
    core: CczCore | None
    description: str = ""

    def expand(self, controls: Sequence[Qubit], target: Qubit, ancillae: Sequence[Qubit] = (),
               order: Sequence[int] = (0, 1, 2)) -> list[Operation]:
        """Clifford+T sequence for Toffoli(controls, target)."""
        if self.core is None:
            return [op(GateKind.TOFFOLI, *controls, target)]
        if len(ancillae) != self.ancilla_count:
            raise ValueError(f"{self.name} needs {self.ancilla_count} ancillae, got {len(ancillae)}")
        roles = (controls[0], controls[1], target)
        x, y, z = (roles[i] for i in validate_order(order))
        return [op(GateKind.H, target), *self.core(x, y, z, ancillae), op(GateKind.H, target)]


_STRATEGIES: dict[str, DecompositionStrategy] = {}


def register_strategy(strategy: DecompositionStrategy) -> None:
    _STRATEGIES[strategy.name] = strategy


register_strategy(DecompositionStrategy(
    "TDEPTH1_4ANC", 4, 7, 1, _ccz_tdepth1,
    "T-depth 1 with 4 ancillae",
))
register_strategy(DecompositionStrategy(
    "TDEPTH3_0ANC", 0, 7, 3, _ccz_tdepth3,
    "T-depth 3 without ancillae",
))
register_strategy(DecompositionStrategy(NONE, 0, 0, 0, None, "leave Toffolis intact"))


def list_strategies() -> list[DecompositionStrategy]:
    return list(_STRATEGIES.values())


def get_strategy(name: str) -> DecompositionStrategy:
    try:
        return _STRATEGIES[name]
    except KeyError:
        raise UnknownStrategy(f"unknown strategy {name!r}; known: {', '.join(_STRATEGIES)}") from None


def validate_order(order: Sequence[int]) -> tuple[int, int, int]:
    order = tuple(int(i) for i in order)
    if sorted(order) != [0, 1, 2]:
        raise ValueError(f"control order must be a permutation of (0, 1, 2), got {order}")
    return order  # type: ignore[return-value]


def _lower_polarity(o: Operation) -> tuple[list[Operation], list[Operation]]:
    """X gates that turn the negative controls of ``o`` into positive ones."""
    flips = [op(GateKind.X, c) for c, pol in zip(o.controls, o.polarities) if not pol]
    return flips, list(flips)


def _small_mpmct(o: Operation) -> list[Operation]:
    """m = 1 becomes a CNOT, m = 2 a Toffoli; negative controls are X-conjugated."""
    pre, post = _lower_polarity(o)
    kind = GateKind.CNOT if len(o.controls) == 1 else GateKind.TOFFOLI
    return pre + [Operation(kind, o.qubits, flags=o.flags)] + post


def decompose_toffoli(circuit: Circuit, strategy: str = "TDEPTH1_4ANC",
                      order: Sequence[int] = (0, 1, 2)) -> Circuit:
    """Replace every Toffoli by the named strategy's Clifford+T expansion.

    MPMCT gates with one or two controls are lowered first; larger ones raise
    UnsupportedGate (run decompose_mpmct before this pass).
    """
    strat = get_strategy(strategy)
    order = validate_order(order)
    for o in circuit.operations():
        if o.kind is GateKind.MPMCT and len(o.controls) > 2:
            raise UnsupportedGate(f"{o}: MPMCT with {len(o.controls)} controls; run decompose_mpmct first")
    kinds = {o.kind for o in circuit.operations()}
    if GateKind.MPMCT not in kinds and (strat.core is None or GateKind.TOFFOLI not in kinds):
        return circuit
    builder = CircuitBuilder.from_register(circuit.register)
    serial = 0
    for o in circuit.operations():
        lowered = _small_mpmct(o) if o.kind is GateKind.MPMCT else [o]
        for g in lowered:
            if g.kind is not GateKind.TOFFOLI or strat.core is None:
                builder.append(g, SchedulePolicy.NEW_MOMENT)
                continue
            ancillae = [
                builder.get_or_add(f"{TOFFOLI_ANCILLA_PREFIX}{serial * strat.ancilla_count + j}")
                for j in range(strat.ancilla_count)
            ]
            serial += 1
            for e in strat.expand(g.controls, g.target, ancillae, order):
                builder.append(e.with_flags(g.flags) if g.flags else e, SchedulePolicy.NEW_MOMENT)
    return repack(builder.build())


def barenco_toffolis(controls: Sequence[Qubit], target: Qubit, ancillae: Sequence[Qubit]) -> list[Operation]:
    """4(m-2) Toffolis realising an m-controlled X with m-2 ancillae (m >= 3).

    The ancillae are returned to their input value, so clean or borrowed
    wires both work.
    """
    m = len(controls)
    if m < 3:
        raise ValueError("Barenco ladder needs at least 3 controls")
    if len(ancillae) != m - 2:
        raise ValueError(f"need {m - 2} ancillae, got {len(ancillae)}")
    c, a = list(controls), list(ancillae)
    TOF = GateKind.TOFFOLI

    # ladder[i] targets a[i] (i < m-2) or the target (i = m-2)
    def rung(i: int) -> Operation:
        if i == 0:
            return op(TOF, c[0], c[1], a[0])
        tgt = target if i == m - 2 else a[i]
        return op(TOF, c[i + 1], a[i - 1], tgt)

    top = m - 2
    down = [rung(i) for i in range(top, 0, -1)]
    first = down + [rung(0)] + down[::-1]
    inner = [rung(i) for i in range(top - 1, 0, -1)]
    second = inner + [rung(0)] + inner[::-1]
    return first + second


def decompose_mpmct(circuit: Circuit, toffoli_strategy: str = NONE,
                    order: Sequence[int] = (0, 1, 2)) -> Circuit:
    """Lower every MPMCT to Toffolis (and optionally on to Clifford+T).

    Negative controls are X-conjugated first.  m >= 3 uses the Barenco ladder
    of 4(m-2) Toffolis over a shared pool of clean ``mct_a<i>`` ancillae; the
    pool is reused across gates because each gate restores it.
    """
    get_strategy(toffoli_strategy)
    builder = CircuitBuilder.from_register(circuit.register)
    for o in circuit.operations():
        if o.kind is not GateKind.MPMCT:
            builder.append(o, SchedulePolicy.NEW_MOMENT)
            continue
        m = len(o.controls)
        if m <= 2:
            builder.extend(_small_mpmct(o), SchedulePolicy.NEW_MOMENT)
            continue
        pre, post = _lower_polarity(o)
        ancillae = [builder.get_or_add(f"{MPMCT_ANCILLA_PREFIX}{i}") for i in range(m - 2)]
        body = barenco_toffolis(o.controls, o.target, ancillae)
        if o.flags:
            body = [g.with_flags(o.flags) for g in body]
        builder.extend(pre + body + post, SchedulePolicy.NEW_MOMENT)
    lowered = repack(builder.build())
    if toffoli_strategy == NONE:
        return lowered
    return decompose_toffoli(lowered, toffoli_strategy, order)


def toffoli_ancillae(circuit: Circuit) -> list[str]:
    """Names of the decomposition ancilla wires present in ``circuit``."""
    prefixes = (TOFFOLI_ANCILLA_PREFIX, MPMCT_ANCILLA_PREFIX)
    return [n for n in circuit.qubit_names if n.startswith(prefixes) and n.split("_a", 1)[1].isdigit()]
