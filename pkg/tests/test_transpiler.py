import itertools

import pytest
from hypothesis import given, settings

from circuit_gen import circuits
from qcforge.analysis import metrics
from qcforge.errors import UnknownStrategy, UnsupportedGate
from qcforge.ir import CircuitBuilder, GateKind, Operation, op
from qcforge.textfmt import parse
from qcforge.transpiler import (
    NONE,
    barenco_toffolis,
    decompose_mpmct,
    decompose_toffoli,
    get_strategy,
    list_strategies,
    toffoli_ancillae,
)
from qcforge.verifier import equivalent, equivalent_on_clean_ancillae, run_classical, truth_table

STRATEGIES = ["TDEPTH1_4ANC", "TDEPTH3_0ANC"]
ORDERS = list(itertools.permutations(range(3)))


def single_toffoli():
    return parse("qubits c0 c1 t\nTOFFOLI c0 c1 t")


def mpmct(m, polarities=None):
    names = [f"c{i}" for i in range(m)] + ["t"]
    b = CircuitBuilder(names)
    qs = [b.qubit(n) for n in names]
    b.append(Operation(GateKind.MPMCT, tuple(qs), polarities))
    return b.build()


def test_registry_contents():
    by_name = {s.name: s for s in list_strategies()}
    assert by_name["TDEPTH1_4ANC"].ancilla_count == 4
    assert by_name["TDEPTH3_0ANC"].ancilla_count == 0
    assert NONE in by_name
    for name in STRATEGIES:
        assert by_name[name].t_count == 7
    assert by_name["TDEPTH1_4ANC"].t_depth == 1
    assert by_name["TDEPTH3_0ANC"].t_depth == 3


def test_unknown_strategy():
    with pytest.raises(UnknownStrategy):
        get_strategy("NOPE")
    with pytest.raises(UnknownStrategy):
        decompose_toffoli(single_toffoli(), "NOPE")


def test_bad_order_rejected():
    with pytest.raises(ValueError):
        decompose_toffoli(single_toffoli(), order=(0, 0, 1))


def test_worked_example_decomposition(worked):
    out = decompose_toffoli(worked, "TDEPTH1_4ANC", (0, 1, 2))
    m = metrics(out)
    assert (m.cnot_count, m.h_count, m.t_count, m.t_depth) == (18, 3, 7, 1)
    assert out.num_qubits == worked.num_qubits + 2
    assert out.num_qubits == 7
    assert sorted(toffoli_ancillae(out)) == [f"toff_a{i}" for i in range(4)]


def test_worked_example_matches_fixture(worked, lowered):
    out = decompose_toffoli(worked, "TDEPTH1_4ANC")
    assert out.qubit_names == lowered.qubit_names
    assert metrics(out) == metrics(lowered)
    assert equivalent(out, lowered)


def test_toffoli_free_circuit_unchanged():
    c = parse("qubits q0 q1\nH q0\nCNOT q0 q1\nT q1")
    for name in STRATEGIES + [NONE]:
        assert decompose_toffoli(c, name) is c


@pytest.mark.parametrize("strategy", STRATEGIES)
@pytest.mark.parametrize("order", ORDERS)
def test_single_toffoli_oracle(strategy, order):
    ref = single_toffoli()
    out = decompose_toffoli(ref, strategy, order)
    m = metrics(out)
    assert m.t_count == 7
    assert m.t_depth == get_strategy(strategy).t_depth
    assert m.toffoli_count == 0
    result = equivalent_on_clean_ancillae(ref, out, toffoli_ancillae(out))
    assert result.equivalent
    assert result.max_deviation < 1e-9


@pytest.mark.parametrize("strategy", STRATEGIES)
def test_ancillae_restored_on_every_basis_input(strategy):
    from qcforge.verifier import simulate
    import numpy as np

    out = decompose_toffoli(single_toffoli(), strategy)
    k = out.num_qubits
    anc = toffoli_ancillae(out)
    mask = sum(1 << (k - 1 - out.qubit(n).index) for n in anc)
    for x in range(8):
        basis = x << (k - 3)
        psi = simulate(out, basis)
        support = np.flatnonzero(np.abs(psi) > 1e-9)
        assert len(support) == 1
        assert not support[0] & mask


def test_flags_inherited_by_expansion():
    c = parse("qubits a b t\nTOFFOLI a b t !4")
    out = decompose_toffoli(c, "TDEPTH1_4ANC")
    assert all(o.flags == {4} for o in out.operations())


def test_deterministic(worked):
    assert decompose_toffoli(worked) == decompose_toffoli(worked)


def test_large_mpmct_rejected_by_toffoli_pass():
    with pytest.raises(UnsupportedGate):
        decompose_toffoli(mpmct(3))


@pytest.mark.parametrize("m, expected", [(3, 4), (4, 8), (5, 12), (6, 16)])
def test_barenco_count(m, expected):
    out = decompose_mpmct(mpmct(m))
    assert metrics(out).toffoli_count == expected
    assert len([n for n in out.qubit_names if n.startswith("mct_a")]) == m - 2


def test_mpmct_m3_adds_one_ancilla():
    out = decompose_mpmct(mpmct(3))
    assert out.num_qubits == 5


def test_mpmct_m2_negative_control():
    out = decompose_mpmct(mpmct(2, (True, False)))
    ops = list(out.operations())
    assert [o.kind for o in ops] == [GateKind.X, GateKind.TOFFOLI, GateKind.X]
    assert ops[0].qubits[0].name == "c1"
    assert ops[2].qubits[0].name == "c1"


def test_barenco_needs_three_controls():
    b = CircuitBuilder(["a", "b", "t"])
    with pytest.raises(ValueError):
        barenco_toffolis([b.qubit("a"), b.qubit("b")], b.qubit("t"), [])


@pytest.mark.parametrize("m", [3, 4, 5])
def test_barenco_truth_table_with_zero_ancillae(m):
    ref = mpmct(m)
    out = decompose_mpmct(ref)
    k = out.num_qubits
    table = truth_table(out)
    ref_table = truth_table(ref)
    shift = k - (m + 1)
    for x in range(1 << (m + 1)):
        assert table[x << shift] == ref_table[x] << shift


def test_mixed_polarity_mpmct_matches_direct_gate():
    ref = mpmct(4, (True, False, True, False))
    out = decompose_mpmct(ref)
    shift = out.num_qubits - ref.num_qubits
    for x in range(1 << ref.num_qubits):
        assert run_classical(out, x << shift) == run_classical(ref, x) << shift


def test_mpmct_through_to_clifford_t():
    ref = mpmct(3, (True, False, True))
    out = decompose_mpmct(ref, "TDEPTH3_0ANC")
    assert metrics(out).t_count == 7 * 4
    assert equivalent_on_clean_ancillae(ref, out, toffoli_ancillae(out))


@settings(max_examples=25, deadline=None)
@given(circuits(max_qubits=4, max_gates=6,
                kinds=[GateKind.H, GateKind.T, GateKind.CNOT, GateKind.TOFFOLI, GateKind.X]))
def test_t_count_formula_and_unitary_preservation(c):
    before = metrics(c)
    out = decompose_toffoli(c, "TDEPTH3_0ANC")
    assert metrics(out).t_count == before.t_count + 7 * before.toffoli_count
    assert equivalent(c, out)


@settings(max_examples=15, deadline=None)
@given(circuits(max_qubits=4, max_gates=3, kinds=[GateKind.CNOT, GateKind.TOFFOLI, GateKind.T]))
def test_tdepth1_preserves_unitary_on_clean_ancillae(c):
    out = decompose_toffoli(c, "TDEPTH1_4ANC")
    if out.num_qubits > 12:
        return
    assert metrics(out).t_count == metrics(c).t_count + 7 * metrics(c).toffoli_count
    assert equivalent_on_clean_ancillae(c, out, toffoli_ancillae(out))


def test_preexisting_ancilla_names_are_reused():
    c = parse("qubits a b t toff_a0\nTOFFOLI a b t")
    out = decompose_toffoli(c, "TDEPTH1_4ANC")
    assert out.qubit_names[:4] == ("a", "b", "t", "toff_a0")
    assert out.num_qubits == 7


def test_strategy_expand_directly():
    b = CircuitBuilder(["a", "b", "t"])
    seq = get_strategy("TDEPTH3_0ANC").expand([b.qubit("a"), b.qubit("b")], b.qubit("t"))
    assert seq[0] == op(GateKind.H, b.qubit("t"))
    assert seq[-1] == op(GateKind.H, b.qubit("t"))
    with pytest.raises(ValueError):
        get_strategy("TDEPTH1_4ANC").expand([b.qubit("a"), b.qubit("b")], b.qubit("t"), [])
