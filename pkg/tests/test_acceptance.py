"""End-to-end acceptance checks.

Each test carries a ``criterion`` marker; conftest prints one PASS/FAIL line
per criterion at the end of the run.
"""
import io
import re
import time

import numpy as np
import pytest

from circuit_gen import random_circuit
from qcforge.analysis import metrics
from qcforge.benchmarks import (
    CSV_HEADER,
    QramSpec,
    Scenario,
    bb_qubit_count,
    run_bench,
    synth_bucket_brigade,
)
from qcforge.errors import InvariantViolated
from qcforge.ir import CircuitBuilder, GateKind, Operation, check_invariants
from qcforge.optimizers import (
    INVARIANTS,
    cancel_cnot,
    cancel_hadamard,
    commute_t_to_start,
    drop_one_t,
    recompose_tt_to_s,
    with_invariants,
)
from qcforge.textfmt import read_file
from qcforge.transpiler import decompose_mpmct, decompose_toffoli, get_strategy, toffoli_ancillae
from qcforge.verifier import (
    compare_unitaries,
    decode_bit,
    encode_bits,
    equivalent_on_clean_ancillae,
    run_classical,
    simulate,
    truth_table,
    unitary_of,
)

T_COUNT = [INVARIANTS["t-count"]]


class Clock:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start


@pytest.mark.criterion(1, "worked example: cnot 18->14, h 3->1, t 7")
def test_worked_example(data_dir):
    with Clock() as clock:
        source = read_file(data_dir / "worked.qc")
        lowered = decompose_toffoli(source, "TDEPTH1_4ANC", (0, 1, 2))
        before = metrics(lowered)
        out, _ = cancel_cnot(lowered)
        out, _ = cancel_hadamard(out)
        after = metrics(out)
    assert (before.cnot_count, before.h_count, before.t_count) == (18, 3, 7)
    assert (after.cnot_count, after.h_count, after.t_count) == (14, 1, 7)
    assert clock.elapsed < 1.0


@pytest.mark.criterion(2, "both Toffoli strategies oracle-equivalent, t_count 7, t_depth 1 and 3")
def test_decomposition_correctness():
    b = CircuitBuilder(["c0", "c1", "t"])
    b.append(Operation(GateKind.TOFFOLI, (b.qubit("c0"), b.qubit("c1"), b.qubit("t"))))
    ref = b.build()
    with Clock() as clock:
        for name, depth in (("TDEPTH1_4ANC", 1), ("TDEPTH3_0ANC", 3)):
            strategy = get_strategy(name)
            assert (strategy.t_count, strategy.t_depth) == (7, depth)
            for order in ((0, 1, 2), (1, 2, 0), (2, 0, 1), (0, 2, 1)):
                out = decompose_toffoli(ref, name, order)
                m = metrics(out)
                assert (m.t_count, m.t_depth) == (7, depth)
                anc = toffoli_ancillae(out)
                assert len(anc) == strategy.ancilla_count
                result = equivalent_on_clean_ancillae(ref, out, anc, tol=1e-9)
                assert result.equivalent, (name, order, result)
                k = out.num_qubits
                mask = sum(1 << (k - 1 - out.qubit(a).index) for a in anc)
                for x in range(8):
                    psi = simulate(out, x << (k - 3))
                    hits = np.flatnonzero(np.abs(psi) > 1e-9)
                    assert len(hits) == 1 and not hits[0] & mask
    assert clock.elapsed < 5.0


@pytest.mark.criterion(3, "Barenco: 4(m-2) Toffolis and exact truth tables, m = 3..6")
def test_barenco_count():
    with Clock() as clock:
        for m in (3, 4, 5, 6):
            names = [f"c{i}" for i in range(m)] + ["t"]
            b = CircuitBuilder(names)
            b.append(Operation(GateKind.MPMCT, tuple(b.qubit(n) for n in names)))
            ref = b.build()
            out = decompose_mpmct(ref)
            assert metrics(out).toffoli_count == 4 * (m - 2)
            shift = out.num_qubits - ref.num_qubits
            table, direct = truth_table(out), truth_table(ref)
            for x in range(1 << ref.num_qubits):
                assert table[x << shift] == direct[x] << shift
    assert clock.elapsed < 30.0


@pytest.mark.criterion(4, "QRAM wire formula q = n + 2^(n+1) + 5 for n = 2..9")
def test_qram_wire_formula():
    with Clock() as clock:
        counts = [synth_bucket_brigade(QramSpec.random(n, seed=n)).num_qubits for n in range(2, 10)]
    assert counts == [bb_qubit_count(n) for n in range(2, 10)]
    assert counts[:4] == [15, 24, 41, 74]
    assert counts[-1] == 1038
    assert clock.elapsed < 10.0


@pytest.mark.criterion(5, "QRAM reads match a memory lookup for n = 2, 3")
def test_qram_functional():
    with Clock() as clock:
        for n in (2, 3):
            first = QramSpec.random(n, seed=11)
            # the complement guarantees two distinct contents with both bit values at every cell
            contents = [first, QramSpec(n, tuple(1 - b for b in first.memory))]
            for spec in contents:
                circuit = synth_bucket_brigade(spec)
                for address in range(2 ** n):
                    state = encode_bits(circuit, {f"a{i}": (address >> i) & 1 for i in range(n)})
                    out = run_classical(circuit, state)
                    value = decode_bit(circuit, out, "readout")
                    assert value == spec.memory[address]
                    readout_bit = 1 << (circuit.num_qubits - 1 - circuit.qubit("readout").index)
                    assert out ^ (value * readout_bit) == state
    assert clock.elapsed < 60.0


@pytest.mark.criterion(6, "T-count invariant holds on cancellation; faulty pass caught at its step")
def test_invariant_checked_optimization(data_dir):
    with Clock() as clock:
        lowered = decompose_toffoli(read_file(data_dir / "worked.qc"), "TDEPTH1_4ANC")
        circuits = [lowered] + [
            synth_bucket_brigade(QramSpec.random(n, seed=n, decomposition="TDEPTH1_4ANC")) for n in (2, 3)
        ]
        for c in circuits:
            steps = 0

            def count(step, snapshot):
                nonlocal steps
                steps += 1

            out = c
            for p in (cancel_cnot, cancel_hadamard):
                out, _ = with_invariants(p, T_COUNT)(out, observer=count)
            assert steps > 0
            assert metrics(out).t_count == metrics(c).t_count
        with pytest.raises(InvariantViolated) as info:
            with_invariants(drop_one_t, T_COUNT)(lowered)
        assert (info.value.name, info.value.step, info.value.before, info.value.after) == ("t-count", 1, 7, 6)
    assert clock.elapsed < 30.0


@pytest.mark.criterion(7, "200 random circuits: passes preserve the unitary, cancellation idempotent")
def test_optimizer_soundness_sweep():
    rng = np.random.default_rng(2024)
    passes = (cancel_cnot, cancel_hadamard, recompose_tt_to_s, commute_t_to_start)
    rewrites = 0
    with Clock() as clock:
        for _ in range(200):
            c = random_circuit(rng, max_qubits=8, max_gates=40)
            u = unitary_of(c)
            for p in passes:
                out, report = p(c)
                rewrites += report.rewrites_applied
                check_invariants(out)
                result = compare_unitaries(u, unitary_of(out), 1e-9)
                assert result.equivalent, (p.__name__, result)
                again, second = p(out)
                assert again == out and second.rewrites_applied == 0
    assert rewrites > 100  # the sweep actually exercised the rewrites
    assert clock.elapsed < 300.0


_ROW = re.compile(r"^(synth|synth-transpile|synth-opt),\d+,\d+,\d+,\d+,\d+,\d+,\d+,\d+,\d+\.\d{6}$")


@pytest.mark.slow
@pytest.mark.criterion(8, "scaling smoke test: SYNTH n=12, SYNTH_OPT n=8, exact CSV schema")
def test_scaling_smoke():
    synth_csv, opt_csv = io.StringIO(), io.StringIO()
    with Clock() as clock:
        [big] = run_bench(Scenario.SYNTH, [12], synth_csv)
    assert clock.elapsed < 600.0
    assert big.qubits == big.metrics.qubit_count == 8209

    [opt] = run_bench(Scenario.SYNTH_OPT, [8], opt_csv)
    pre, post = opt.pre_opt, opt.metrics
    assert post.t_count == pre.t_count
    assert post.qubit_count == pre.qubit_count
    assert post.toffoli_count == pre.toffoli_count == 0
    assert post.cnot_count <= pre.cnot_count and post.h_count <= pre.h_count
    assert post.qubit_count == bb_qubit_count(8) + 4 * (pre.t_count // 7)

    for text in (synth_csv.getvalue(), opt_csv.getvalue()):
        assert text.endswith("\n") and "\r" not in text
        header, *rows = text.rstrip("\n").split("\n")
        assert header == ",".join(CSV_HEADER)
        assert rows and all(_ROW.match(r) for r in rows)
