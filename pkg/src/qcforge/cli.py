"""
Command-line front end.

    qcforge analyze FILE [--t-dist]
    qcforge verify FILE [OTHER] [--truth-table]
    qcforge pipeline [-i FILE] [-o OUT] --step "synth bb --n 2" --step "transpile" ...
    qcforge bench {synth,synth-transpile,synth-opt} LO..HI OUT.csv [--force]
    qcforge strategies

Exit codes: 0 success, 1 other failure, 2 parse error, 3 invariant
violation, 4 resource guard.
"""
from __future__ import annotations

import argparse
import os
import shlex
import sys
from collections.abc import Sequence

from . import analysis, benchmarks, optimizers, textfmt, transpiler, verifier
from .errors import (
    InvariantViolated,
    ParseError,
    QcforgeError,
    ResourceGuardExceeded,
)
from .ir import Circuit, GateKind, GatePredicate, check_invariants, flag_gates

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_PARSE = 2
EXIT_INVARIANT = 3
EXIT_GUARD = 4


class StepError(QcforgeError):
    def __init__(self, index: int, name: str, cause: Exception):
        self.index = index
        self.cause = cause
        super().__init__(f"step {index} ({name}): {cause}")


class _ArgumentError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """Step parsers raise instead of exiting so errors carry the step index."""

    def error(self, message):
        raise _ArgumentError(message)


def _exit_code(exc: BaseException) -> int:
    if isinstance(exc, StepError):
        exc = exc.cause
    if isinstance(exc, ParseError):
        return EXIT_PARSE
    if isinstance(exc, InvariantViolated):
        return EXIT_INVARIANT
    if isinstance(exc, ResourceGuardExceeded):
        return EXIT_GUARD
    return EXIT_FAILURE


def _available_passes() -> dict:
    passes = dict(optimizers.PASSES)
    if os.environ.get("QCFORGE_TEST_HOOKS"):
        passes.update(optimizers.TEST_HOOK_PASSES)
    return passes


def _print_metrics(circuit: Circuit, t_dist: bool = False) -> None:
    print(analysis.metrics(circuit).summary())
    if t_dist:
        dist = analysis.t_distribution(circuit)
        print("t_distribution=" + ",".join(str(v) for v in dist.per_moment))


def _step_parsers() -> dict[str, argparse.ArgumentParser]:
    parsers = {}

    p = _Parser(prog="synth", add_help=False)
    p.add_argument("family", choices=["bb", "adder"])
    p.add_argument("--n", type=int, help="address bits (bb)")
    p.add_argument("--bits", type=int, help="operand width (adder)")
    p.add_argument("--memory", help="bb memory contents as a 0/1 string, cell 0 first")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--strategy", default=transpiler.NONE)
    parsers["synth"] = p

    p = _Parser(prog="transpile", add_help=False)
    p.add_argument("--strategy", default="TDEPTH1_4ANC")
    p.add_argument("--order", default="0,1,2")
    parsers["transpile"] = p

    p = _Parser(prog="flag", add_help=False)
    p.add_argument("kinds", help="comma-separated gate kinds, or 'all'")
    p.add_argument("--flag", type=int, required=True)
    p.add_argument("--qubits", help="comma-separated qubit names; gate support must lie inside")
    p.add_argument("--moments", help="moment range LO..HI")
    parsers["flag"] = p

    p = _Parser(prog="opt", add_help=False)
    p.add_argument("passes", help="comma-separated pass names")
    p.add_argument("--flagged", type=int, help="only rewrite gates carrying this flag")
    p.add_argument("--invariant", help="comma-separated invariants, e.g. t-count,qubit-count")
    parsers["opt"] = p

    p = _Parser(prog="verify", add_help=False)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--against")
    g.add_argument("--truth-table", action="store_true")
    p.add_argument("--tol", type=float, default=1e-9)
    parsers["verify"] = p

    p = _Parser(prog="analyze", add_help=False)
    p.add_argument("--t-dist", action="store_true")
    parsers["analyze"] = p
    return parsers


def _compare_files(current: Circuit, other: Circuit, tol: float) -> verifier.Equivalence:
    if current.qubit_names == other.qubit_names:
        return verifier.equivalent(other, current, tol)
    small, big = (other, current) if other.num_qubits <= current.num_qubits else (current, other)
    if not set(small.qubit_names) <= set(big.qubit_names):
        raise QcforgeError("registers are incompatible: neither contains the other")
    extra = set(big.qubit_names) - set(small.qubit_names)
    ancillae = [n for n in big.qubit_names if n in extra or n in transpiler.toffoli_ancillae(big)]
    return verifier.equivalent_on_clean_ancillae(small, big, ancillae, tol)


def _run_step(index: int, words: list[str], circuit: Circuit | None, parsers) -> Circuit:
    name = words[0]
    parser = parsers.get(name)
    if parser is None:
        raise _ArgumentError(f"unknown step {name!r}; expected one of {', '.join(parsers)}")
    args = parser.parse_args(words[1:])

    if name == "synth":
        if args.family == "bb":
            if args.n is None:
                raise _ArgumentError("synth bb needs --n")
            if args.memory is not None:
                spec = benchmarks.QramSpec(args.n, tuple(int(ch) for ch in args.memory), args.strategy)
            else:
                spec = benchmarks.QramSpec.random(args.n, args.seed, args.strategy)
            out = benchmarks.synth_bucket_brigade(spec)
        else:
            if args.bits is None:
                raise _ArgumentError("synth adder needs --bits")
            out = benchmarks.synth_adder(args.bits)
            if args.strategy != transpiler.NONE:
                out = transpiler.decompose_toffoli(out, args.strategy)
        print(f"[{index}] synth {args.family}: qubits={out.num_qubits} gates={analysis.metrics(out).gate_count}")
        return out

    if circuit is None:
        raise _ArgumentError(f"step {name!r} needs an input circuit (use -i or a synth step first)")

    if name == "transpile":
        order = [int(v) for v in args.order.split(",")]
        before = analysis.metrics(circuit)
        if any(o.kind is GateKind.MPMCT for o in circuit.operations()):
            out = transpiler.decompose_mpmct(circuit, args.strategy, order)
        else:
            out = transpiler.decompose_toffoli(circuit, args.strategy, order)
        delta = analysis.diff_metrics(before, analysis.metrics(out))
        print(f"[{index}] transpile {args.strategy}: {analysis.format_diff(delta)}")
        return out

    if name == "flag":
        kinds = None
        if args.kinds != "all":
            kinds = frozenset(GateKind[k.strip().upper()] for k in args.kinds.split(","))
        qubits = frozenset(args.qubits.split(",")) if args.qubits else None
        moments = benchmarks.parse_range(args.moments) if args.moments else None
        out = flag_gates(circuit, GatePredicate(kinds, qubits, moments), args.flag)
        print(f"[{index}] flag {args.kinds} with {args.flag}")
        return out

    if name == "opt":
        available = _available_passes()
        invariants = []
        if args.invariant:
            for inv in args.invariant.split(","):
                if inv not in optimizers.INVARIANTS:
                    raise _ArgumentError(f"unknown invariant {inv!r}; known: {', '.join(optimizers.INVARIANTS)}")
                invariants.append(optimizers.INVARIANTS[inv])
        out = circuit
        for pass_name in args.passes.split(","):
            if pass_name not in available:
                raise _ArgumentError(f"unknown pass {pass_name!r}; known: {', '.join(available)}")
            pass_ = available[pass_name]
            if invariants:
                pass_ = optimizers.with_invariants(pass_, invariants)
            before = analysis.metrics(out)
            out, report = pass_(out, flagged_only=args.flagged is not None, flag=args.flagged)
            delta = analysis.diff_metrics(before, analysis.metrics(out))
            print(f"[{index}] {report.summary()}")
            print(f"[{index}] delta {analysis.format_diff(delta)}")
        return out

    if name == "verify":
        if args.truth_table:
            table = verifier.truth_table(circuit)
            fixed = int((table == range(len(table))).sum())
            print(f"[{index}] truth_table rows={len(table)} fixed_points={fixed}")
            return circuit
        other = textfmt.read_file(args.against)
        result = _compare_files(circuit, other, args.tol)
        print(f"[{index}] verify against {args.against}: equivalent={result.equivalent} "
              f"max_deviation={result.max_deviation:.3e}")
        if not result:
            raise QcforgeError(f"circuits differ; witness basis input {result.witness}")
        return circuit

    if name == "analyze":
        print(f"[{index}] analyze")
        _print_metrics(circuit, args.t_dist)
        return circuit

    raise _ArgumentError(f"unhandled step {name!r}")


def cmd_pipeline(args) -> int:
    circuit = textfmt.read_file(args.input) if args.input else None
    parsers = _step_parsers()
    for index, step in enumerate(args.step):
        words = shlex.split(step)
        if not words:
            continue
        try:
            circuit = _run_step(index, words, circuit, parsers)
        except (QcforgeError, _ArgumentError, ValueError, KeyError) as exc:
            raise StepError(index, words[0], exc) from exc
    if circuit is None:
        raise QcforgeError("pipeline produced no circuit")
    check_invariants(circuit)
    if args.output:
        textfmt.write_file(args.output, circuit)
        print(f"wrote {args.output}")
    return EXIT_OK


def cmd_analyze(args) -> int:
    _print_metrics(textfmt.read_file(args.file), args.t_dist)
    return EXIT_OK


def cmd_verify(args) -> int:
    circuit = textfmt.read_file(args.file)
    limit = args.limit
    if args.truth_table:
        table = verifier.truth_table(circuit)
        width = circuit.num_qubits
        for i, out in enumerate(table):
            print(f"{i:0{width}b} -> {int(out):0{width}b}")
        return EXIT_OK
    if args.other is None:
        u = verifier.unitary_of(circuit, limit)
        print(f"unitary dim={u.shape[0]} unitary={verifier.is_unitary(u)}")
        return EXIT_OK
    other = textfmt.read_file(args.other)
    result = _compare_files(circuit, other, args.tol)
    print(f"equivalent={result.equivalent} max_deviation={result.max_deviation:.3e}"
          + ("" if result.witness is None else f" witness={result.witness}"))
    return EXIT_OK if result else EXIT_FAILURE


def cmd_bench(args) -> int:
    scenario = benchmarks.Scenario(args.scenario)
    n_range = benchmarks.parse_range(args.range)

    def progress(r: benchmarks.BenchRecord) -> None:
        m = r.metrics
        pre = "" if r.pre_opt is None else f" t_pre={r.pre_opt.t_count} cnot_pre={r.pre_opt.cnot_count} h_pre={r.pre_opt.h_count}"
        print(f"{r.scenario.value} n={r.n} qubits={r.qubits} ancillae={m.qubit_count - r.qubits} gates={m.gate_count} "
              f"t={m.t_count}{pre} elapsed_s={r.elapsed_seconds:.3f}")

    if not args.force:
        benchmarks.check_guard(scenario, n_range, args.guard)
    with open(args.csv, "w", newline="", encoding="utf-8") as fh:
        benchmarks.run_bench(scenario, n_range, fh, strategy=args.strategy, guard=args.guard,
                             seed=args.seed, force=args.force, progress=progress)
    return EXIT_OK


def cmd_strategies(args) -> int:
    for s in transpiler.list_strategies():
        print(f"{s.name}\tancillae={s.ancilla_count}\tt_count={s.t_count}\tt_depth={s.t_depth}\t{s.description}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qcforge", description="Clifford+T circuit toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="print resource metrics of a .qc file")
    p.add_argument("file")
    p.add_argument("--t-dist", action="store_true", help="also print the per-moment T distribution")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("verify", help="unitary / truth-table checks")
    p.add_argument("file")
    p.add_argument("other", nargs="?")
    p.add_argument("--truth-table", action="store_true")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--limit", type=int, default=None, help="simulator qubit limit")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("pipeline", help="run steps in order")
    p.add_argument("-i", "--input")
    p.add_argument("-o", "--output")
    p.add_argument("--step", action="append", default=[], required=True,
                   help="one step directive, e.g. 'opt cancel-cnot,cancel-h --invariant t-count'")
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("bench", help="time QRAM synthesis scenarios")
    p.add_argument("scenario", choices=[s.value for s in benchmarks.Scenario])
    p.add_argument("range", help="address sizes LO..HI")
    p.add_argument("csv")
    p.add_argument("--strategy", default="TDEPTH1_4ANC")
    p.add_argument("--guard", type=int, default=None, help="override the max n for this scenario")
    p.add_argument("--force", action="store_true", help="ignore the resource guard")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("strategies", help="list Toffoli decomposition strategies")
    p.set_defaults(func=cmd_strategies)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (QcforgeError, _ArgumentError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _exit_code(exc)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
