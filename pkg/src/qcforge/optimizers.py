"""
Rewrite passes.

FlagOptimiser family (cancel_cnot, cancel_hadamard, recompose_tt_to_s):
adjacent pairs are found wire-wise, i.e. two gates are adjacent when no other
surviving gate touches any of their qubits in between.  Pairs are resolved
left to right, innermost first, with one stack per wire, so a single sweep
reaches the fixed point.  When a pair is cancelled its flags move to the
nearest earlier and nearest later surviving gates that touch the pair's
qubits.

commute_t_to_start slides T/T-dagger gates towards the circuit input through
gates they commute with.  with_invariants wraps any pass and re-measures a
set of circuit properties after each rewrite.

Every pass has the signature
``pass_(circuit, *, flagged_only=False, flag=None, observer=None)`` and returns
``(circuit, RewriteReport)``.  ``observer(step, snapshot)`` is called after each
rewrite; ``snapshot()`` builds the intermediate circuit on demand.
"""
from __future__ import annotations

import heapq
from collections import Counter
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

from .errors import FlagRequired, InvariantViolated
from .ir import T_KINDS, Circuit, GateKind, Operation, from_operations

Observer = Callable[[int, Callable[[], Circuit]], None]
Rule = Callable[[Operation, Operation], "Operation | bool"]


@dataclass
class RewriteReport:
    pass_name: str
    rewrites_applied: int = 0
    gates_removed: Counter = field(default_factory=Counter)
    gates_added: Counter = field(default_factory=Counter)
    flags_transferred: int = 0
    iterations: int = 0

    def summary(self) -> str:
        removed = ",".join(f"{k.value}:{v}" for k, v in sorted(self.gates_removed.items(), key=lambda kv: kv[0].value))
        return (
            f"{self.pass_name}: rewrites={self.rewrites_applied} removed={removed or '-'} "
            f"flags_transferred={self.flags_transferred} iterations={self.iterations}"
        )


def _survivors(ops: list[Operation], alive: list[bool]) -> list[Operation]:
    return [o for o, a in zip(ops, alive) if a]


def _sweep(register, ops: list[Operation], kind: GateKind, rule: Rule, report: RewriteReport,
           flagged_only: bool, flag: int | None, observer: Observer | None) -> list[Operation]:
    n = len(ops)
    nq = len(register)
    # next gate on each wire, in stream order
    nxt: list[dict[int, int]] = [dict() for _ in range(n)]
    last = [-1] * nq
    for p in range(n - 1, -1, -1):
        for i in ops[p].indices:
            if last[i] >= 0:
                nxt[p][i] = last[i]
            last[i] = p
    alive = [True] * n
    stacks: list[list[int]] = [[] for _ in range(nq)]

    def eligible(o: Operation) -> bool:
        return o.kind is kind and (not flagged_only or flag in o.flags)

    for p in range(n):
        o = ops[p]
        idx = o.indices
        r = -1
        if eligible(o):
            tops = {stacks[i][-1] if stacks[i] else -1 for i in idx}
            if len(tops) == 1:
                r = tops.pop()
        outcome = False
        if r >= 0 and eligible(ops[r]) and ops[r].indices == idx:
            outcome = rule(ops[r], o)
        if outcome is False:
            for i in idx:
                stacks[i].append(p)
            continue

        report.rewrites_applied += 1
        report.gates_removed[o.kind] += 2
        alive[p] = False
        if isinstance(outcome, Operation):
            # merged in place of the earlier gate, which stays on the stacks
            ops[r] = outcome
            report.gates_added[outcome.kind] += 1
        else:
            alive[r] = False
            for i in idx:
                stacks[i].pop()
            moved = ops[r].flags | o.flags
            if moved:
                earlier = max((stacks[i][-1] for i in idx if stacks[i]), default=-1)
                later = min((nxt[p][i] for i in idx if i in nxt[p]), default=-1)
                for target in (earlier, later):
                    if target >= 0:
                        ops[target] = ops[target].add_flags(moved)
                        report.flags_transferred += 1
        if observer is not None:
            observer(report.rewrites_applied, lambda: from_operations(register, _survivors(ops, alive)))
    return _survivors(ops, alive)


def _flag_pass(name: str, kind: GateKind, rule: Rule):
    def run(circuit: Circuit, *, flagged_only: bool = False, flag: int | None = None,
            observer: Observer | None = None) -> tuple[Circuit, RewriteReport]:
        if flagged_only and flag is None:
            raise FlagRequired(f"{name}: flagged_only needs a flag label")
        report = RewriteReport(name)
        ops = list(circuit.operations())
        while True:
            before = report.rewrites_applied
            ops = _sweep(circuit.register, ops, kind, rule, report, flagged_only, flag, observer)
            report.iterations += 1
            if report.rewrites_applied == before:
                break
        if report.rewrites_applied == 0:
            return circuit, report
        return from_operations(circuit.register, ops), report

    run.__name__ = name.replace("-", "_")
    return run


def _self_inverse(a: Operation, b: Operation) -> bool:
    return a.same_gate(b)


def _tt_to_s(a: Operation, b: Operation) -> Operation | bool:
    if a.kind is not b.kind:
        return False
    merged = GateKind.S if a.kind is GateKind.T else GateKind.SDAG
    return Operation(merged, a.qubits, flags=a.flags | b.flags)


cancel_cnot = _flag_pass("cancel-cnot", GateKind.CNOT, _self_inverse)
cancel_cnot.__doc__ = """Cancel wire-adjacent CNOT pairs with identical control and target."""

cancel_hadamard = _flag_pass("cancel-h", GateKind.H, _self_inverse)
cancel_hadamard.__doc__ = """Cancel wire-adjacent H pairs on the same qubit."""

_recompose_t = _flag_pass("recompose-s", GateKind.T, _tt_to_s)
_recompose_tdag = _flag_pass("recompose-s", GateKind.TDAG, _tt_to_s)


def recompose_tt_to_s(circuit: Circuit, *, flagged_only: bool = False, flag: int | None = None,
                      observer: Observer | None = None) -> tuple[Circuit, RewriteReport]:
    """Merge adjacent T;T into S and T†;T† into S† (no flag transfer: the gate survives)."""
    first, r1 = _recompose_t(circuit, flagged_only=flagged_only, flag=flag, observer=observer)
    offset = r1.rewrites_applied

    def shifted(step, snap):
        observer(step + offset, snap)

    out, r2 = _recompose_tdag(first, flagged_only=flagged_only, flag=flag,
                              observer=shifted if observer else None)
    report = RewriteReport(
        "recompose-s",
        r1.rewrites_applied + r2.rewrites_applied,
        r1.gates_removed + r2.gates_removed,
        r1.gates_added + r2.gates_added,
        0,
        max(r1.iterations, r2.iterations),
    )
    return out, report


def t_commutes_with(t_qubit: int, other: Operation) -> bool:
    """Closed commutation table for a T/T-dagger on ``t_qubit`` meeting ``other``."""
    kind = other.kind
    if kind in (GateKind.S, GateKind.SDAG, GateKind.T, GateKind.TDAG, GateKind.CZ):
        return True
    if kind is GateKind.CNOT:
        return other.qubits[0].index == t_qubit
    return False


def _linearize(ops: list[Operation], wires: list[list[int]], keys: list[float]) -> list[Operation]:
    """Topological order consistent with every wire sequence, smallest key first."""
    preds = [0] * len(ops)
    succ: list[list[int]] = [[] for _ in ops]
    for seq in wires:
        for a, b in zip(seq, seq[1:]):
            succ[a].append(b)
            preds[b] += 1
    heap = [(keys[p], p) for p in range(len(ops)) if preds[p] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        _, p = heapq.heappop(heap)
        order.append(ops[p])
        for s in succ[p]:
            preds[s] -= 1
            if preds[s] == 0:
                heapq.heappush(heap, (keys[s], s))
    return order


def commute_t_to_start(circuit: Circuit, *, flagged_only: bool = False, flag: int | None = None,
                       observer: Observer | None = None) -> tuple[Circuit, RewriteReport]:
    """Move every T/T-dagger as far towards the input as the commutation table allows.

    A T stops behind another T-type gate on its wire, so repeated runs are
    stable.  Flag arguments are accepted for interface uniformity and ignored.
    """
    report = RewriteReport("commute-t-start", iterations=1)
    ops = list(circuit.operations())
    wires: list[list[int]] = [[] for _ in circuit.register]
    for p, o in enumerate(ops):
        for i in o.indices:
            wires[i].append(p)
    keys = [float(p) for p in range(len(ops))]

    for p, o in enumerate(ops):
        if o.kind not in T_KINDS:
            continue
        q = o.indices[0]
        seq = wires[q]
        pos = seq.index(p)
        dest = pos
        while dest > 0:
            prev = ops[seq[dest - 1]]
            if prev.kind in T_KINDS or not t_commutes_with(q, prev):
                break
            dest -= 1
        if dest == pos:
            continue
        seq.pop(pos)
        seq.insert(dest, p)
        keys[p] = keys[seq[dest - 1]] + 0.5 if dest > 0 else -1.0 - p / (len(ops) + 1)
        report.rewrites_applied += 1
        if observer is not None:
            observer(report.rewrites_applied, lambda: from_operations(circuit.register, _linearize(ops, wires, keys)))

    if report.rewrites_applied == 0:
        return circuit, report
    return from_operations(circuit.register, _linearize(ops, wires, keys)), report


@dataclass(frozen=True)
class InvariantSpec:
    """A circuit measure expected to stay constant across a pass."""

    name: str
    measure: Callable[[Circuit], int]


def _count(*kinds: GateKind) -> Callable[[Circuit], int]:
    ks = frozenset(kinds)
    return lambda c: sum(1 for o in c.operations() if o.kind in ks)


INVARIANTS: dict[str, InvariantSpec] = {
    spec.name: spec
    for spec in (
        InvariantSpec("t-count", _count(GateKind.T, GateKind.TDAG)),
        InvariantSpec("h-count", _count(GateKind.H)),
        InvariantSpec("cnot-count", _count(GateKind.CNOT)),
        InvariantSpec("toffoli-count", _count(GateKind.TOFFOLI)),
        InvariantSpec("qubit-count", lambda c: c.num_qubits),
    )
}


def with_invariants(pass_, invariants: Sequence[InvariantSpec]):
    """Wrap ``pass_`` so each invariant is re-measured after every rewrite.

    Raises InvariantViolated(name, step, before, after) at the first deviation.
    The final output is checked as well, which catches passes that never
    report intermediate steps.
    """
    invariants = list(invariants)
    if not invariants:
        raise ValueError("with_invariants needs at least one invariant")

    def wrapped(circuit: Circuit, *, flagged_only: bool = False, flag: int | None = None,
                observer: Observer | None = None) -> tuple[Circuit, RewriteReport]:
        baseline = {inv.name: inv.measure(circuit) for inv in invariants}

        def check(step: int, current: Circuit) -> None:
            for inv in invariants:
                value = inv.measure(current)
                if value != baseline[inv.name]:
                    raise InvariantViolated(inv.name, step, baseline[inv.name], value)

        def watch(step: int, snapshot: Callable[[], Circuit]) -> None:
            check(step, snapshot())
            if observer is not None:
                observer(step, snapshot)

        out, report = pass_(circuit, flagged_only=flagged_only, flag=flag, observer=watch)
        check(report.rewrites_applied, out)
        return out, report

    wrapped.__name__ = f"invariant_checked_{getattr(pass_, '__name__', 'pass')}"
    return wrapped


def drop_one_t(circuit: Circuit, *, flagged_only: bool = False, flag: int | None = None,
               observer: Observer | None = None) -> tuple[Circuit, RewriteReport]:
    """Fault-injection pass: deletes the first T/T-dagger gate.  For testing invariant checks."""
    report = RewriteReport("drop-t", iterations=1)
    ops = list(circuit.operations())
    for p, o in enumerate(ops):
        if o.kind in T_KINDS:
            del ops[p]
            report.rewrites_applied = 1
            report.gates_removed[o.kind] += 1
            if observer is not None:
                observer(1, lambda: from_operations(circuit.register, ops))
            return from_operations(circuit.register, ops), report
    return circuit, report


PASSES = {
    "cancel-cnot": cancel_cnot,
    "cancel-h": cancel_hadamard,
    "commute-t-start": commute_t_to_start,
    "recompose-s": recompose_tt_to_s,
}

TEST_HOOK_PASSES = {"drop-t": drop_one_t}


def run_to_fixed_point(circuit: Circuit, passes: Sequence, max_rounds: int = 100) -> tuple[Circuit, list[RewriteReport]]:
    """Alternate ``passes`` until a full round applies no rewrite."""
    reports = []
    for _ in range(max_rounds):
        changed = False
        for pass_ in passes:
            circuit, report = pass_(circuit)
            reports.append(report)
            changed |= report.rewrites_applied > 0
        if not changed:
            break
    return circuit, reports
