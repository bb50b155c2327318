"""
Line-based ``.qc`` circuit format.

    qubits a0 a1 t
    TOFFOLI a0 a1 t      # comment
    H t !1,2             # trailing !labels are flags
    ---                  # force a new moment
    MPMCT +a0 -a1 t      # sign prefix = control polarity (default +)

Gates between ``---`` separators are packed EARLIEST inside their segment.
"""
from __future__ import annotations

from .errors import (
    CircuitSyntaxError,
    DuplicateQubitInGate,
    UnknownGate,
    UnknownQubitInFile,
)
from .ir import Circuit, CircuitBuilder, GateKind, Operation

SEPARATOR = "---"

_KEYWORDS = {
    "X": GateKind.X,
    "H": GateKind.H,
    "S": GateKind.S,
    "SDAG": GateKind.SDAG,
    "T": GateKind.T,
    "TDAG": GateKind.TDAG,
    "CNOT": GateKind.CNOT,
    "CZ": GateKind.CZ,
    "TOFFOLI": GateKind.TOFFOLI,
    "MPMCT": GateKind.MPMCT,
}


def _parse_flags(token: str, lineno: int) -> frozenset[int]:
    body = token[1:]
    if not body:
        raise CircuitSyntaxError(lineno, "empty flag annotation")
    flags = set()
    for part in body.split(","):
        if not part.isdigit():
            raise CircuitSyntaxError(lineno, f"flag labels must be non-negative integers, got {part!r}")
        flags.add(int(part))
    return frozenset(flags)


def parse(text: str) -> Circuit:
    """Parse ``.qc`` text into a Circuit.

    Raises CircuitSyntaxError, UnknownGate, UnknownQubitInFile or
    DuplicateQubitInGate, each carrying the 1-based line number.
    """
    builder: CircuitBuilder | None = None
    saw_gate = False
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        head = tokens[0]
        if head == "qubits":
            if saw_gate:
                raise CircuitSyntaxError(lineno, "qubit declarations must precede gates")
            if len(tokens) < 2:
                raise CircuitSyntaxError(lineno, "'qubits' needs at least one name")
            builder = builder or CircuitBuilder()
            for name in tokens[1:]:
                if builder.has_qubit(name):
                    raise CircuitSyntaxError(lineno, f"qubit {name!r} declared twice")
                if name.startswith(("+", "-", "!")) or name == SEPARATOR:
                    raise CircuitSyntaxError(lineno, f"invalid qubit name {name!r}")
                builder.add_qubit(name)
            continue
        if builder is None:
            raise CircuitSyntaxError(lineno, "missing 'qubits' header")
        if head == SEPARATOR:
            if len(tokens) != 1:
                raise CircuitSyntaxError(lineno, "unexpected tokens after separator")
            builder.barrier()
            continue
        kind = _KEYWORDS.get(head)
        if kind is None:
            raise UnknownGate(lineno, f"unknown gate {head!r}")
        saw_gate = True
        args = tokens[1:]
        flags: frozenset[int] = frozenset()
        if args and args[-1].startswith("!"):
            flags = _parse_flags(args[-1], lineno)
            args = args[:-1]
        polarities = None
        if kind is GateKind.MPMCT:
            if len(args) < 2:
                raise CircuitSyntaxError(lineno, "MPMCT needs at least one control and a target")
            pols = []
            names = []
            for a in args[:-1]:
                sign, name = (a[0], a[1:]) if a[:1] in "+-" else ("+", a)
                if not name:
                    raise CircuitSyntaxError(lineno, f"bad control token {a!r}")
                pols.append(sign == "+")
                names.append(name)
            if args[-1][:1] in "+-":
                raise CircuitSyntaxError(lineno, "target cannot carry a polarity")
            names.append(args[-1])
            polarities = tuple(pols)
        else:
            if len(args) != kind.arity:
                raise CircuitSyntaxError(
                    lineno, f"{head} takes {kind.arity} qubit(s), got {len(args)}"
                )
            names = args
        if len(set(names)) != len(names):
            raise DuplicateQubitInGate(lineno, f"{head} repeats a qubit")
        qubits = []
        for name in names:
            if not builder.has_qubit(name):
                raise UnknownQubitInFile(lineno, f"unknown qubit {name!r}")
            qubits.append(builder.qubit(name))
        builder.append(Operation(kind, tuple(qubits), polarities, flags))
    if builder is None:
        raise CircuitSyntaxError(1, "missing 'qubits' header")
    return builder.build()


def _format_operation(o: Operation) -> str:
    if o.kind is GateKind.MPMCT:
        args = [("" if p else "-") + q.name for q, p in zip(o.controls, o.polarities)]
        args.append(o.target.name)
    else:
        args = [q.name for q in o.qubits]
    parts = [o.kind.value, *args]
    if o.flags:
        parts.append("!" + ",".join(str(f) for f in sorted(o.flags)))
    return " ".join(parts)


def serialize(circuit: Circuit) -> str:
    """Emit ``.qc`` text; moments are separated by ``---`` so parse() restores them exactly."""
    lines = ["qubits " + " ".join(circuit.qubit_names)]
    for i, m in enumerate(circuit.moments):
        if i:
            lines.append(SEPARATOR)
        for o in sorted(m.operations, key=lambda o: min(o.indices)):
            lines.append(_format_operation(o))
    return "\n".join(lines) + "\n"


def read_file(path) -> Circuit:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


def write_file(path, circuit: Circuit) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(serialize(circuit))
