"""Exception hierarchy shared by all qcforge modules."""

from __future__ import annotations


class QcforgeError(Exception):
    """Base class for every error raised by qcforge."""


class CircuitError(QcforgeError):
    """Structural problem with a circuit or operation."""


class EmptyRegister(CircuitError):
    pass


class DuplicateQubitName(CircuitError):
    pass


class ArityMismatch(CircuitError):
    pass


class UnknownQubit(CircuitError):
    def __init__(self, name: str, line: int | None = None):
        self.name = name
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}unknown qubit {name!r}")


class ParseError(QcforgeError):
    """Raised by the text-format parser; always carries a 1-based line number."""

    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


class CircuitSyntaxError(ParseError):
    pass


class UnknownGate(ParseError):
    pass


class DuplicateQubitInGate(ParseError):
    pass


class UnknownQubitInFile(ParseError):
    pass


class TranspileError(QcforgeError):
    pass


class UnknownStrategy(TranspileError):
    pass


class UnsupportedGate(QcforgeError):
    pass


class OptimizerError(QcforgeError):
    pass


class FlagRequired(OptimizerError):
    pass


class InvariantViolated(OptimizerError):
    def __init__(self, name: str, step: int, before: int, after: int):
        self.name = name
        self.step = step
        self.before = before
        self.after = after
        super().__init__(
            f"invariant {name!r} violated at rewrite step {step}: {before} -> {after}"
        )


class VerificationError(QcforgeError):
    pass


class TooManyQubits(VerificationError):
    pass


class NonClassicalGate(VerificationError):
    pass


class BenchmarkError(QcforgeError):
    pass


class InvalidAddressSize(BenchmarkError):
    pass


class MemoryLengthMismatch(BenchmarkError):
    pass


class ResourceGuardExceeded(BenchmarkError):
    pass
