"""Exception hierarchy shared by every module in the package."""


class TimeInfoError(ValueError):
    """Base class for all errors raised by :mod:`timeinfo`."""


class ZeroLengthInterval(TimeInfoError):
    pass


class UnboundedWindow(TimeInfoError):
    pass


class InvalidTimeMomentSet(TimeInfoError):
    pass


class InvalidKernel(TimeInfoError):
    pass


class InvalidChain(TimeInfoError):
    """Raised when an operation requires a chain that passes validation."""

    def __init__(self, report):
        self.report = report
        lines = "; ".join(str(v) for v in report.violations)
        super().__init__(f"chain failed validation: {lines}")


class ArityMismatch(TimeInfoError):
    pass


class UnknownLabel(TimeInfoError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else ""


class NotDeterministic(TimeInfoError):
    pass


class NotRefinement(TimeInfoError):
    pass


class MissingRealization(TimeInfoError):
    pass


class ImpossibleRealization(TimeInfoError):
    pass


class IdentityViolation(TimeInfoError, ArithmeticError):
    """An information identity that must hold by construction failed numerically."""


class TooLarge(TimeInfoError):
    pass


class InvalidFrame(TimeInfoError):
    pass
