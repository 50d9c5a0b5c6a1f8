"""Exception types shared across the package."""


class GnewtonError(Exception):
    """Base class for every error raised by this package."""


class NotSquare(GnewtonError):
    pass


class SingularMatrix(GnewtonError):
    pass


class NonFiniteEvaluation(GnewtonError):
    pass


class UnknownProblem(GnewtonError):
    pass


class UnknownGeneralizer(GnewtonError):
    pass


class ParseError(GnewtonError):
    """Malformed problem text; carries 1-based line and column."""

    def __init__(self, message, line=0, column=0):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class ArityError(GnewtonError):
    pass


class UnknownIdentifier(GnewtonError):
    pass


class SingularJacobian(GnewtonError):
    """The Newton step is undefined because the system Jacobian is singular."""


class InvalidStep(GnewtonError):
    """The update left the domain where the change of variables is invertible."""


class NoConvergence(GnewtonError):
    pass


class EmptyWindow(GnewtonError):
    """No iterate errors fell inside the measurement window."""


class NotFixedPoint(GnewtonError):
    pass


class DimensionMismatch(GnewtonError):
    pass


class NoSuccessfulStarts(GnewtonError):
    pass


class ZeroSuccessRate(GnewtonError):
    pass
