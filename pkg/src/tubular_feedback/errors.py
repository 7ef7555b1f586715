"""Exception types raised across the toolkit."""


class ReactorError(Exception):
    """Base class for every error raised by this package."""


class InvalidBracket(ReactorError, ValueError):
    pass


class NoConvergence(ReactorError, RuntimeError):
    pass


class SingularMatrix(ReactorError, ArithmeticError):
    pass


class SingularJacobian(SingularMatrix):
    pass


class DegenerateInput(ReactorError, ValueError):
    pass


class OutOfDomain(ReactorError, ValueError):
    pass


class InvalidSpectrum(ReactorError, ValueError):
    """Raised when a decay computation receives a non-negative principal eigenvalue."""


class Unsupported(ReactorError, ValueError):
    pass


class InconsistentInput(ReactorError, ValueError):
    pass


class NegativeBase(ReactorError, ValueError):
    """Fractional power of a negative concentration was requested."""


class NonFiniteState(ReactorError, FloatingPointError):
    pass


class NegativeConcentration(ReactorError, ValueError):
    pass


class InsufficientData(ReactorError, ValueError):
    pass


class ParseError(ReactorError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class UnknownKey(ReactorError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "unknown key"
