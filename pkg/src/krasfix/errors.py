"""Exception hierarchy."""


class KrasfixError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(KrasfixError, ValueError):
    """Invalid argument or configuration value."""


class DomainError(KrasfixError, ValueError):
    """A point lies outside the function's domain."""

    def __init__(self, x, domain):
        self.x = x
        self.domain = domain
        super().__init__(f"x = {x!r} is outside [{domain.lo}, {domain.hi}]")


class EvaluationError(KrasfixError, ArithmeticError):
    """A function (or derivative) could not be evaluated to a finite real.

    When raised from inside a solver, ``trace`` holds the iterates computed
    before the failure.
    """

    def __init__(self, x, message, trace=None):
        self.x = x
        self.trace = trace
        super().__init__(f"at x = {x!r}: {message}")


class DerivativeZeroError(KrasfixError, ArithmeticError):
    def __init__(self, x, value, trace=None):
        self.x = x
        self.value = value
        self.trace = trace
        super().__init__(f"derivative vanishes at x = {x!r} (h'(x) = {value!r})")


class PreconditionViolation(KrasfixError):
    """A hypothesis promised by the caller turned out false during a run."""

    def __init__(self, message, trace=None):
        self.trace = trace
        super().__init__(message)


class BracketError(KrasfixError, ValueError):
    def __init__(self, a, b, fa, fb):
        self.a, self.b, self.fa, self.fb = a, b, fa, fb
        super().__init__(f"f({a!r}) = {fa!r} and f({b!r}) = {fb!r} do not bracket a root")
