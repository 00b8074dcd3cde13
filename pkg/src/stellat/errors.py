"""Exception hierarchy shared by all stellat modules."""


class StellatError(Exception):
    """Base class for every error raised by this package."""


class DimensionMismatch(StellatError, ValueError):
    pass


class InvariantViolation(StellatError, ValueError):
    """An element failed its class invariants (pole-freeness, properness, grading)."""


class ToleranceUnreachable(StellatError, RuntimeError):
    """A certified computation exhausted its budget before reaching the tolerance."""


class NonzeroConstantTerm(StellatError, ValueError):
    """f(0) != 0: the composition would leave the non-unital class."""


class SeriesRadiusExceeded(StellatError, ValueError):
    pass


class DomainMismatch(StellatError, TypeError):
    """A state was applied to an element outside its domain."""


class InvalidState(StellatError, ValueError):
    pass


class UnknownSuite(StellatError, KeyError):
    pass


class ConfigError(StellatError, ValueError):
    pass
