"""Exception types shared across the package."""


class MixcsError(Exception):
    """Base class for all package errors."""


class ValidationError(MixcsError, ValueError):
    """Malformed input: bad dimensions, bad probabilities, bad config keys."""


class ExhaustiveGuardError(ValidationError):
    """Support enumeration would exceed the combinatorial guard."""


class SingularIntervalError(ValidationError):
    """A sigma-interval denominator degenerates to zero or below."""


class RankDeficientError(MixcsError):
    """Measurement matrix too close to row-rank deficiency for the affine projection."""


class UnboundedProblemError(MixcsError):
    """Simplex detected an unbounded objective direction."""
