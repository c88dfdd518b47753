"""Exception hierarchy shared by all engine modules."""


class EngineError(Exception):
    """Base class for every error raised by this package."""


class RejectedInput(EngineError, ValueError):
    """An argument violates a documented precondition."""


class PoleAtBasepoint(EngineError):
    """A rational function was expanded about a point where its denominator vanishes."""


class InsufficientData(EngineError):
    """A reconstruction system is underdetermined."""


class ReconstructionFailed(EngineError):
    """A reconstruction system is inconsistent (wrong ansatz or corrupted data)."""


class ResonanceFailure(EngineError):
    """A solvability condition at a resonant series order does not hold."""


class VerificationFailure(EngineError):
    """A machine-checked identity has a nonzero residual.

    Carries enough context (identity tag, site, order) in the message to
    locate the first failure.
    """


class DegenerateTable(EngineError):
    """A leading Hankel determinant vanished where positivity is guaranteed."""


class NoMatchingExists(EngineError):
    """A perfect matching was requested on an odd number of half-edges."""


class SizeLimit(EngineError):
    """An exhaustive enumeration exceeds the configured desk-scale cap."""
