"""Exception types shared across the package."""


class SebLabError(Exception):
    """Base class for all package errors."""


class ValidationError(SebLabError):
    """Invalid input data (bad radius, non-finite entries, schema violation)."""


class DimensionMismatch(SebLabError):
    """Operands live in different ambient dimensions."""


class InconsistentSystem(SebLabError):
    """An affine solution set was required but the system has no solution."""


class NonConvergence(SebLabError):
    """Iterative solver hit its iteration budget above the gap tolerance."""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class CombinatorialBlowup(SebLabError):
    """Enumeration oracle would exceed its size guard."""


class SingularTransform(SebLabError):
    """A transformation required to be invertible is numerically singular."""


class UnsupportedRegime(SebLabError):
    """Operation is only defined when the center ranks satisfy the gating condition."""


class EmptyInteriorError(SebLabError):
    """The ball intersection has no interior point."""


class RejectionStall(SebLabError):
    """Rejection sampling acceptance rate collapsed."""


class DimensionTooLarge(SebLabError):
    """Grid oracle guard: exhaustive search only supported in low dimension."""


class ValidationFailure(SebLabError):
    """A solver self-check identity failed beyond tolerance (likely a bug)."""
