"""Exception types shared across the package."""


class LogtractError(Exception):
    """Base class for all package errors."""

    kind = "LogtractError"


class DomainError(LogtractError):
    """An argument lies outside the domain where an operation is defined."""

    kind = "DomainError"


class BranchCutError(DomainError):
    """A logarithm argument fell on (or within tolerance of) its branch cut."""

    kind = "BranchCutError"


class ContractRegimeError(LogtractError):
    """Pullback requested on a transform whose tracts do not certify the
    half-speed contraction (normalized margin < 0)."""

    kind = "ContractRegimeError"


class AddressNotRealized(LogtractError):
    """No point with the requested itinerary is reachable: either an index is
    outside the configured window or a pullback left the right half-plane."""

    kind = "AddressNotRealized"


class ItineraryUnreadable(LogtractError):
    """An orbit point is too close to a tract boundary (or its band index is
    below float resolution), so its itinerary entry cannot be certified."""

    kind = "ItineraryUnreadable"


class TailTooShort(LogtractError):
    """A projection scan ran past the traced end of a hair."""

    kind = "TailTooShort"


class UnresolvedTail(LogtractError):
    """Adaptive refinement exhausted its sample budget before reaching the
    requested spacing."""

    kind = "UnresolvedTail"


class OrbitLeftHalfPlane(LogtractError):
    """A forward orbit dropped below the working half-plane before the
    requested depth."""

    kind = "OrbitLeftHalfPlane"

    def __init__(self, step: int, message: str = ""):
        self.step = step
        super().__init__(message or f"orbit left the half-plane at step {step}")


class VerificationFailure(LogtractError):
    """A hard invariant check failed."""

    kind = "VerificationFailure"
