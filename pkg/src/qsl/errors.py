"""Exception hierarchy.

Two branches matter operationally: :class:`PreconditionError` means the
caller handed us data that violates a documented contract (CLI exit 2),
:class:`NumericError` means a computation could not be carried to the
requested certainty (CLI exit 3).
"""


class QslError(Exception):
    """Base class for all package errors."""


class PreconditionError(QslError):
    """A documented precondition of an operation was violated."""


class NumericError(QslError):
    """A numeric procedure failed to reach its certified target."""


# -- exponential-sum algebra -------------------------------------------------

class NormTooLarge(PreconditionError):
    """log(1 + P) requires Wiener norm of P strictly below 1."""


class CapExceeded(NumericError):
    """An operation would materialize more than the stored-term cap."""


class NumericOverflow(NumericError):
    """A damped/amplified coefficient left the double-precision range."""


# -- zero location -----------------------------------------------------------

class EndpointNotAttained(PreconditionError):
    """A spectrum endpoint carries no coefficient above the drop threshold."""


class DegenerateSpectrum(PreconditionError):
    """The centered spectrum has zero half-width (single frequency)."""


class BoundaryZero(NumericError):
    """The boundary minimum modulus fell below the safety threshold."""


class NonIntegerWinding(NumericError):
    """The contour integral did not converge to an integer winding number."""


class ResolutionLimit(NumericError):
    """Rectangle subdivision hit the resolution floor without separating."""


class TooFewPoints(PreconditionError):
    """Numbering a zero set needs at least 10 points around the origin."""


class ZeroEscape(NumericError):
    """A scan point far from every known zero has near-zero modulus."""


class ZeroAtOrigin(PreconditionError):
    """The operation requires the origin not to belong to the zero set."""


class NotNumbered(PreconditionError):
    """The zero set has not been numbered (no rho / phi table)."""


# -- transforms and pairings -------------------------------------------------

class QuadratureNotConverged(NumericError):
    """Adaptive panel refinement exhausted its levels."""


class WindowTooSmall(PreconditionError):
    """The truncation window is too small for the requested tolerance."""


# -- spectra and reconstruction ----------------------------------------------

class LineTooLow(PreconditionError):
    """The horizontal line lies below the fitted growth rate over 2*pi."""


class NeigDiverges(NumericError):
    """Partial sums of |b_gamma/gamma| over 0 < |gamma| < 1 keep growing."""


class SpectrumUnbounded(NumericError):
    """Reconstructed frequencies escaped the expected bounded range."""


class ZeroMismatch(NumericError):
    """Two zero sets that must agree do not (count, location or order)."""
