"""Exception hierarchy for weaktomo.

All library errors derive from :class:`WeaktomoError` so callers can catch
everything with one handler while tests pin the specific subclass.
"""


class WeaktomoError(Exception):
    """Base class for all weaktomo errors."""


class ShapeMismatch(WeaktomoError):
    """Operands have incompatible array shapes."""


class DimensionMismatch(WeaktomoError):
    """Objects live in Hilbert spaces of different dimension."""


class InvalidDimension(WeaktomoError):
    """Hilbert-space dimension outside the supported range."""


class InvalidRank(WeaktomoError):
    """Requested state rank outside 1..N."""


class NonHermitianInput(WeaktomoError):
    """Matrix fails the Hermiticity tolerance."""


class NonHermitianObservable(WeaktomoError):
    """Measurement requested for a non-Hermitian observable."""


class NotPrime(WeaktomoError):
    """Dimension is not a prime number."""


class NotOrthonormal(WeaktomoError):
    """A claimed orthonormal basis fails the orthonormality tolerance."""


class PostSelectionImpossible(WeaktomoError):
    """Post-selection probability is numerically zero."""


class VanishingOverlap(WeaktomoError):
    """A probe overlap |c_i| is too small to divide by."""


class IncompletePostSelectionFamily(WeaktomoError):
    """Reconstruction needs a complete orthonormal post-selection family."""


class DivisorUnderflow(WeaktomoError):
    """An overlap used as a divisor is numerically zero."""


class InconsistentRatios(WeaktomoError):
    """Hermiticity consistency relations cannot be satisfied by any
    positive probability vector at the requested tolerance."""


class ConfigError(WeaktomoError):
    """Experiment configuration is invalid.

    Carries the offending field path for diagnostics.
    """

    def __init__(self, field: str, message: str):
        self.field = field
        self.message = message
        super().__init__(f"config field '{field}': {message}")
