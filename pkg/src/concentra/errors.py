"""Exception types shared across the library."""


class ConcentraError(Exception):
    """Base class for all library errors."""


class PolynomialParseError(ConcentraError):
    """Malformed polynomial text."""


class NotIrreducible(ConcentraError):
    """Family member factors over the rationals."""


class UnverifiedIrreducibility(NotIrreducible):
    """Degree >= 5 member whose irreducibility the heuristic could not certify."""


class NotPairwiseCoprime(ConcentraError):
    """Two family members share a rational factor (resultant is zero)."""


class FixedDivisor(ConcentraError):
    """A member has a fixed prime divisor (content > 1 or rho(p) = p for p <= deg)."""


class ZeroDiscriminant(ConcentraError):
    """Product polynomial has discriminant zero."""


class CompositeModulus(ConcentraError):
    """A modulus that must be prime failed the primality test."""


class EmptyGrid(ConcentraError):
    """Deviation requested on an empty sample grid."""


class DegenerateFactor(ConcentraError):
    """phi_0(beta*D) vanished; carries the offending prime."""

    def __init__(self, message, prime=None):
        super().__init__(message)
        self.prime = prime


class EmptyTable(ConcentraError):
    """Sup requested from an empty concentration table."""


class RangeError(ConcentraError):
    """x too small for the requested lower-bound target parameters."""


class NonIntegerValues(ConcentraError):
    """Fourier inversion requires an integer-valued additive function."""


class CapacityError(ConcentraError):
    """Requested computation exceeds the configured desk-scale limits."""


class QuadratureNonConvergence(ConcentraError):
    """Adaptive quadrature failed to reach the requested tolerance."""

    def __init__(self, message, achieved_error=None):
        super().__init__(message)
        self.achieved_error = achieved_error
