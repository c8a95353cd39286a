"""Exception and warning types shared across the package."""


class PToeplitzError(Exception):
    """Base class for all package errors."""


class ValidationError(PToeplitzError, ValueError):
    """Input violates a documented precondition."""


class NonInvertibleError(ValidationError):
    """Symbol modulus is too small somewhere on the circle."""


class NonzeroWindingError(NonInvertibleError):
    """Symbol has nonzero winding number about the origin, so T(a) is not invertible."""


class CertificationError(PToeplitzError, ArithmeticError):
    """A numerical result could not be certified (truncation, refinement or quadrature check failed)."""


class AliasingWarning(UserWarning):
    """Coefficient window looks too small for the sampled function."""
