"""Exception types shared across the package."""


class CharvarError(Exception):
    """Base class for all package-specific errors."""


class ParseError(CharvarError):
    """Presentation text violates the grammar.

    Carries the character offset of the offending token and a short
    description of what was expected there.
    """

    def __init__(self, message: str, position: int, expected: str = ""):
        self.position = position
        self.expected = expected
        detail = f"at position {position}: {message}"
        if expected:
            detail += f" (expected {expected})"
        super().__init__(detail)


class UnknownGenerator(CharvarError):
    """A word refers to a generator the presentation does not declare."""


class InvalidParams(CharvarError):
    """A construction parameter is out of its documented range."""


class DimensionMismatch(CharvarError):
    """Matrix shapes are inconsistent with each other or with the word."""


class SingularMatrix(CharvarError):
    """A matrix that must be inverted is numerically singular."""


class WrongShape(CharvarError):
    """The representation does not have the generator count / dimension
    the operation requires."""


class UnsupportedFamily(CharvarError):
    """The operation needs structural data the presentation's family
    does not provide."""


class CentralizerConstructionFailure(CharvarError):
    """No usable element of the required centralizer could be produced."""


class NotNormal(CharvarError):
    """Input matrix fails the normality test at the requested tolerance."""


class NotElliptic(CharvarError):
    """Input matrix is not semisimple with unit-modulus spectrum."""


class NotInHom0(CharvarError):
    """Representation is not in the subspace with unitary distinguished
    images (or fails its relation-residual gate)."""


class ZeroEigenvalue(CharvarError):
    """An eigenvalue is too close to zero for the requested rescaling."""


class NoConvergence(CharvarError):
    """An iterative eigenvalue computation failed to converge."""


class NumericalFailure(CharvarError):
    """A dense linear-algebra kernel failed on this input."""


class BadInput(CharvarError):
    """Input violates a documented precondition."""
