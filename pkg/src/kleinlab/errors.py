"""Exception hierarchy shared by all modules.

Errors that mean "the search or budget ran out" derive from
:class:`ResourceExhausted`; the CLI maps those to exit status 2 and
everything else to exit status 1.
"""


class KleinLabError(Exception):
    """Base class for all library errors."""

    code = "error"


class ValidationError(KleinLabError, ValueError):
    code = "validation_error"


class ResourceExhausted(KleinLabError):
    code = "resource_exhausted"


# ffield
class NotPrime(ValidationError):
    code = "not_prime"


class EvenCharacteristic(ValidationError):
    code = "even_characteristic"


class ModulusTooLarge(ValidationError):
    code = "modulus_too_large"


class DivisionByZero(KleinLabError, ZeroDivisionError):
    code = "division_by_zero"


# projspace
class DimensionMismatch(ValidationError):
    code = "dimension_mismatch"


class IdenticalPoints(ValidationError):
    code = "identical_points"


class TooFewObjects(ValidationError):
    code = "too_few_objects"


class BudgetExceeded(ResourceExhausted):
    code = "budget_exceeded"


# klein
class NotOnKleinQuadric(ValidationError):
    code = "not_on_klein_quadric"


class NotMutuallySkew(ValidationError):
    code = "not_mutually_skew"


class DegenerateConic(KleinLabError):
    """The plane section of the Klein quadric splits; ``factors`` holds the
    rational linear factors (as coefficient triples) when they exist."""

    code = "degenerate_conic"

    def __init__(self, message, factors=()):
        super().__init__(message)
        self.factors = tuple(factors)


# complexes
class SearchExhausted(ResourceExhausted):
    code = "search_exhausted"


class NotInG(ValidationError):
    code = "not_in_g"


class FewerThanTwoRationalPoints(ValidationError):
    code = "fewer_than_two_rational_points"


class SingularComplex(ValidationError):
    code = "singular_complex"


# incidence
class NoKernel(KleinLabError):
    code = "no_kernel"


class OrientationError(ValidationError):
    code = "orientation_error"


# constructions
class ModulusTooSmall(ValidationError):
    code = "modulus_too_small"


class DegenerateCubic(KleinLabError):
    code = "degenerate_cubic"


class InsufficientSpace(ValidationError):
    code = "insufficient_space"


# cli
class MissingArtifact(KleinLabError):
    code = "missing_artifact"
