class HeropError(Exception):
    """Base class for all library errors."""


class DimensionError(HeropError, ValueError):
    pass


class NonCommutingError(HeropError, ValueError):
    pass


class SingularBasis(HeropError, ValueError):
    pass


class IllConditionedDecomposition(HeropError):
    """The assembled direct-sum basis is numerically singular.

    Usually means a cluster of eigenvalues was split too finely; retry with a
    larger ``cluster_tol``.
    """


class PreconditionFailed(HeropError):
    pass


class InputNotAmIsometry(PreconditionFailed):
    pass


class NotTwoIsometric(PreconditionFailed):
    pass


class NotA2Isometric(PreconditionFailed):
    pass


class ANotPositive(PreconditionFailed):
    pass


class StructureViolation(HeropError):
    pass


class GenerationFailed(HeropError):
    pass


class TupleFileError(HeropError, ValueError):
    """Malformed tuple file; ``locus`` names the offending line or field."""

    def __init__(self, message, locus=None):
        self.locus = locus
        super().__init__(f"{locus}: {message}" if locus else message)
