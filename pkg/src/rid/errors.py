"""Exception types raised by the decomposition pipeline."""


class RidError(Exception):
    """Base class for all errors raised by :mod:`rid`."""


class ContractViolation(RidError, ValueError):
    """A precondition on shapes, ranges or parameters was not met."""


class RankDeficientSketch(RidError):
    """The sketch ran out of independent columns before reaching rank k.

    Attributes
    ----------
    achieved_rank : int
        Number of pivots accepted before the residual fell below threshold.
    """

    def __init__(self, achieved_rank, message=None):
        self.achieved_rank = int(achieved_rank)
        super().__init__(message or f"sketch has numerical rank {achieved_rank} < requested k")


class RankDeficient(RankDeficientSketch):
    """Raised by the driver when a re-randomized sketch is still rank deficient."""


class SingularTriangular(RidError, ArithmeticError):
    """Triangular factor has a diagonal entry below the solve threshold."""

    def __init__(self, index, message=None):
        self.index = int(index)
        super().__init__(message or f"diagonal entry {index} of triangular factor is numerically zero")
