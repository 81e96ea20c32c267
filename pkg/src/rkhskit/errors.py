"""Exception types shared across the package."""


class RKHSKitError(Exception):
    """Base class for all rkhskit errors."""


class DomainMismatch(RKHSKitError):
    """A point label lies outside the kernel's domain."""


class SingularGram(RKHSKitError):
    """An operation required a strictly positive-definite Gram matrix."""


class NotPositiveSemidefinite(RKHSKitError):
    """A matrix that must be positive semidefinite is not.

    ``witness`` is the index of a point certifying a negative direction.
    """

    def __init__(self, witness, message=None):
        self.witness = witness
        super().__init__(message or f"matrix is not positive semidefinite (witness index {witness})")


class NotInRange(RKHSKitError):
    """The indicator of the target point is not in the numerical column span
    of a rank-deficient Gram matrix."""


class MonotonicityViolation(RKHSKitError):
    """Projection norms decreased along a nested filtration; the linear
    algebra has lost accuracy and results are untrustworthy."""


class TooFewStages(RKHSKitError):
    """Not enough filtration stages to classify membership."""


class Disconnected(RKHSKitError):
    """The network is not connected to the base vertex."""


class MissingNeighbor(RKHSKitError):
    """A vertex needed for a neighbor expansion is absent."""


class BoundaryIndex(RKHSKitError):
    """The closed-form norm needs a right neighbor the finite point set
    does not have."""


class BoundaryWord(RKHSKitError):
    """The word sits on the truncation boundary of the tree."""


class WeightUndefined(RKHSKitError):
    """No level weight is available at a required tree level."""
