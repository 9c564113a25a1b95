"""Exception hierarchy shared by all macomss modules."""


class MacomssError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(MacomssError):
    pass


class StructuredBlockViolation(MacomssError):
    """An observed (mask = 1) entry was found inside the structurally missing block."""


class NonFiniteObservation(MacomssError):
    pass


class ConvergenceFailure(MacomssError):
    """The SVD kernel did not converge within the sweep budget."""


class SingularSubmatrix(MacomssError):
    pass


class EmptyRowOrColumn(MacomssError):
    """An observable row or column of the mask has no observed entry."""


class ZeroTotalMass(MacomssError):
    """A mask strip sums to zero, so the missingness estimator is undefined."""


class EmptyColumn(MacomssError):
    """A column has no observed entry to impute from."""


class SingleClass(MacomssError):
    """Both label classes are required but only one is present."""


class ZeroTruthNorm(MacomssError):
    pass


class NegativeIntensity(MacomssError):
    pass


class BlockTooLarge(MacomssError):
    """A scenario's fixed missing-block size exceeds the matrix dimension."""
