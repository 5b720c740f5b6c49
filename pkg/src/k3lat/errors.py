"""Exception hierarchy shared by all k3lat modules.

The CLI maps these onto process exit codes: bad input data is a usage
problem (1), a mathematically inconsistent record is 2, and a blown
resource bound is 3.
"""


class K3latError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(K3latError):
    """Matrix shapes do not fit the requested operation."""


class DomainError(K3latError):
    """An argument is outside the mathematical domain of the operation."""


class DegenerateLatticeError(DomainError):
    """A nonsingular Gram matrix was required but a singular one was given."""


class ResourceLimitError(K3latError):
    """A configured search or size bound was exceeded."""


class InconsistentDataError(K3latError):
    """Input data contradicts itself (counts, ranks, or divisibility)."""


class ChainInconsistencyError(InconsistentDataError):
    """A discriminant-chain division failed; ``step`` names the bad stage."""

    def __init__(self, step, message):
        super().__init__(message)
        self.step = step
