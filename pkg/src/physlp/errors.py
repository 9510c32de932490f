"""Exception types shared across the library."""


class PhyslpError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(PhyslpError):
    """Array shapes are inconsistent with the problem dimensions."""


class NonFiniteEntry(PhyslpError):
    """An input array contains NaN or infinity."""


class ZeroCostNeedsGamma(PhyslpError):
    """Cost vector has zero entries but no positive perturbation was given."""


class MissingBound(PhyslpError):
    """Negative costs require a box bound so coordinates can be flipped."""


class NonPositiveInit(PhyslpError):
    """Initial iterate must be strictly positive."""


class NotSymmetric(PhyslpError):
    """Matrix expected to be symmetric is not, beyond tolerance."""


class Breakdown(PhyslpError):
    """Linear solve failed to reach the requested tolerance."""


class LinSolveFailure(PhyslpError):
    """Dynamics step could not solve its linear system even after a retry."""


class Unreachable(PhyslpError):
    """Sink cannot be reached from the source."""


class EmptyClass(PhyslpError):
    """Labeled data does not contain enough distinct classes."""


class KernelDegenerate(PhyslpError):
    """Kernel matrix contains non-finite entries."""


class TooLarge(PhyslpError):
    """Instance exceeds the guard rails of a brute-force oracle."""


class InfeasibleDetected(PhyslpError):
    """No nonnegative basic solution exists."""


class UnboundedUnsupported(PhyslpError):
    """Problem appears unbounded; only bounded feasible sets are supported."""
