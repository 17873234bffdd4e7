"""Exception types shared across the toolkit."""


class SliceCertError(Exception):
    """Base class for all toolkit errors."""


class DimensionMismatch(SliceCertError, ValueError):
    """Vector or matrix shapes do not match the ambient space."""


class ValidationError(SliceCertError):
    """A system-level invariant is violated; the message names it."""


class ParseError(SliceCertError):
    """Input file is missing, malformed, or lacks required fields."""


class NotClosedUnderBracket(ValidationError):
    """Commutators of the given generators leave their span."""


class SubalgebraNotContained(SliceCertError):
    """A subalgebra argument is not contained where required."""


class DegenerateSliceForm(SliceCertError):
    """The symplectic form restricted to the slice failed the
    nondegeneracy threshold; signals a rank-tolerance failure upstream."""


class NotRelativeEquilibrium(SliceCertError):
    """The point does not satisfy the critical-point condition."""


class PreconditionViolated(SliceCertError):
    """An operation was called with arguments outside its contract."""


class SolverDiverged(SliceCertError):
    """The implicit integrator step failed to converge."""
