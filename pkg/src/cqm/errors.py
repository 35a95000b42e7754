"""Error taxonomy.

Every failure mode that callers are expected to handle gets its own
class so the CLI can map each one to a distinct process exit code.
Exit code 0 is reserved for "all requested checks passed", 1 for
"ran fine but a numerical check failed".
"""

from __future__ import annotations


class CqmError(Exception):
    """Base class for all package-specific errors."""

    exit_code = 2


class StateSpecError(CqmError):
    """A state specification string could not be parsed."""

    exit_code = 2


class GridTooNarrow(CqmError):
    """Constructed state has non-negligible amplitude at a grid boundary."""

    exit_code = 3


class GridMismatch(CqmError):
    """Operands live on different grids or representations."""

    exit_code = 4


class ZeroNorm(CqmError):
    """A superposition cancelled to (numerical) zero."""

    exit_code = 5


class RepresentationMismatch(CqmError):
    """Operation applied to a state in the wrong representation."""

    exit_code = 6


class DegenerateDensity(CqmError):
    """A CDF has an interior flat stretch too wide for stable inversion."""

    exit_code = 7


class PhaseUnwrapFailure(CqmError):
    """Phase continuation across a low-amplitude gap is branch-ambiguous."""

    exit_code = 8


class ExpansionResidual(CqmError):
    """State not representable in the truncated oscillator eigenbasis."""

    exit_code = 9


class TrajectoryEscapedGrid(CqmError):
    """An integrated trajectory left the spatial grid."""

    exit_code = 10


class InterpolationLoss(CqmError):
    """Resampling onto a rotated frame lost too much probability mass."""

    exit_code = 11


class DegenerateSlice(CqmError):
    """A conditional slice carries too little mass to define a CDF."""

    exit_code = 12


class ConstraintIllFormed(CqmError):
    """A value constraint references observables that do not commute."""

    exit_code = 13
