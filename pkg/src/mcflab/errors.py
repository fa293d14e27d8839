"""Exception types shared across the lab."""


class McflabError(Exception):
    """Base class for all lab errors."""


class NoConvergence(McflabError):
    """A shooting/bracketing search could not be closed."""


class AxisSingularity(McflabError):
    """The profile continuation cannot be completed regularly to the axis.

    Raised by the entire-closure mode of solve_profile; signals that the
    requested cone admits no entire rotationally symmetric shrinker.
    """


class GridTooCoarse(McflabError):
    """Operator assembly needs more interior nodes."""


class SolverFailure(McflabError):
    """Eigensolver failed; carries a residual report in args."""


class NotGraphical(McflabError):
    """The profile end is not a graph over the cone at the requested scale."""


class SelfIntersection(McflabError):
    """A sampled curve failed the simplicity check."""


class GraphDegenerate(McflabError):
    """Normal-graph immersion condition failed (box exit by C1 blowup)."""


class StepRejected(McflabError):
    """Time step was rejected more than the allowed number of halvings."""


class ResolutionLoss(McflabError):
    """Closed-curve flow stopped because curvature outran resolution.

    Carries the last good state in args[1].
    """


class AxisPinch(McflabError):
    """Closed-curve flow pinched at the rotation axis."""


class NotAGraph(McflabError):
    """Normal-line fitting was non-unique or empty (box exit by geometry)."""


class EmptyRegion(McflabError):
    """Barrier region contains no space-time sample nodes."""


class RegionMismatch(McflabError):
    """Barrier region conflicts with the forcing support hypotheses."""


class NoSignChange(McflabError):
    """Shooting endpoints exit with the same sign; carries both records."""


class BudgetExhausted(McflabError):
    """Search budget ran out before the staying condition was met."""


class ConfigError(McflabError):
    """Invalid or unknown configuration content."""
