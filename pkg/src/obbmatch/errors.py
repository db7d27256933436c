"""Exception types shared across the package.

Plain I/O failures (missing files, unreadable paths) are left to the
built-in OSError family; everything domain-specific derives from
ObbMatchError so callers can catch one base class.
"""


class ObbMatchError(Exception):
    """Base class for all package-specific errors."""


class DegenerateInput(ObbMatchError):
    """Input geometry carries no area (collinear or coincident points)."""


class LengthMismatch(ObbMatchError):
    """Parallel sequences disagree in length."""


class AngleSingularity(ObbMatchError):
    """Angle residual too close to +-pi/2 for the tangent encoding."""


class InvalidConfig(ObbMatchError):
    """Configuration value outside its documented domain."""


class EmptyGroundTruth(ObbMatchError):
    """Assignment requested for a scene with no ground-truth boxes."""


class EmptyPositives(ObbMatchError):
    """Compensation weights requested for an empty positive set."""


class NoPositives(ObbMatchError):
    """Loss requested for a scene that has ground truths but no positives.

    Selection guarantees at least one positive per ground truth, so this
    indicates a bug upstream rather than a legitimate input.
    """


class NonDifferentiablePoint(ObbMatchError):
    """Gradient check requested within one step size of a kink."""


class FormatError(ObbMatchError):
    """Malformed annotation or config line.  line_no is 1-based."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no
