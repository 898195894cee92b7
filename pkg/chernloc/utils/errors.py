"""
Error Types
===========
Exception hierarchy shared by every layer.

- ChernlocError is a ValueError so callers that only know about ValueError keep working
- Input problems (scene files, expressions) derive from InputError and map to exit code 2
- Numeric problems (poles, quadrature, residuals) map to exit code 1
"""

from typing import Any, Optional, Sequence


class ChernlocError(ValueError):
    """Base class for all chernloc errors."""


class InputError(ChernlocError):
    """Malformed user input: scene files, expressions, flags."""


class SceneError(InputError):
    """Scene file is missing a section, has a dangling reference, or does not parse."""


class ExpressionParseError(InputError):
    """An expression string does not follow the field/form grammar."""


class ChartMismatchError(ChernlocError):
    """Two objects that must live on the same chart do not."""


class DimensionMismatchError(ChernlocError):
    """Degrees or dimensions of the operands do not fit together."""


class PoleError(ChernlocError):
    """A coefficient evaluated to a non-finite value."""

    def __init__(self, message: str, point: Optional[Sequence[complex]] = None):
        super().__init__(message)
        self.point = None if point is None else tuple(complex(v) for v in point)


class QuadratureError(ChernlocError):
    """Adaptive quadrature ran out of its cell budget."""

    def __init__(self, message: str, simplex: str = "", cells: int = 0, error: float = float("nan")):
        super().__init__(message)
        self.simplex = simplex
        self.cells = cells
        self.error = error


class ClippingError(ChernlocError):
    """A simplex could not be clipped against a honeycomb cell."""

    def __init__(self, message: str, simplex: str = ""):
        super().__init__(f"{message} (simplex {simplex})" if simplex else message)
        self.simplex = simplex


class DegenerateOverlapError(ChernlocError):
    """Covering annulus has inner radius >= outer radius."""


class HoneycombError(ChernlocError):
    """Honeycomb marks overlap or a disk escapes V1."""


class FrameSingularError(ChernlocError):
    """A frame fails to be linearly independent somewhere in its region."""


class NonIsolatedZeroError(ChernlocError):
    """Section minors vanish along a curve of samples."""


class InvariantViolation(ChernlocError):
    """A sampled invariant failed; carries the invariant name and the sample point."""

    def __init__(self, invariant: str, point: Any = None, residual: Optional[float] = None):
        detail = f"invariant violated: {invariant}"
        if point is not None:
            detail += f" at {point}"
        if residual is not None:
            detail += f" (residual {residual:.3e})"
        super().__init__(detail)
        self.invariant = invariant
        self.point = point
        self.residual = residual


class NonCoherentTriangulationError(ChernlocError):
    """Some face is shared with equal induced orientations or by more than two simplices."""


class NonCompactSceneError(ChernlocError):
    """The triangulation has unmatched boundary faces."""


class ResidualTooLargeError(ChernlocError):
    """A value expected to be an integer is too far from the nearest one."""


class LogarithmicTermError(ChernlocError):
    """A primitive would need a log term (z^-1 coefficient)."""
