"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class AnnealGapError(Exception):
    """Base class for all errors raised by annealgap."""


class InvalidModelError(AnnealGapError, ValueError):
    """A model parameter is outside the supported domain."""


class UnsupportedOrderError(InvalidModelError):
    """The interaction order p is not odd and >= 3 (or infinite)."""

    reason = "unsupported"

    def __init__(self, p, detail: str = ""):
        self.p = p
        msg = f"unsupported interaction order p={p!r}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class OrderTooSmallError(UnsupportedOrderError):
    reason = "below-minimum"


class CurieWeissOrderError(UnsupportedOrderError):
    reason = "curie-weiss"


class EvenOrderError(UnsupportedOrderError):
    reason = "even"


class InvalidSizeError(InvalidModelError):
    """System size N is not a positive integer (or exceeds an operation's cap)."""


class NegativeFieldError(InvalidModelError):
    """Transverse field is negative."""


class InvalidTemperatureError(InvalidModelError):
    """Inverse temperature is not positive."""


class ConvergenceError(AnnealGapError, RuntimeError):
    """An iterative solver did not reach its tolerance.

    ``bracket`` holds the last bracketing interval, when one exists.
    """

    def __init__(self, message: str, bracket=None):
        self.bracket = bracket
        if bracket is not None:
            message = f"{message}; last bracket {bracket}"
        super().__init__(message)


class BoundaryMinimumError(ConvergenceError):
    """A bounded minimisation converged onto an edge of its search bracket."""


class GapBelowResolution(AnnealGapError):
    """The two lowest levels cannot be separated at the active precision."""

    def __init__(self, message: str = "gap below resolution", floor: float | None = None):
        self.floor = floor
        if floor is not None:
            message = f"{message} (resolution floor {floor:.3e})"
        super().__init__(message)


class NoTransitionError(AnnealGapError):
    """No first-order transition exists at the requested temperature."""


class RegimeError(AnnealGapError, ValueError):
    """Inputs fall outside the validity regime of an expansion."""


class DiscretizationError(AnnealGapError, ValueError):
    """Imaginary-time discretisation too coarse for the requested path."""


class PoleProximityError(AnnealGapError, ZeroDivisionError):
    """Evaluation point sits on (or numerically at) a pole."""


class DegeneracyError(AnnealGapError, ValueError):
    """The two minima are not degenerate, so no instanton cost is defined."""


class FitError(AnnealGapError, ValueError):
    """Too few (or too narrowly spread) resolved points for a scaling fit."""
