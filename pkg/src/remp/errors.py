"""Exception types shared across the package.

Every error raised by remp code derives from :class:`RempError`, so callers
(and the CLI) can distinguish "the physics/configuration rejected this" from
a genuine bug.
"""

from __future__ import annotations


class RempError(Exception):
    """Base class for all errors raised by this package."""


class SuperluminalError(RempError):
    """A state's speed reached or exceeded the guard band below c."""


class NonpositiveRhoError(RempError):
    """The radial coordinate must stay strictly positive."""


class AxisSingularityError(RempError):
    """A coupled-oscillator coordinate came too close to a coordinate axis."""


class StepSizeUnderflowError(RempError):
    """The adaptive integrator could not meet the tolerance with a usable step."""


class NoOscillationError(RempError):
    """The requested periodic-motion analysis has no oscillatory solution."""


class BracketingError(RempError):
    """A root could not be bracketed in the expected interval."""


class MissingChannelError(RempError):
    """A trajectory lacks an auxiliary channel required by the operation."""


class InapplicableInvariantError(RempError):
    """The requested first integral is not defined for this system."""


class InconsistentInitialDataError(RempError):
    """Initial data contradicts a constraint implied by other inputs."""


class NonpositiveAngularMomentumError(RempError):
    """The superposition law is stated for J > 0 only."""


class ModulusRangeError(RempError):
    """Elliptic-integral modulus outside [0, 1]."""


class DivergentIntegralError(RempError):
    """The requested elliptic integral diverges (k = 1 at or beyond pi/2)."""


class ConfigError(RempError):
    """A scenario configuration failed validation before any computation."""


class ExprError(RempError):
    """Base class for expression parsing/evaluation errors."""


class ExprSyntaxError(ExprError):
    """Malformed expression text; carries the byte offset of the problem."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte {offset})")
        self.offset = offset


class ExprNameError(ExprError):
    """Unknown identifier in an expression."""

    def __init__(self, name: str, offset: int):
        super().__init__(f"unknown identifier {name!r} (byte {offset})")
        self.name = name
        self.offset = offset


class ExprArityError(ExprError):
    """A function was called with the wrong number of arguments."""

    def __init__(self, name: str, expected: int, got: int, offset: int):
        super().__init__(
            f"{name}() takes {expected} argument(s), got {got} (byte {offset})"
        )
        self.offset = offset


class ExprDomainError(ExprError):
    """Evaluation hit a domain error (log of non-positive, sqrt of negative, ...)."""

    def __init__(self, message: str, argument: float):
        super().__init__(f"domain error: {message}")
        self.argument = argument


class IntegrationAbort(RempError):
    """Integration stopped before t_end; carries the partial trajectory.

    ``partial`` is the trajectory sampled up to the last accepted step,
    ``t`` the time at which the right-hand side (or the step controller)
    failed, and ``cause`` the underlying error.
    """

    def __init__(self, cause: RempError, t: float, partial):
        super().__init__(f"integration aborted at t={t:.6g}: {cause}")
        self.cause = cause
        self.t = t
        self.partial = partial
