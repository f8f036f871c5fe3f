"""Right-hand sides of the seven dynamical systems, as first-order fields.

System ids and state layouts:

========== ============================== =========================================
id         state components               dynamics
========== ============================== =========================================
NR_OSC_2D  x, y, vx, vy                   isotropic oscillator, frequency kappa(t)
NR_EMP     x, vx, rho, rhodot             oscillator x paired with the radial
                                          equation rhodd = -k^2 rho + C/rho^3
NR_RR      x, y, vx, vy                   coupled pair with f(y/x), g(x/y) forces
REL_OSC_2D x, y, vx, vy                   relativistic isotropic oscillator
REL_EMP    x, vx, rho, rhodot             relativistic closed radial system
REL_RR     x, y, vx, vy                   relativistic coupled pair
REL_1D     x, v                           relativistic 1D oscillator
========== ============================== =========================================

All right-hand sides are pure functions of (t, state); the frequency
kappa^2(t) is evaluated afresh at the state's own t on every call.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AxisSingularityError, ConfigError
from .exprparse import Expr
from .kinematics import (
    RelParams,
    check_rho,
    gamma_axis,
    gamma_cart,
    gamma_polar,
)

SYSTEM_IDS = (
    "NR_OSC_2D",
    "NR_EMP",
    "NR_RR",
    "REL_OSC_2D",
    "REL_EMP",
    "REL_RR",
    "REL_1D",
)

STATE_COMPONENTS = {
    "NR_OSC_2D": ("x", "y", "vx", "vy"),
    "NR_EMP": ("x", "vx", "rho", "rhodot"),
    "NR_RR": ("x", "y", "vx", "vy"),
    "REL_OSC_2D": ("x", "y", "vx", "vy"),
    "REL_EMP": ("x", "vx", "rho", "rhodot"),
    "REL_RR": ("x", "y", "vx", "vy"),
    "REL_1D": ("x", "v"),
}

_RR_IDS = ("NR_RR", "REL_RR")

# coordinates closer to an axis than this are rejected before dividing by them
AXIS_EPS = 1e-10


class Coefficient:
    """A scalar coefficient of one variable: a constant or a parsed expression."""

    __slots__ = ("_const", "_expr")

    def __init__(self, value: float | Expr):
        if isinstance(value, Expr):
            self._const = None
            self._expr = value
        else:
            self._const = float(value)
            self._expr = None

    @property
    def is_constant(self) -> bool:
        return self._const is not None

    @property
    def constant_value(self) -> float:
        if self._const is None:
            raise ValueError(f"coefficient {self._expr.text!r} is not a constant")
        return self._const

    def __call__(self, t: float) -> float:
        if self._const is not None:
            return self._const
        return self._expr.eval(t)

    def __repr__(self) -> str:
        if self._const is not None:
            return f"Coefficient({self._const!r})"
        return f"Coefficient({self._expr.text!r})"


@dataclass(frozen=True)
class SystemSpec:
    """A fully specified dynamical system: id, frequency, couplings, parameters."""

    system: str
    kappa_sq: Coefficient
    params: RelParams
    f: Expr | None = None
    g: Expr | None = None

    def __post_init__(self):
        if self.system not in SYSTEM_IDS:
            raise ConfigError(f"unknown system id {self.system!r}")
        has_couplings = self.f is not None or self.g is not None
        if self.system in _RR_IDS:
            if self.f is None or self.g is None:
                raise ConfigError(f"{self.system} requires both couplings f and g")
        elif has_couplings:
            raise ConfigError(f"{self.system} does not accept couplings f, g")

    @property
    def components(self) -> tuple[str, ...]:
        return STATE_COMPONENTS[self.system]

    @property
    def dim(self) -> int:
        return len(self.components)


def _check_axis(value: float, name: str, t: float) -> float:
    if abs(value) < AXIS_EPS:
        raise AxisSingularityError(
            f"|{name}| = {abs(value):.3e} below axis threshold {AXIS_EPS} at t={t!r}"
        )
    return value


# --- nonrelativistic fields -------------------------------------------------


def rhs_nr_osc_2d(t: float, y, spec: SystemSpec):
    x, yy, vx, vy = y
    k2 = spec.kappa_sq(t)
    return np.array([vx, vy, -k2 * x, -k2 * yy])


def rhs_nr_emp(t: float, y, spec: SystemSpec):
    x, vx, rho, rhodot = y
    check_rho(rho)
    k2 = spec.kappa_sq(t)
    cemp = spec.params.emp_constant
    return np.array([vx, -k2 * x, rhodot, -k2 * rho + cemp / rho**3])


def nr_rr_accel(x, yy, vx, vy, k2, f: Expr | None, g: Expr | None, t: float = 0.0):
    """Accelerations of the coupled nonrelativistic pair at explicit kappa^2."""
    if f is None and g is None:
        return -k2 * x, -k2 * yy
    _check_axis(x, "x", t)
    _check_axis(yy, "y", t)
    fv = f.eval(yy / x)
    gv = g.eval(x / yy)
    return -k2 * x + fv / (yy * x * x), -k2 * yy + gv / (x * yy * yy)


def rhs_nr_rr(t: float, y, spec: SystemSpec):
    x, yy, vx, vy = y
    ax, ay = nr_rr_accel(x, yy, vx, vy, spec.kappa_sq(t), spec.f, spec.g, t)
    return np.array([vx, vy, ax, ay])


# --- relativistic fields ----------------------------------------------------


def rhs_rel_osc_2d(t: float, y, spec: SystemSpec):
    x, yy, vx, vy = y
    c = spec.params.c
    gam = gamma_cart(vx, vy, c)
    k2g = spec.kappa_sq(t) / gam
    csq = c * c
    cross = k2g * (vx * vy / csq)
    ax = -k2g * x * (1.0 - vx * vx / csq) + cross * yy
    ay = -k2g * yy * (1.0 - vy * vy / csq) + cross * x
    return np.array([vx, vy, ax, ay])


def rhs_rel_emp(t: float, y, spec: SystemSpec):
    x, vx, rho, rhodot = y
    c = spec.params.c
    J = spec.params.J
    gam = gamma_polar(rho, rhodot, J, c)
    k2g = spec.kappa_sq(t) / gam
    csq = c * c
    ax = -k2g * (x - rho * rhodot * vx / csq)
    arho = -k2g * (1.0 - rhodot * rhodot / csq) * rho + (J * J) / (gam * gam * rho**3)
    return np.array([vx, ax, rhodot, arho])


def rel_rr_accel(
    x, yy, vx, vy, k2, f: Expr | None, g: Expr | None, c: float, t: float = 0.0
):
    """Accelerations of the coupled relativistic pair at explicit kappa^2.

    With both couplings absent this is exactly the relativistic isotropic
    oscillator (the rho rhodot = x vx + y vy identity folds the axis terms).
    """
    gam = gamma_cart(vx, vy, c)
    k2g = k2 / gam
    csq = c * c
    rho_rhodot = x * vx + yy * vy
    ax = -k2g * (x - rho_rhodot * vx / csq)
    ay = -k2g * (yy - rho_rhodot * vy / csq)
    if f is None and g is None:
        return ax, ay
    _check_axis(x, "x", t)
    _check_axis(yy, "y", t)
    gam2 = gam * gam
    fterm = f.eval(yy / x) / (yy * x * x)
    gterm = g.eval(x / yy) / (x * yy * yy)
    ax += (1.0 - vx * vx / csq) * fterm / gam2 - (vx * vy / (gam2 * csq)) * gterm
    ay += (1.0 - vy * vy / csq) * gterm / gam2 - (vx * vy / (gam2 * csq)) * fterm
    return ax, ay


def rhs_rel_rr(t: float, y, spec: SystemSpec):
    x, yy, vx, vy = y
    ax, ay = rel_rr_accel(
        x, yy, vx, vy, spec.kappa_sq(t), spec.f, spec.g, spec.params.c, t
    )
    return np.array([vx, vy, ax, ay])


def rhs_rel_1d(t: float, y, spec: SystemSpec):
    x, v = y
    c = spec.params.c
    gamma_axis(v, c)  # superluminal guard
    beta_sq = (v * v) / (c * c)
    return np.array([v, -spec.kappa_sq(t) * x * (1.0 - beta_sq) ** 1.5])


_RHS = {
    "NR_OSC_2D": rhs_nr_osc_2d,
    "NR_EMP": rhs_nr_emp,
    "NR_RR": rhs_nr_rr,
    "REL_OSC_2D": rhs_rel_osc_2d,
    "REL_EMP": rhs_rel_emp,
    "REL_RR": rhs_rel_rr,
    "REL_1D": rhs_rel_1d,
}


def make_rhs(spec: SystemSpec):
    """Bind a system spec to its vector field f(t, y) -> dy/dt."""
    fn = _RHS[spec.system]

    def rhs(t, y):
        return fn(t, y, spec)

    return rhs


def gamma_of_state(spec: SystemSpec, y) -> float:
    """Lorentz factor of a state; 1.0 for the formally nonrelativistic systems."""
    c = spec.params.c
    if spec.system == "REL_OSC_2D" or spec.system == "REL_RR":
        return gamma_cart(y[2], y[3], c)
    if spec.system == "REL_EMP":
        return gamma_polar(y[2], y[3], spec.params.J, c)
    if spec.system == "REL_1D":
        return gamma_cart(y[1], 0.0, c)
    return 1.0


def validate_initial(spec: SystemSpec, y) -> None:
    """Check a candidate initial state against the system's invariants.

    Raises the same guard errors the right-hand side would raise, so invalid
    initial data fails before integration starts.
    """
    if len(y) != spec.dim:
        raise ConfigError(
            f"{spec.system} expects {spec.dim} state components "
            f"{spec.components}, got {len(y)}"
        )
    if any(not math.isfinite(v) for v in y):
        raise ConfigError(f"initial state contains non-finite values: {list(y)}")
    gamma_of_state(spec, y)  # superluminal / nonpositive-rho guards
    if spec.system in ("NR_EMP", "REL_EMP"):
        check_rho(y[2])
    if spec.system in _RR_IDS:
        _check_axis(y[0], "x", 0.0)
        _check_axis(y[1], "y", 0.0)


# --- auxiliary quadrature channels -------------------------------------------

#: channel name -> system ids it applies to
CHANNELS = {
    "accum_T": ("NR_EMP", "REL_EMP"),
    "theta": ("NR_EMP", "REL_EMP"),
    "accum_t_of_tau": ("NR_OSC_2D", "NR_RR"),
}


def channel_rate(name: str, spec: SystemSpec):
    """Rate function d(channel)/dt for an auxiliary quadrature channel.

    ``accum_T`` integrates 1/(gamma rho^2); ``theta`` integrates the angular
    velocity J/(gamma rho^2); ``accum_t_of_tau`` integrates the clock factor
    sqrt(1 + (vx^2 + vy^2)/c^2) mapping an auxiliary time to physical time.
    """
    if name not in CHANNELS:
        raise ConfigError(f"unknown channel {name!r}; known: {sorted(CHANNELS)}")
    if spec.system not in CHANNELS[name]:
        raise ConfigError(f"channel {name!r} does not apply to {spec.system}")
    c = spec.params.c
    J = spec.params.J

    if name == "accum_T":
        if spec.system == "REL_EMP":
            return lambda t, y: 1.0 / (gamma_polar(y[2], y[3], J, c) * y[2] * y[2])
        return lambda t, y: 1.0 / (y[2] * y[2])
    if name == "theta":
        if spec.system == "REL_EMP":
            return lambda t, y: J / (gamma_polar(y[2], y[3], J, c) * y[2] * y[2])
        return lambda t, y: J / (y[2] * y[2])
    return lambda t, y: math.sqrt(1.0 + (y[2] * y[2] + y[3] * y[3]) / (c * c))
