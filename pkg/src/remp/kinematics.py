"""Core state types and Lorentz-factor computations.

All quantities are dimensionless; the reference speed ``c`` is carried
explicitly in :class:`RelParams` (default 1). States whose squared speed
exceeds ``(1 - GUARD_BAND) * c**2`` are rejected as superluminal so that
integration fails loudly instead of producing overflowing gamma factors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import NonpositiveRhoError, SuperluminalError

#: states with (v/c)^2 above 1 - GUARD_BAND are rejected
GUARD_BAND = 1e-12


@dataclass(frozen=True)
class CartState:
    """Planar Cartesian phase state (t, x, y, vx, vy)."""

    t: float
    x: float
    y: float
    vx: float
    vy: float


@dataclass(frozen=True)
class EmpState:
    """Closed radial-oscillator state (t, x, vx, rho, rhodot).

    ``x`` is the auxiliary oscillator coordinate; ``rho > 0`` the radial
    coordinate whose dynamics close the system.
    """

    t: float
    x: float
    vx: float
    rho: float
    rhodot: float


@dataclass(frozen=True)
class PolarState:
    """Polar state (t, rho, rhodot, theta) with rho > 0, theta in radians."""

    t: float
    rho: float
    rhodot: float
    theta: float


@dataclass(frozen=True)
class RelParams:
    """Shared physical parameters: reference speed c, angular momentum J,
    and the optional radial-force constant Cemp (defaults to J**2 when unset).
    """

    c: float = 1.0
    J: float = 0.0
    Cemp: float | None = None

    def __post_init__(self):
        if not (self.c > 0.0):
            raise ValueError(f"c must be positive, got {self.c}")

    @property
    def emp_constant(self) -> float:
        """Constant on the inverse-cubic term of the nonrelativistic radial
        equation; J**2 unless Cemp overrides it."""
        return self.J * self.J if self.Cemp is None else self.Cemp


def _check_speed_sq(speed_sq: float, c: float, what: str) -> None:
    if speed_sq > (1.0 - GUARD_BAND) * c * c:
        raise SuperluminalError(
            f"{what}: speed^2 = {float(speed_sq)!r} reaches the guard band "
            f"below c^2 = {float(c * c)!r}"
        )


def check_rho(rho: float) -> float:
    if not (rho > 0.0):
        raise NonpositiveRhoError(f"rho must be positive, got {float(rho)!r}")
    return rho


def gamma_cart(vx: float, vy: float, c: float) -> float:
    """Lorentz factor [1 - (vx^2 + vy^2)/c^2]^(-1/2) of a planar velocity."""
    speed_sq = vx * vx + vy * vy
    _check_speed_sq(speed_sq, c, "gamma_cart")
    return 1.0 / math.sqrt(1.0 - speed_sq / (c * c))


def gamma_axis(v: float, c: float) -> float:
    """Single-axis Lorentz factor (1 - v^2/c^2)^(-1/2)."""
    _check_speed_sq(v * v, c, "gamma_axis")
    return 1.0 / math.sqrt(1.0 - (v * v) / (c * c))


def gamma_polar(rho: float, rhodot: float, J: float, c: float) -> float:
    """Lorentz factor in radial variables:
    [(1 + J^2/(c^2 rho^2)) / (1 - rhodot^2/c^2)]^(1/2).

    Equals the Cartesian Lorentz factor on any motion with conserved angular
    momentum J; this is what closes the radial system.
    """
    check_rho(rho)
    _check_speed_sq(rhodot * rhodot, c, "gamma_polar")
    num = 1.0 + (J * J) / (c * c * rho * rho)
    den = 1.0 - (rhodot * rhodot) / (c * c)
    # sqrt(num)/sqrt(den) rather than sqrt(num/den): at J = 0 this is
    # bit-identical to the single-axis Lorentz factor
    return math.sqrt(num) / math.sqrt(den)


def theta_dot(rho: float, rhodot: float, J: float, c: float) -> float:
    """Angular velocity solving J = gamma * rho^2 * thetadot self-consistently."""
    return J / (gamma_polar(rho, rhodot, J, c) * rho * rho)


def polar_to_cart(p: PolarState, J: float, c: float) -> CartState:
    """Map a polar state to Cartesian coordinates and velocities.

    The angular velocity follows from the conserved angular momentum
    J = gamma * rho^2 * thetadot, with gamma from :func:`gamma_polar`;
    velocities are then the chain-rule derivatives of
    x = rho cos(theta), y = rho sin(theta).
    """
    check_rho(p.rho)
    td = theta_dot(p.rho, p.rhodot, J, c)
    speed_sq = p.rhodot * p.rhodot + p.rho * p.rho * td * td
    _check_speed_sq(speed_sq, c, "polar_to_cart")
    ct, st = math.cos(p.theta), math.sin(p.theta)
    return CartState(
        t=p.t,
        x=p.rho * ct,
        y=p.rho * st,
        vx=p.rhodot * ct - p.rho * st * td,
        vy=p.rhodot * st + p.rho * ct * td,
    )


def polar_to_emp(p: PolarState, J: float, c: float) -> EmpState:
    """Build the closed radial-system state whose (x, vx) is the Cartesian
    x-projection of the polar state."""
    cart = polar_to_cart(p, J, c)
    return EmpState(t=p.t, x=cart.x, vx=cart.vx, rho=p.rho, rhodot=p.rhodot)
