"""Nonlinear superposition: build oscillator solutions from one radial solution.

With rho(t) a solution of the radial equation and T(t) = integral dt/(gamma rho^2),
every solution of the coupled x-equation is

    x(t) = rho(t) sin(J T(t) + delta),      J > 0,

one per phase constant delta. ``verify_superposition`` integrates the full
system and compares the reconstruction against the integrated x(t).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    InconsistentInitialDataError,
    NonpositiveAngularMomentumError,
)
from .integrator import IntegratorConfig, Trajectory, integrate
from .kinematics import EmpState, gamma_polar
from .systems import SystemSpec


@dataclass
class SuperpositionResult:
    """Reconstructed vs integrated oscillator coordinate on a shared grid."""

    delta: float
    t: np.ndarray
    x_reference: np.ndarray
    x_reconstructed: np.ndarray
    max_deviation: float

    def to_json(self) -> dict:
        return {
            "delta": self.delta,
            "n": int(len(self.t)),
            "max_deviation": self.max_deviation,
        }


def transform_QT(traj: Trajectory) -> tuple[np.ndarray, np.ndarray]:
    """Map a radial-system trajectory to (Q, T) = (x/rho, accumulated
    integral dt/(gamma rho^2)). Requires the ``accum_T`` channel."""
    T = traj.channel("accum_T")
    Q = traj.component("x") / traj.component("rho")
    return Q, T


def _lagrange5_derivative(xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """First derivative dy/dx on a nonuniform, strictly increasing grid,
    from the 5-point Lagrange interpolant (4th-order accurate)."""
    n = len(xs)
    if n < 5:
        raise ValueError("need at least 5 samples")
    out = np.empty(n)
    for i in range(n):
        lo = min(max(i - 2, 0), n - 5)
        nodes = xs[lo : lo + 5]
        vals = ys[lo : lo + 5]
        x0 = xs[i]
        acc = 0.0
        for j in range(5):
            xj = nodes[j]
            if xj == x0:
                w = sum(1.0 / (x0 - nodes[k]) for k in range(5) if k != j)
            else:
                num = 1.0
                den = xj - x0
                for k in range(5):
                    xk = nodes[k]
                    if k == j or xk == x0:
                        continue
                    num *= x0 - xk
                    den *= xj - xk
                w = num / den
            acc += w * vals[j]
        out[i] = acc
    return out


def transformed_invariant(traj: Trajectory) -> np.ndarray:
    """Evaluate (dQ/dT)^2/2 + J^2 Q^2/2 along a radial trajectory.

    dQ/dT is differentiated numerically from the sampled (T, Q) series, so a
    faulty accumulated-T channel shows up directly; on a correct trajectory
    the series is constant at J^2/2.
    """
    Q, T = transform_QT(traj)
    dQdT = _lagrange5_derivative(T, Q)
    J = traj.spec.params.J
    return 0.5 * dQdT * dQdT + 0.5 * (J * J) * (Q * Q)


def superpose(traj: Trajectory, delta: float) -> np.ndarray:
    """Reconstruct x(t) = rho(t) sin(J T(t) + delta) from a radial trajectory.

    The law is stated for J > 0; other values are rejected rather than
    reinterpreted.
    """
    J = traj.spec.params.J
    if not (J > 0.0):
        raise NonpositiveAngularMomentumError(
            f"superposition law requires J > 0, got {J!r}"
        )
    T = traj.channel("accum_T")
    return traj.component("rho") * np.sin(J * T + delta)


def initial_oscillator_data(
    rho0: float, rhodot0: float, J: float, c: float, delta: float
) -> tuple[float, float]:
    """(x, vx) at t0 consistent with the phase constant delta.

    Differentiating the superposition law at t0 (where T = 0, dT/dt =
    1/(gamma rho^2)) gives
        x0  = rho0 sin(delta)
        vx0 = rhodot0 sin(delta) + (J / (gamma0 rho0)) cos(delta).
    """
    gam0 = gamma_polar(rho0, rhodot0, J, c)
    return (
        rho0 * math.sin(delta),
        rhodot0 * math.sin(delta) + (J / (gam0 * rho0)) * math.cos(delta),
    )


def verify_superposition(
    spec: SystemSpec,
    init,
    delta: float,
    cfg: IntegratorConfig,
    consistency_tol: float = 1e-9,
) -> SuperpositionResult:
    """Integrate the full radial system and compare the superposition
    reconstruction of x(t) against the directly integrated x(t).

    ``init`` must carry (x, vx) matching the chosen delta at t0 (see
    :func:`initial_oscillator_data`); a mismatch beyond ``consistency_tol``
    raises before integrating.
    """
    if spec.system not in ("REL_EMP", "NR_EMP"):
        raise NonpositiveAngularMomentumError(
            f"superposition verification runs on the radial systems, not {spec.system}"
        )
    J = spec.params.J
    if not (J > 0.0):
        raise NonpositiveAngularMomentumError(
            f"superposition law requires J > 0, got {J!r}"
        )
    if isinstance(init, EmpState):
        x0, vx0, rho0, rhodot0 = init.x, init.vx, init.rho, init.rhodot
    else:
        x0, vx0, rho0, rhodot0 = (float(v) for v in init)
    # the nonrelativistic system is the formal c -> infinity limit (gamma = 1)
    c = spec.params.c if spec.system == "REL_EMP" else math.inf
    x0_ref, vx0_ref = initial_oscillator_data(rho0, rhodot0, J, c, delta)
    if abs(x0 - x0_ref) > consistency_tol or abs(vx0 - vx0_ref) > consistency_tol:
        raise InconsistentInitialDataError(
            f"initial (x, vx) = ({x0!r}, {vx0!r}) inconsistent with delta={delta!r}: "
            f"expected ({x0_ref!r}, {vx0_ref!r})"
        )
    traj = integrate(spec, init, cfg, channels=("accum_T",))
    x_rec = superpose(traj, delta)
    x_ref = traj.component("x")
    dev = float(np.max(np.abs(x_rec - x_ref)))
    return SuperpositionResult(
        delta=delta,
        t=traj.t,
        x_reference=x_ref,
        x_reconstructed=x_rec,
        max_deviation=dev,
    )
