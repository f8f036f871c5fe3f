"""First integrals of every system, and drift quantification along trajectories.

The coupling integrals of the Ray-Reid-type invariants are indefinite; they
are realized as definite integrals from a fixed lower limit (default 1) by
adaptive Gauss-Kronrod quadrature. The additive constant this choice fixes
cancels in any drift comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .errors import InapplicableInvariantError, RempError
from .exprparse import Expr
from .integrator import Trajectory
from .kinematics import check_rho, gamma_cart, gamma_polar
from .systems import SystemSpec

_QUAD_TOL = 1e-12


# --- scalar first integrals ---------------------------------------------------


def ermakov_lewis_nr(x: float, vx: float, rho: float, rhodot: float, J: float) -> float:
    """Nonrelativistic Ermakov-Lewis invariant
    I = [(rho vx - x rhodot)^2 + J^2 x^2 / rho^2] / 2."""
    check_rho(rho)
    w = rho * vx - x * rhodot
    return 0.5 * (w * w + (J * J) * (x * x) / (rho * rho))


def ermakov_lewis_rel(
    x: float, vx: float, rho: float, rhodot: float, J: float, c: float
) -> float:
    """Relativistic Ermakov-Lewis invariant
    I_R = [gamma^2 (rho vx - x rhodot)^2 + J^2 x^2 / rho^2] / 2,
    with gamma in its radial form."""
    gam = gamma_polar(rho, rhodot, J, c)
    w = gam * (rho * vx - x * rhodot)
    return 0.5 * (w * w + (J * J) * (x * x) / (rho * rho))


def coupling_integral(f: Expr, upper: float, lower: float = 1.0) -> float:
    """integral_lower^upper f(s) ds by adaptive Gauss-Kronrod quadrature."""
    val, _ = quad(f.eval, lower, upper, epsabs=_QUAD_TOL, epsrel=_QUAD_TOL, limit=200)
    return val


def rr_invariant(
    x: float,
    y: float,
    vx: float,
    vy: float,
    f: Expr,
    g: Expr,
    lower: float = 1.0,
) -> float:
    """Ray-Reid first integral
    I_RR = (x vy - y vx)^2 / 2 + int^(y/x) f + int^(x/y) g."""
    w = x * vy - y * vx
    return (
        0.5 * w * w
        + coupling_integral(f, y / x, lower)
        + coupling_integral(g, x / y, lower)
    )


def rrr_invariant(
    x: float,
    y: float,
    vx: float,
    vy: float,
    f: Expr,
    g: Expr,
    c: float,
    lower: float = 1.0,
) -> float:
    """Relativistic Ray-Reid first integral: gamma^2/2 on the kinetic term."""
    gam = gamma_cart(vx, vy, c)
    w = gam * (x * vy - y * vx)
    return (
        0.5 * w * w
        + coupling_integral(f, y / x, lower)
        + coupling_integral(g, x / y, lower)
    )


def energy_1d(xbar: float, vbar: float) -> float:
    """Energy of the 1D conservative relativistic oscillator in rescaled
    variables: H = (1 - v^2)^(-1/2) + x^2/2 >= 1."""
    if vbar * vbar >= 1.0:
        raise RempError(f"|vbar| must be < 1, got {vbar!r}")
    return 1.0 / math.sqrt(1.0 - vbar * vbar) + 0.5 * xbar * xbar


def energy_rel_emp(rhobar: float, vbar: float, Jbar: float) -> float:
    """Energy of the conservative radial system in rescaled variables:
    H = gamma + rho^2/2 with gamma = sqrt((1 + J^2/rho^2)/(1 - v^2))."""
    check_rho(rhobar)
    if vbar * vbar >= 1.0:
        raise RempError(f"|vbar| must be < 1, got {vbar!r}")
    gam = math.sqrt((1.0 + (Jbar * Jbar) / (rhobar * rhobar)) / (1.0 - vbar * vbar))
    return gam + 0.5 * rhobar * rhobar


def hamiltonian_full(
    x: float, y: float, vx: float, vy: float, kappa_sq: float, c: float
) -> float:
    """Hamiltonian of the planar relativistic oscillator,
    c^2 sqrt(1 + (px^2 + py^2)/c^2) + kappa^2 (x^2 + y^2)/2 with p = gamma v.

    A constant of motion only when kappa is constant; evaluated as a
    diagnostic regardless.
    """
    gam = gamma_cart(vx, vy, c)
    px, py = gam * vx, gam * vy
    csq = c * c
    return csq * math.sqrt(1.0 + (px * px + py * py) / csq) + 0.5 * kappa_sq * (
        x * x + y * y
    )


# --- per-trajectory evaluation -------------------------------------------------

INVARIANT_SYSTEMS = {
    "I": ("NR_EMP", "NR_OSC_2D"),
    "I_R": ("REL_EMP", "REL_OSC_2D"),
    "I_RR": ("NR_RR",),
    "I_RRR": ("REL_RR",),
    "H1D": ("REL_1D",),
    "H": ("REL_EMP",),
    "H_full": ("REL_OSC_2D",),
}

INVARIANT_NAMES = tuple(INVARIANT_SYSTEMS)


def _require_constant_positive_kappa(spec: SystemSpec, name: str) -> float:
    if not spec.kappa_sq.is_constant:
        raise InapplicableInvariantError(
            f"{name} uses rescaled variables and needs a constant kappa^2; "
            f"got expression {spec.kappa_sq!r}"
        )
    k2 = spec.kappa_sq.constant_value
    if k2 <= 0.0:
        raise InapplicableInvariantError(
            f"{name} needs kappa^2 > 0, got {k2!r}"
        )
    return math.sqrt(k2)


def make_evaluator(name: str, spec: SystemSpec, y0, quad_lower: float = 1.0):
    """Bind an invariant to a system, returning fn(t, state_row) -> value.

    For the 2D Cartesian systems the angular momentum is frozen from the
    initial sample ``y0`` (it is itself conserved along true trajectories).
    ``quad_lower`` sets the lower limit of the Ray-Reid coupling integrals;
    it shifts those invariants by a constant only.
    """
    if name not in INVARIANT_SYSTEMS:
        raise InapplicableInvariantError(
            f"unknown invariant {name!r}; known: {sorted(INVARIANT_SYSTEMS)}"
        )
    if spec.system not in INVARIANT_SYSTEMS[name]:
        raise InapplicableInvariantError(
            f"invariant {name!r} applies to {INVARIANT_SYSTEMS[name]}, not {spec.system}"
        )
    params = spec.params
    c = params.c

    if name == "I":
        if spec.system == "NR_EMP":
            # the radial constant takes the place of J^2 and may be negative
            cemp = params.emp_constant

            def eval_nr_emp(t, y):
                x, vx, rho, rhodot = y
                check_rho(rho)
                w = rho * vx - x * rhodot
                return 0.5 * (w * w + cemp * (x * x) / (rho * rho))

            return eval_nr_emp
        J0 = y0[0] * y0[3] - y0[1] * y0[2]

        def eval_nr_cart(t, y):
            x, yy, vx, vy = y
            rho = math.hypot(x, yy)
            check_rho(rho)
            rhodot = (x * vx + yy * vy) / rho
            return ermakov_lewis_nr(x, vx, rho, rhodot, J0)

        return eval_nr_cart

    if name == "I_R":
        if spec.system == "REL_EMP":
            J = params.J
            return lambda t, y: ermakov_lewis_rel(y[0], y[1], y[2], y[3], J, c)
        J0 = gamma_cart(y0[2], y0[3], c) * (y0[0] * y0[3] - y0[1] * y0[2])

        def eval_rel_cart(t, y):
            x, yy, vx, vy = y
            rho = math.hypot(x, yy)
            check_rho(rho)
            rhodot = (x * vx + yy * vy) / rho
            gam = gamma_cart(vx, vy, c)
            w = gam * (rho * vx - x * rhodot)
            return 0.5 * (w * w + (J0 * J0) * (x * x) / (rho * rho))

        return eval_rel_cart

    if name == "I_RR":
        return lambda t, y: rr_invariant(
            y[0], y[1], y[2], y[3], spec.f, spec.g, quad_lower
        )
    if name == "I_RRR":
        return lambda t, y: rrr_invariant(
            y[0], y[1], y[2], y[3], spec.f, spec.g, c, quad_lower
        )

    if name == "H1D":
        kappa = _require_constant_positive_kappa(spec, "H1D")
        return lambda t, y: energy_1d(kappa * y[0] / c, y[1] / c)
    if name == "H":
        kappa = _require_constant_positive_kappa(spec, "H")
        Jbar = kappa * params.J / (c * c)
        return lambda t, y: energy_rel_emp(kappa * y[2] / c, y[3] / c, Jbar)

    # H_full
    k2 = spec.kappa_sq
    return lambda t, y: hamiltonian_full(y[0], y[1], y[2], y[3], k2(t), c)


def evaluate_series(traj: Trajectory, name: str, quad_lower: float = 1.0) -> np.ndarray:
    """Evaluate one invariant at every sample of a trajectory."""
    fn = make_evaluator(name, traj.spec, traj.states[0], quad_lower)
    return np.array([fn(t, y) for t, y in zip(traj.t, traj.states)])


def attach(traj: Trajectory, names) -> Trajectory:
    """Compute and store the named invariants on the trajectory."""
    for name in names:
        traj.invariants[name] = evaluate_series(traj, name)
    return traj


# --- drift reporting ------------------------------------------------------------


@dataclass(frozen=True)
class DriftReport:
    """Conservation quality of one first integral over one trajectory."""

    name: str
    reference: float
    max_abs: float
    max_rel: float
    t_at_max: float
    n: int

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "reference": self.reference,
            "max_abs": self.max_abs,
            "max_rel": self.max_rel,
            "t_at_max": self.t_at_max,
            "n": self.n,
        }


def drift(
    traj: Trajectory, name: str, atol: float = 1e-12, quad_lower: float = 1.0
) -> DriftReport:
    """Evaluate an invariant along the trajectory and report its deviation
    from the value at the first sample.

    The relative deviation divides by max(|reference|, atol) so zero-valued
    invariants do not blow up the report.
    """
    if traj.n < 2:
        raise RempError(f"drift needs at least 2 samples, trajectory has {traj.n}")
    values = traj.invariants.get(name)
    if values is None or quad_lower != 1.0:
        values = evaluate_series(traj, name, quad_lower)
    ref = float(values[0])
    dev = np.abs(values - ref)
    i = int(np.argmax(dev))
    max_abs = float(dev[i])
    return DriftReport(
        name=name,
        reference=ref,
        max_abs=max_abs,
        max_rel=max_abs / max(abs(ref), atol),
        t_at_max=float(traj.t[i]),
        n=traj.n,
    )
