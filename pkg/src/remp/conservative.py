"""Conservative-case analysis: pseudo-potentials, return points, equilibrium,
periodicity criterion, and the oscillation period computed three ways.

In rescaled variables the conserved energies are

    H_1D = (1 - v^2)^(-1/2) + x^2/2          (1D oscillator)
    H    = gamma + rho^2/2                    (radial system, J != 0)

and each trajectory obeys a Newtonian-form law v^2/2 + V(.) = 0 with the
pseudo-potentials implemented here. Return points are the roots of V, and
the period follows from t = integral dx / sqrt(-2 V).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from .elliptic import ellip_E, ellip_F
from .errors import BracketingError, NoOscillationError, RempError

_ROOT_TOL = 1e-12


# --- 1D oscillator -------------------------------------------------------------


def v1d(xbar: float, h1d: float) -> float:
    """Pseudo-potential of the 1D oscillator:
    V = -1/2 + 1 / (2 (H - x^2/2)^2), defined for x^2 < 2H."""
    d = h1d - 0.5 * xbar * xbar
    if d <= 0.0:
        raise RempError(f"v1d domain: x^2 = {xbar * xbar!r} must be < 2H = {2 * h1d!r}")
    return -0.5 + 0.5 / (d * d)


def return_points_1d(h1d: float) -> tuple[float, float]:
    """Oscillation bounds of the 1D oscillator: +/- sqrt(2) (H - 1)^(1/2)."""
    if h1d < 1.0:
        raise RempError(f"H must be >= 1, got {h1d!r}")
    a = math.sqrt(2.0) * math.sqrt(h1d - 1.0)
    return (-a, a)


def quadrature_time_1d(phi: float, amplitude: float) -> float:
    """Elapsed rescaled time to reach phase phi, from the elliptic closed form

        t - t0 = sqrt(4 + A^2) E(phi, k) - (2/sqrt(4 + A^2)) F(phi, k),

    with modulus k = A / sqrt(4 + A^2). The full period is the value at
    phi = 2 pi; the A -> 0 limit is t - t0 = phi.
    """
    if amplitude < 0.0:
        raise RempError(f"amplitude must be >= 0, got {amplitude!r}")
    root = math.sqrt(4.0 + amplitude * amplitude)
    k = amplitude / root
    return root * ellip_E(phi, k) - (2.0 / root) * ellip_F(phi, k)


def period_series(amplitude: float) -> float:
    """Small-amplitude period 2 pi (1 + 3 A^2 / 16); error is O(A^4)."""
    return 2.0 * math.pi * (1.0 + 3.0 * amplitude * amplitude / 16.0)


def phase_series(tbar: float, tbar0: float, amplitude: float) -> float:
    """Small-amplitude phase solution
    phi = dt - (3 A^2/32) (2 dt + sin 2 dt), dt = t - t0; error is O(A^4)."""
    dt = tbar - tbar0
    a2 = amplitude * amplitude
    return dt - (3.0 * a2 / 32.0) * (2.0 * dt + math.sin(2.0 * dt))


# --- radial system --------------------------------------------------------------


def v_rel_emp(rhobar: float, h: float, jbar: float) -> float:
    """Pseudo-potential of the conservative radial system:
    V = -1/2 + (1 + J^2/rho^2) / (2 (H - rho^2/2)^2), on 0 < rho < sqrt(2H)."""
    if rhobar <= 0.0:
        raise RempError(f"v_rel_emp domain: rho must be > 0, got {rhobar!r}")
    d = h - 0.5 * rhobar * rhobar
    if d <= 0.0:
        raise RempError(
            f"v_rel_emp domain: rho = {rhobar!r} must be < sqrt(2H) = {math.sqrt(2 * h)!r}"
        )
    return -0.5 + (1.0 + (jbar * jbar) / (rhobar * rhobar)) / (2.0 * d * d)


def _v_rel_emp_prime(rho: float, h: float, jbar: float) -> float:
    d = h - 0.5 * rho * rho
    j2 = jbar * jbar
    return -j2 / (rho**3 * d * d) + (1.0 + j2 / (rho * rho)) * rho / d**3


def rho_star(h: float, jbar: float) -> float:
    """Equilibrium point of the radial pseudo-potential:
    rho* = [(-3 J^2 + sqrt(9 J^4 + 16 J^2 H)) / 4]^(1/2); 0 for J = 0
    (degenerate: the potential then has no interior minimum)."""
    j2 = jbar * jbar
    if j2 == 0.0:
        return 0.0
    return 0.5 * math.sqrt(-3.0 * j2 + math.sqrt(9.0 * j2 * j2 + 16.0 * j2 * h))


def periodicity_bound(h: float) -> float:
    """Largest J^2 admitting oscillation:
    F(H) = (4/27) (-9H + H^3 + (3 + H^2)^(3/2))."""
    return (4.0 / 27.0) * (-9.0 * h + h**3 + (3.0 + h * h) ** 1.5)


def _bisect_newton(fn, dfn, lo: float, hi: float, flo: float) -> float:
    """Root of fn on [lo, hi] (sign change assumed): bisection to near-
    convergence, then Newton polish."""
    a, b, fa = lo, hi, flo
    for _ in range(200):
        if (b - a) <= _ROOT_TOL * max(1.0, abs(a), abs(b)):
            break
        m = 0.5 * (a + b)
        fm = fn(m)
        if fm == 0.0:
            a = b = m
            break
        if (fm > 0.0) == (fa > 0.0):
            a, fa = m, fm
        else:
            b = m
    r = 0.5 * (a + b)
    for _ in range(3):
        d = dfn(r)
        if d == 0.0:
            break
        step = fn(r) / d
        r2 = r - step
        if not (lo <= r2 <= hi):
            break
        r = r2
        if abs(step) <= 1e-16 * max(1.0, abs(r)):
            break
    return r


def return_points_rel_emp(h: float, jbar: float) -> tuple[float, float]:
    """Roots of the radial pseudo-potential bracketing the equilibrium.

    Requires J^2 < F(H) (oscillatory regime) and J != 0; V is monotone on
    each side of rho*, so each root is found by bracketed bisection with a
    Newton polish.
    """
    j2 = jbar * jbar
    bound = periodicity_bound(h)
    if j2 >= bound:
        raise NoOscillationError(
            f"J^2 = {j2!r} >= F(H) = {bound!r}: no oscillatory motion"
        )
    if j2 == 0.0:
        raise NoOscillationError(
            "J = 0 is degenerate for the radial potential (no inner barrier); "
            "use the 1D oscillator analysis instead"
        )
    rs = rho_star(h, jbar)
    v_star = v_rel_emp(rs, h, jbar)
    if v_star >= 0.0:
        raise NoOscillationError(
            f"V(rho*) = {v_star!r} >= 0 despite J^2 < F(H); no potential well"
        )
    fn = lambda r: v_rel_emp(r, h, jbar)
    dfn = lambda r: _v_rel_emp_prime(r, h, jbar)

    lo = rs
    for _ in range(2000):
        lo *= 0.5
        if fn(lo) > 0.0:
            break
    else:
        raise BracketingError(f"no sign change toward rho -> 0 for H={h!r}, J={jbar!r}")
    inner = _bisect_newton(fn, dfn, lo, rs, fn(lo))

    sup = math.sqrt(2.0 * h)
    hi = rs
    for _ in range(2000):
        hi = sup - 0.5 * (sup - hi)
        if fn(hi) > 0.0:
            break
    else:
        raise BracketingError(
            f"no sign change toward sqrt(2H) for H={h!r}, J={jbar!r}"
        )
    # fn(rs) < 0, fn(hi) > 0: pass flo as value at the left end
    outer = _bisect_newton(fn, dfn, rs, hi, v_star)
    return inner, outer


def period_rel_emp(h: float, jbar: float) -> float:
    """Radial oscillation period 2 integral drho / sqrt(-2V) between the
    return points, with the substitution rho = rho- + (rho+ - rho-) sin^2 psi
    absorbing the inverse-square-root endpoint singularities."""
    lo, hi = return_points_rel_emp(h, jbar)
    width = hi - lo

    def integrand(psi: float) -> float:
        s = math.sin(psi)
        c = math.cos(psi)
        rho = lo + width * s * s
        val = -2.0 * v_rel_emp(rho, h, jbar)
        if val <= 0.0:
            return 0.0
        return 2.0 * width * s * c / math.sqrt(val)

    val, _ = quad(integrand, 0.0, 0.5 * math.pi, epsabs=1e-12, epsrel=1e-12, limit=200)
    return 2.0 * val


# --- periodicity scan -------------------------------------------------------------


@dataclass(frozen=True)
class ScanSample:
    """One drawn initial condition and its periodicity verdict."""

    rho: float
    v: float
    u: float  # fraction of the remaining speed budget in the angular direction
    jbar: float
    h: float
    bound: float
    satisfied: bool


@dataclass
class ScanResult:
    n: int
    seed: int
    fraction: float
    samples: list[ScanSample] = field(default_factory=list)
    rejected: int = 0

    @property
    def failures(self) -> list[ScanSample]:
        return [s for s in self.samples if not s.satisfied]

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "seed": self.seed,
            "fraction": self.fraction,
            "rejected": self.rejected,
            "failures": [s.__dict__ for s in self.failures],
        }


def sample_is_valid(rho: float, v: float, u: float, h_max: float) -> bool:
    """Meaningful-initial-condition box: 0 < rho < sqrt(2 H_max) with margin,
    subluminal radial and angular motion."""
    if not (0.0 < rho < math.sqrt(2.0 * h_max)):
        return False
    if not (abs(v) < 1.0 and abs(u) < 1.0):
        return False
    speed_sq = v * v + u * u * (1.0 - v * v)
    return speed_sq < 1.0 - 1e-12


def evaluate_scan_sample(rho: float, v: float, u: float) -> ScanSample:
    """Energy, angular momentum and periodicity verdict of one state.

    The angular velocity is u * sqrt(1 - v^2) / rho so the total speed stays
    subluminal for |u| < 1; J and H then follow from the state itself.
    """
    one_minus_v2 = 1.0 - v * v
    theta_dot = u * math.sqrt(one_minus_v2) / rho
    speed_sq = v * v + rho * rho * theta_dot * theta_dot
    gam = 1.0 / math.sqrt(1.0 - speed_sq)
    jbar = gam * rho * rho * theta_dot
    h = math.sqrt((1.0 + (jbar * jbar) / (rho * rho)) / one_minus_v2) + 0.5 * rho * rho
    bound = periodicity_bound(h)
    return ScanSample(
        rho=rho,
        v=v,
        u=u,
        jbar=jbar,
        h=h,
        bound=bound,
        satisfied=jbar * jbar < bound,
    )


def periodicity_scan(n: int, seed: int, h_max: float = 3.0) -> ScanResult:
    """Draw n states from the meaningful-initial-condition box and check the
    periodicity criterion J^2 < F(H) on each.

    Deterministic for a fixed seed regardless of worker count; the REMP_THREADS
    environment variable caps the evaluation pool (default: sequential).
    """
    if n < 1:
        raise RempError(f"scan needs n >= 1, got {n!r}")
    rng = np.random.default_rng(seed)
    sup = math.sqrt(2.0 * h_max)
    draws: list[tuple[float, float, float]] = []
    rejected = 0
    while len(draws) < n:
        rho = rng.uniform(0.05, sup - 0.05)
        v = rng.uniform(-0.95, 0.95)
        u = rng.uniform(-0.95, 0.95)
        if not sample_is_valid(rho, v, u, h_max):
            rejected += 1
            continue
        draws.append((rho, v, u))

    workers = int(os.environ.get("REMP_THREADS", "1") or "1")
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            samples = list(pool.map(lambda d: evaluate_scan_sample(*d), draws))
    else:
        samples = [evaluate_scan_sample(*d) for d in draws]
    fraction = sum(1 for s in samples if s.satisfied) / n
    return ScanResult(n=n, seed=seed, fraction=fraction, samples=samples, rejected=rejected)


# --- potential profiles ------------------------------------------------------------


@dataclass
class PotentialProfile:
    """Sampled pseudo-potential curve with its return points and equilibrium."""

    kind: str  # "v1d" | "v"
    h: float
    jbar: float
    coords: np.ndarray
    values: np.ndarray
    return_points: tuple[float, float]
    equilibrium: float
    v_at_equilibrium: float


def analyze_v1d(h: float, n: int = 401) -> PotentialProfile:
    """Sample the 1D pseudo-potential between (and slightly past) its return
    points; the equilibrium is x = 0."""
    lo, hi = return_points_1d(h)
    span = max(hi - lo, 1e-3)
    sup = math.sqrt(2.0 * h)
    a = max(-0.999 * sup, lo - 0.05 * span)
    b = min(0.999 * sup, hi + 0.05 * span)
    xs = np.linspace(a, b, n)
    vs = np.array([v1d(x, h) for x in xs])
    return PotentialProfile(
        kind="v1d",
        h=h,
        jbar=0.0,
        coords=xs,
        values=vs,
        return_points=(lo, hi),
        equilibrium=0.0,
        v_at_equilibrium=v1d(0.0, h),
    )


def analyze_v_rel_emp(h: float, jbar: float, n: int = 401) -> PotentialProfile:
    """Sample the radial pseudo-potential around its well."""
    lo, hi = return_points_rel_emp(h, jbar)
    rs = rho_star(h, jbar)
    span = hi - lo
    sup = math.sqrt(2.0 * h)
    a = max(0.25 * lo, lo - 0.05 * span)
    b = min(sup - 1e-3 * sup, hi + 0.05 * span)
    xs = np.linspace(a, b, n)
    vs = np.array([v_rel_emp(x, h, jbar) for x in xs])
    return PotentialProfile(
        kind="v",
        h=h,
        jbar=jbar,
        coords=xs,
        values=vs,
        return_points=(lo, hi),
        equilibrium=rs,
        v_at_equilibrium=v_rel_emp(rs, h, jbar),
    )
