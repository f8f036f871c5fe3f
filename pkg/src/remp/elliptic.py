"""Incomplete elliptic integrals of the first and second kind.

Computed through the Carlson symmetric forms R_F and R_D with the
duplication theorem (Carlson, "Numerical computation of real or complex
elliptic integrals", 1995), which give uniform accuracy over the whole
domain. Amplitudes outside [-pi/2, pi/2] are reduced with the
quasi-periodicity

    F(phi + n*pi, k) = F(phi, k) + 2n K(k)
    E(phi + n*pi, k) = E(phi, k) + 2n E(pi/2, k)

The modulus convention matches

    F(phi, k) = integral_0^phi dphi' / sqrt(1 - k^2 sin^2 phi')
    E(phi, k) = integral_0^phi sqrt(1 - k^2 sin^2 phi') dphi'
"""

from __future__ import annotations

import math

from .errors import DivergentIntegralError, ModulusRangeError

_EPS = 2.220446049250313e-16


def carlson_rf(x: float, y: float, z: float) -> float:
    """Carlson R_F(x, y, z); arguments nonnegative, at most one zero."""
    if min(x, y, z) < 0.0 or (x + y) == 0.0 or (y + z) == 0.0 or (x + z) == 0.0:
        raise ValueError(f"carlson_rf domain: ({x!r}, {y!r}, {z!r})")
    xm, ym, zm = x, y, z
    a = (x + y + z) / 3.0
    a0 = a
    q = (3.0 * _EPS) ** (-0.125) * max(abs(a - x), abs(a - y), abs(a - z))
    scale = 1.0
    while q >= abs(a) * scale:
        sx, sy, sz = math.sqrt(xm), math.sqrt(ym), math.sqrt(zm)
        lam = sx * sy + sy * sz + sz * sx
        xm = (xm + lam) / 4.0
        ym = (ym + lam) / 4.0
        zm = (zm + lam) / 4.0
        a = (a + lam) / 4.0
        scale *= 4.0
    big_x = (a0 - x) / (a * scale)
    big_y = (a0 - y) / (a * scale)
    big_z = -(big_x + big_y)
    e2 = big_x * big_y - big_z * big_z
    e3 = big_x * big_y * big_z
    series = (
        1.0
        - e2 / 10.0
        + e3 / 14.0
        + e2 * e2 / 24.0
        - 3.0 * e2 * e3 / 44.0
        - 5.0 * e2 * e2 * e2 / 208.0
        + 3.0 * e3 * e3 / 104.0
        + e2 * e2 * e3 / 16.0
    )
    return series / math.sqrt(a)


def carlson_rd(x: float, y: float, z: float) -> float:
    """Carlson R_D(x, y, z); x, y nonnegative (at most one zero), z positive."""
    if min(x, y) < 0.0 or (x + y) == 0.0 or z <= 0.0:
        raise ValueError(f"carlson_rd domain: ({x!r}, {y!r}, {z!r})")
    xm, ym, zm = x, y, z
    a = (x + y + 3.0 * z) / 5.0
    a0 = a
    q = (0.25 * _EPS) ** (-0.125) * max(abs(a - x), abs(a - y), abs(a - z)) * 1.2
    acc = 0.0
    scale = 1.0  # 4**(-m)
    while q * scale >= abs(a):
        sx, sy, sz = math.sqrt(xm), math.sqrt(ym), math.sqrt(zm)
        lam = sx * sy + sy * sz + sz * sx
        acc += scale / (sz * (zm + lam))
        scale /= 4.0
        xm = (xm + lam) / 4.0
        ym = (ym + lam) / 4.0
        zm = (zm + lam) / 4.0
        a = (a + lam) / 4.0
    big_x = scale * (a0 - x) / a
    big_y = scale * (a0 - y) / a
    big_z = -(big_x + big_y) / 3.0
    e2 = big_x * big_y - 6.0 * big_z * big_z
    e3 = (3.0 * big_x * big_y - 8.0 * big_z * big_z) * big_z
    e4 = 3.0 * (big_x * big_y - big_z * big_z) * big_z * big_z
    e5 = big_x * big_y * big_z * big_z * big_z
    series = (
        1.0
        - 3.0 * e2 / 14.0
        + e3 / 6.0
        + 9.0 * e2 * e2 / 88.0
        - 3.0 * e4 / 22.0
        - 9.0 * e2 * e3 / 52.0
        + 3.0 * e5 / 26.0
        - e2 * e2 * e2 / 16.0
        + 3.0 * e3 * e3 / 40.0
        + 3.0 * e2 * e4 / 20.0
        + 45.0 * e2 * e2 * e3 / 272.0
        - 9.0 * (e3 * e4 + e2 * e5) / 68.0
    )
    return 3.0 * acc + scale * series / (a * math.sqrt(a))


def _check_modulus(k: float) -> None:
    if not (0.0 <= k <= 1.0):
        raise ModulusRangeError(f"modulus k must lie in [0, 1], got {k!r}")


def complete_K(k: float) -> float:
    """Complete integral of the first kind K(k) = F(pi/2, k)."""
    _check_modulus(k)
    if k == 1.0:
        raise DivergentIntegralError("F(pi/2, 1) diverges")
    return carlson_rf(0.0, 1.0 - k * k, 1.0)


def complete_E(k: float) -> float:
    """Complete integral of the second kind E(pi/2, k)."""
    _check_modulus(k)
    if k == 1.0:
        return 1.0
    kk = k * k
    return carlson_rf(0.0, 1.0 - kk, 1.0) - (kk / 3.0) * carlson_rd(0.0, 1.0 - kk, 1.0)


def _reduce(phi: float) -> tuple[int, float]:
    """Split phi = n*pi + r with r in [-pi/2, pi/2]."""
    n = round(phi / math.pi)
    return int(n), phi - n * math.pi


def _f_base(phi: float, k: float) -> float:
    # phi restricted to [0, pi/2]
    if k == 0.0:
        return phi
    if k == 1.0:
        s = math.sin(phi)
        if s >= 1.0 - 1e-15:
            raise DivergentIntegralError(f"F({phi!r}, 1) diverges at |phi| >= pi/2")
        return math.atanh(s)
    s = math.sin(phi)
    c = math.cos(phi)
    return s * carlson_rf(c * c, 1.0 - k * k * s * s, 1.0)


def _e_base(phi: float, k: float) -> float:
    if k == 0.0:
        return phi
    if k == 1.0:
        return math.sin(phi)
    s = math.sin(phi)
    if s == 0.0:
        return 0.0
    c = math.cos(phi)
    kk = k * k
    y = 1.0 - kk * s * s
    return s * carlson_rf(c * c, y, 1.0) - (kk / 3.0) * s * s * s * carlson_rd(c * c, y, 1.0)


def ellip_F(phi: float, k: float) -> float:
    """Incomplete elliptic integral of the first kind, any real amplitude.

    Diverges (and raises) for k = 1 with |phi| >= pi/2.
    """
    _check_modulus(k)
    n, r = _reduce(phi)
    sign = 1.0 if r >= 0.0 else -1.0
    base = sign * _f_base(abs(r), k)
    if n == 0:
        return base
    return 2.0 * n * complete_K(k) + base


def ellip_E(phi: float, k: float) -> float:
    """Incomplete elliptic integral of the second kind, any real amplitude."""
    _check_modulus(k)
    n, r = _reduce(phi)
    sign = 1.0 if r >= 0.0 else -1.0
    base = sign * _e_base(abs(r), k)
    if n == 0:
        return base
    return 2.0 * n * complete_E(k) + base
