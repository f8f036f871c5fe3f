import math

import numpy as np
import pytest

from remp.errors import AxisSingularityError, ConfigError, SuperluminalError
from remp.exprparse import parse
from remp.kinematics import RelParams, gamma_cart
from remp.systems import (
    Coefficient,
    SystemSpec,
    make_rhs,
    rhs_nr_emp,
    rhs_nr_osc_2d,
    rhs_nr_rr,
    rhs_rel_1d,
    rhs_rel_emp,
    rhs_rel_osc_2d,
    rhs_rel_rr,
    validate_initial,
)

K1 = Coefficient(1.0)


def nr_spec(system, k2=1.0, J=0.0, Cemp=None, f=None, g=None):
    return SystemSpec(system, Coefficient(k2), RelParams(c=1.0, J=J, Cemp=Cemp), f=f, g=g)


def rel_spec(system, k2=1.0, J=0.0, c=1.0, f=None, g=None):
    return SystemSpec(system, Coefficient(k2), RelParams(c=c, J=J), f=f, g=g)


def euler_lagrange_accel(x, y, vx, vy, k2, c):
    """Independent route to the planar relativistic accelerations: solve the
    coupled Euler-Lagrange form
        (1 - vy^2/c^2) ax + (vx vy/c^2) ay = -k2 x / gamma^3
        (vx vy/c^2) ax + (1 - vx^2/c^2) ay = -k2 y / gamma^3
    as a 2x2 linear system."""
    gam = gamma_cart(vx, vy, c)
    csq = c * c
    A = np.array(
        [[1.0 - vy * vy / csq, vx * vy / csq], [vx * vy / csq, 1.0 - vx * vx / csq]]
    )
    b = np.array([-k2 * x / gam**3, -k2 * y / gam**3])
    return np.linalg.solve(A, b)


# --- nonrelativistic fields -----------------------------------------------------


def test_nr_osc_2d_values():
    spec = nr_spec("NR_OSC_2D")
    assert np.allclose(rhs_nr_osc_2d(0.0, [0, 0, 0, 0], spec), [0, 0, 0, 0])
    assert np.allclose(rhs_nr_osc_2d(0.0, [1, 0, 0, 0], spec), [0, 0, -1, 0])
    spec4 = nr_spec("NR_OSC_2D", k2=4.0)
    assert np.allclose(rhs_nr_osc_2d(0.0, [1, 2, 0, 0], spec4), [0, 0, -4, -8])


def test_nr_emp_equilibrium_and_values():
    spec = nr_spec("NR_EMP", J=1.0)
    d = rhs_nr_emp(0.0, [0.0, 0.0, 1.0, 0.0], spec)
    assert d[3] == pytest.approx(0.0, abs=0)  # kappa^2 rho^4 = J^2
    spec0 = nr_spec("NR_EMP", J=0.0)
    assert rhs_nr_emp(0.0, [0, 0, 2.0, 0.0], spec0)[3] == pytest.approx(-2.0)
    spec2 = nr_spec("NR_EMP", k2=0.0, J=2.0)
    assert rhs_nr_emp(0.0, [0, 0, 1.0, 0.0], spec2)[3] == pytest.approx(4.0)


def test_nr_emp_uses_cemp_override():
    spec = nr_spec("NR_EMP", k2=0.0, J=2.0, Cemp=9.0)
    assert rhs_nr_emp(0.0, [0, 0, 1.0, 0.0], spec)[3] == pytest.approx(9.0)


def test_nr_rr_reduces_to_oscillator_at_zero_couplings():
    f0, g0 = parse("0", "s"), parse("0", "s")
    spec = nr_spec("NR_RR", f=f0, g=g0)
    osc = nr_spec("NR_OSC_2D")
    y = [0.7, -1.3, 0.2, 0.4]
    assert np.allclose(rhs_nr_rr(0.0, y, spec), rhs_nr_osc_2d(0.0, y, osc), rtol=1e-15)


def test_nr_rr_unit_couplings():
    spec = nr_spec("NR_RR", f=parse("1", "s"), g=parse("0", "s"))
    d = rhs_nr_rr(0.0, [1.0, 1.0, 0.0, 0.0], spec)
    assert d[2] == pytest.approx(0.0, abs=1e-15)  # -1 + 1/(y x^2)
    assert d[3] == pytest.approx(-1.0)


def test_nr_rr_axis_guard():
    spec = nr_spec("NR_RR", f=parse("1", "s"), g=parse("1", "s"))
    with pytest.raises(AxisSingularityError):
        rhs_nr_rr(0.0, [1e-12, 1.0, 0.0, 0.0], spec)


# --- relativistic fields ----------------------------------------------------------


def test_rel_osc_2d_rest_matches_nr():
    spec = rel_spec("REL_OSC_2D")
    d = rhs_rel_osc_2d(0.0, [0.3, -0.8, 0.0, 0.0], spec)
    assert np.allclose(d, [0, 0, -0.3, 0.8], rtol=1e-15)


def test_rel_osc_2d_transverse_motion_example():
    spec = rel_spec("REL_OSC_2D")
    d = rhs_rel_osc_2d(0.0, [1.0, 0.0, 0.0, 0.6], spec)
    assert d[2] == pytest.approx(-0.8, rel=1e-15)
    assert d[3] == pytest.approx(0.0, abs=1e-15)


def test_rel_osc_2d_matches_euler_lagrange_form():
    rng = np.random.default_rng(5)
    spec = rel_spec("REL_OSC_2D", k2=1.3, c=1.0)
    for _ in range(200):
        x, y = rng.uniform(-2, 2, 2)
        v = rng.uniform(-0.95, 0.95, 2)
        while v[0] ** 2 + v[1] ** 2 >= 0.95:
            v = rng.uniform(-0.95, 0.95, 2)
        d = rhs_rel_osc_2d(0.0, [x, y, v[0], v[1]], spec)
        ax, ay = euler_lagrange_accel(x, y, v[0], v[1], 1.3, 1.0)
        assert d[2] == pytest.approx(ax, rel=1e-12, abs=1e-13)
        assert d[3] == pytest.approx(ay, rel=1e-12, abs=1e-13)


def test_rel_osc_2d_superluminal_guard():
    spec = rel_spec("REL_OSC_2D")
    with pytest.raises(SuperluminalError):
        rhs_rel_osc_2d(0.0, [1.0, 0.0, 0.9, 0.9], spec)


def test_rel_emp_example_value():
    spec = rel_spec("REL_EMP", J=1.0)
    d = rhs_rel_emp(0.0, [0.0, 0.0, 1.0, 0.0], spec)
    assert d[3] == pytest.approx(-1.0 / math.sqrt(2.0) + 0.5, rel=1e-15)


def test_rel_emp_equals_rel_1d_at_zero_J():
    spec = rel_spec("REL_EMP", J=0.0)
    spec1 = rel_spec("REL_1D")
    for x, v in [(0.4, 0.0), (1.1, 0.5), (0.2, -0.8)]:
        demp = rhs_rel_emp(0.0, [x, v, x, v], spec)
        d1 = rhs_rel_1d(0.0, [x, v], spec1)
        assert demp[1] == pytest.approx(d1[1], rel=1e-13)
        assert demp[3] == pytest.approx(d1[1], rel=1e-13)


def test_rel_emp_nr_equilibrium_in_limit():
    spec = rel_spec("REL_EMP", J=1.0, c=1e6)
    d = rhs_rel_emp(0.0, [0.0, 0.0, 1.0, 0.0], spec)
    assert abs(d[3]) < 1e-10


def test_rel_rr_reduces_to_rel_osc():
    f0, g0 = parse("0", "s"), parse("0", "s")
    spec = rel_spec("REL_RR", f=f0, g=g0)
    osc = rel_spec("REL_OSC_2D")
    rng = np.random.default_rng(2)
    for _ in range(100):
        x, y = rng.uniform(0.2, 2, 2)
        vx, vy = rng.uniform(-0.6, 0.6, 2)
        d1 = rhs_rel_rr(0.0, [x, y, vx, vy], spec)
        d2 = rhs_rel_osc_2d(0.0, [x, y, vx, vy], osc)
        assert np.allclose(d1, d2, rtol=1e-13, atol=1e-15)


def test_rel_rr_static_unit_couplings():
    spec = rel_spec("REL_RR", k2=0.0, f=parse("1", "s"), g=parse("1", "s"))
    d = rhs_rel_rr(0.0, [1.0, 1.0, 0.0, 0.0], spec)
    assert d[2] == pytest.approx(1.0, rel=1e-15)
    assert d[3] == pytest.approx(1.0, rel=1e-15)


def test_rel_rr_xy_swap_symmetry():
    f, g = parse("1 + s/2", "s"), parse("cos(s)", "s")
    spec = SystemSpec("REL_RR", K1, RelParams(c=1.0), f=f, g=g)
    swapped = SystemSpec("REL_RR", K1, RelParams(c=1.0), f=g, g=f)
    rng = np.random.default_rng(9)
    for _ in range(100):
        x, y = rng.uniform(0.3, 1.5, 2)
        vx, vy = rng.uniform(-0.5, 0.5, 2)
        d = rhs_rel_rr(0.0, [x, y, vx, vy], spec)
        ds = rhs_rel_rr(0.0, [y, x, vy, vx], swapped)
        assert d[2] == pytest.approx(ds[3], rel=1e-13, abs=1e-15)
        assert d[3] == pytest.approx(ds[2], rel=1e-13, abs=1e-15)


def test_rel_1d_values():
    spec = rel_spec("REL_1D")
    assert rhs_rel_1d(0.0, [1.0, 0.0], spec)[1] == -1.0
    assert rhs_rel_1d(0.0, [1.0, 0.6], spec)[1] == pytest.approx(-0.512, rel=1e-15)
    assert rhs_rel_1d(0.0, [0.0, 0.3], spec)[1] == 0.0


# --- reduction chain: relativistic -> nonrelativistic as c grows ---------------------


@pytest.mark.parametrize(
    "rel_id,nr_id",
    [("REL_OSC_2D", "NR_OSC_2D"), ("REL_EMP", "NR_EMP"), ("REL_RR", "NR_RR")],
)
def test_nr_limit_per_rhs_component(rel_id, nr_id):
    rng = np.random.default_rng(13)
    f = parse("1", "s") if rel_id == "REL_RR" else None
    g = parse("1", "s") if rel_id == "REL_RR" else None
    big_c = 1e6
    rel = SystemSpec(rel_id, Coefficient(1.2), RelParams(c=big_c, J=0.7), f=f, g=g)
    nr = SystemSpec(nr_id, Coefficient(1.2), RelParams(c=1.0, J=0.7), f=f, g=g)
    rel_rhs, nr_rhs = make_rhs(rel), make_rhs(nr)
    for _ in range(100):
        if rel_id == "REL_EMP":
            y = [rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(0.3, 2), rng.uniform(-1, 1)]
        else:
            y = [rng.uniform(0.3, 2), rng.uniform(0.3, 2), rng.uniform(-1, 1), rng.uniform(-1, 1)]
        assert np.allclose(rel_rhs(0.0, y), nr_rhs(0.0, y), rtol=1e-9, atol=1e-9)


# --- spec validation ------------------------------------------------------------------


def test_couplings_required_iff_rr():
    with pytest.raises(ConfigError):
        SystemSpec("NR_RR", K1, RelParams())
    with pytest.raises(ConfigError):
        SystemSpec("REL_RR", K1, RelParams(), f=parse("1", "s"))
    with pytest.raises(ConfigError):
        SystemSpec("REL_EMP", K1, RelParams(), f=parse("1", "s"), g=parse("1", "s"))
    with pytest.raises(ConfigError):
        SystemSpec("NO_SUCH", K1, RelParams())


def test_validate_initial_guards():
    spec = rel_spec("REL_EMP", J=0.5)
    validate_initial(spec, [1.0, 0.0, 1.0, 0.0])
    with pytest.raises(SuperluminalError):
        validate_initial(spec, [1.0, 0.0, 1.0, 1.5])
    with pytest.raises(Exception):
        validate_initial(spec, [1.0, 0.0, -1.0, 0.0])
    with pytest.raises(ConfigError):
        validate_initial(spec, [1.0, 0.0, 1.0])


def test_kappa_evaluated_at_state_time():
    spec = SystemSpec("NR_OSC_2D", Coefficient(parse("t", "t")), RelParams())
    d = rhs_nr_osc_2d(2.0, [1.0, 0.0, 0.0, 0.0], spec)
    assert d[2] == -2.0
