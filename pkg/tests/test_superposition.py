import math

import numpy as np
import pytest
from scipy.optimize import brentq

from remp.errors import (
    InconsistentInitialDataError,
    MissingChannelError,
    NonpositiveAngularMomentumError,
)
from remp.integrator import IntegratorConfig, integrate
from remp.invariants import drift
from remp.kinematics import RelParams, gamma_polar
from remp.superposition import (
    initial_oscillator_data,
    superpose,
    transform_QT,
    transformed_invariant,
    verify_superposition,
)
from remp.systems import Coefficient, SystemSpec


def emp_spec(J, c=1.0, k2=1.0, system="REL_EMP"):
    return SystemSpec(system, Coefficient(k2), RelParams(c=c, J=J))


def run(spec, init, t_end=50.0, dt=0.02, channels=("accum_T",)):
    return integrate(spec, init, IntegratorConfig(t_end=t_end, sample_dt=dt), channels=channels)


def test_transform_collapses_to_one_at_zero_J():
    # with J = 0 and x = rho the radial coordinate hits zero in finite time;
    # stay inside the window where the state is valid
    spec = emp_spec(0.0)
    traj = run(spec, [0.7, 0.1, 0.7, 0.1], t_end=1.2)
    Q, T = transform_QT(traj)
    assert np.allclose(Q, 1.0, atol=1e-12)
    assert T[0] == 0.0


def test_transform_requires_channel():
    spec = emp_spec(0.5)
    traj = run(spec, [0.8, 0.0, 1.0, 0.0], t_end=2.0, channels=())
    with pytest.raises(MissingChannelError):
        transform_QT(traj)


def test_transformed_invariant_constant():
    J = 0.5
    x0, vx0 = initial_oscillator_data(1.0, 0.0, J, 1.0, 0.7)
    traj = run(emp_spec(J), [x0, vx0, 1.0, 0.0])
    series = transformed_invariant(traj)
    assert np.max(np.abs(series - J * J / 2)) < 1e-6


def test_superpose_rejects_nonpositive_J():
    spec = emp_spec(0.0)
    traj = run(spec, [0.7, 0.1, 0.7, 0.1], t_end=1.2)
    with pytest.raises(NonpositiveAngularMomentumError):
        superpose(traj, 0.3)


def test_phase_at_pi_half_starts_on_rho():
    J = 0.5
    delta = math.pi / 2
    x0, vx0 = initial_oscillator_data(1.0, 0.0, J, 1.0, delta)
    assert x0 == pytest.approx(1.0, rel=1e-15)
    traj = run(emp_spec(J), [x0, vx0, 1.0, 0.0], t_end=5.0)
    x_rec = superpose(traj, delta)
    assert x_rec[0] == pytest.approx(traj.component("rho")[0], rel=1e-12)


def test_sine_bound_reconstruction_inside_rho():
    J = 0.5
    x0, vx0 = initial_oscillator_data(1.0, 0.0, J, 1.0, 0.3)
    traj = run(emp_spec(J), [x0, vx0, 1.0, 0.0])
    x_rec = superpose(traj, 0.3)
    assert np.all(np.abs(x_rec) <= traj.component("rho") * (1 + 1e-14))


def circular_radius(J, c, k2=1.0):
    def f(rho):
        return k2 * rho**4 * math.sqrt(1.0 + J * J / (c * c * rho * rho)) - J * J

    return brentq(f, 1e-6, 10.0, xtol=1e-15)


def test_circular_solution_reconstruction():
    # on the circular radial solution the law is x = rho0 sin(J t/(gamma rho0^2) + delta)
    J, c = 0.5, 1.0
    rho0 = circular_radius(J, c)
    gam0 = gamma_polar(rho0, 0.0, J, c)
    delta = 0.2
    x0, vx0 = initial_oscillator_data(rho0, 0.0, J, c, delta)
    traj = run(emp_spec(J), [x0, vx0, rho0, 0.0])
    x_expected = rho0 * np.sin(J * traj.t / (gam0 * rho0 * rho0) + delta)
    assert np.max(np.abs(traj.component("x") - x_expected)) < 1e-7


def test_verify_superposition_with_explicit_phase_zero():
    J = 0.5
    res = verify_superposition(
        emp_spec(J),
        [0.0, J / gamma_polar(1.0, 0.0, J, 1.0), 1.0, 0.0],
        0.0,
        IntegratorConfig(t_end=50.0, sample_dt=0.02),
    )
    assert res.max_deviation < 1e-6


def test_verify_superposition_nr_limit_matches_newtonian_law():
    # at c = 1e6 the construction reduces to the Newtonian superposition law
    J = 0.5
    res = verify_superposition(
        emp_spec(J, c=1e6),
        [0.0, J / 1.0, 1.0, 0.0],
        0.0,
        IntegratorConfig(t_end=50.0, sample_dt=0.02),
    )
    assert res.max_deviation < 1e-6
    # and the plain nonrelativistic system gives the same law exactly
    res_nr = verify_superposition(
        emp_spec(J, system="NR_EMP"),
        [0.0, J / 1.0, 1.0, 0.0],
        0.0,
        IntegratorConfig(t_end=50.0, sample_dt=0.02),
    )
    assert res_nr.max_deviation < 1e-6


def test_verify_superposition_rejects_inconsistent_initial_data():
    J = 0.5
    x0, vx0 = initial_oscillator_data(1.0, 0.0, J, 1.0, 0.7)
    with pytest.raises(InconsistentInitialDataError):
        verify_superposition(
            emp_spec(J),
            [x0 + 1e-6, vx0, 1.0, 0.0],
            0.7,
            IntegratorConfig(t_end=5.0),
        )


def test_verify_superposition_rejects_zero_J():
    with pytest.raises(NonpositiveAngularMomentumError):
        verify_superposition(
            emp_spec(0.0), [0.0, 0.0, 1.0, 0.0], 0.0, IntegratorConfig(t_end=5.0)
        )


def test_family_members_share_the_radial_invariant():
    # different phase constants give different oscillator solutions on the
    # same rho(t); each conserves the first integral at J^2/2
    J = 0.5
    for delta in (0.0, 0.9, 2.1):
        x0, vx0 = initial_oscillator_data(1.0, 0.0, J, 1.0, delta)
        traj = run(emp_spec(J), [x0, vx0, 1.0, 0.0], t_end=30.0)
        rep = drift(traj, "I_R")
        assert rep.reference == pytest.approx(J * J / 2, rel=1e-10)
        assert rep.max_rel < 1e-7
