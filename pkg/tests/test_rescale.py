import math

import numpy as np
import pytest

from remp.errors import RempError
from remp.exprparse import parse
from remp.integrator import IntegratorConfig
from remp.rescale import (
    integrate_tau,
    invariant_tau,
    verify_rrr_equivalence,
)
from remp.systems import Coefficient

F1 = parse("1", "s")
G1 = parse("1", "s")


def cfg(tau_end=20.0, dt=0.01):
    return IntegratorConfig(t_end=tau_end, sample_dt=dt)


def test_circle_solution_maps_to_constant_gamma():
    # x = cos tau, y = sin tau solves the tau-system at omega = 1 with no
    # couplings; speeds in physical time are 1/sqrt(2) at c = 1
    pair = integrate_tau(Coefficient(1.0), None, None, [1.0, 0.0, 0.0, 1.0], cfg(), 1.0)
    assert np.max(np.abs(pair.tau_states[:, 0] - np.cos(pair.tau))) < 1e-8
    assert np.max(np.abs(pair.t_of_tau - math.sqrt(2.0) * pair.tau)) < 1e-8
    speeds = np.hypot(pair.t_states[:, 2], pair.t_states[:, 3])
    assert np.max(np.abs(speeds - 1.0 / math.sqrt(2.0))) < 1e-8


def test_map_is_monotone_and_anchored():
    pair = integrate_tau(Coefficient(1.0), F1, G1, [1.0, 1.2, 0.0, 0.3], cfg(), 2.0)
    assert pair.t_of_tau[0] == 0.0
    assert np.all(np.diff(pair.t_of_tau) > 0)
    assert np.all(np.diff(pair.tau_of_t) > 0)
    # dt/dtau = gamma >= 1: physical time runs at least as fast as tau
    assert np.all(pair.t_of_tau >= pair.tau - 1e-12)


def test_nr_identity_at_huge_c():
    pair = integrate_tau(Coefficient(1.0), F1, G1, [1.0, 1.2, 0.0, 0.3], cfg(), 1e6)
    assert np.max(np.abs(pair.t_of_tau - pair.tau)) < 1e-8
    # resampled trajectory coincides with the tau trajectory
    rep = verify_rrr_equivalence(pair, Coefficient(1.0), F1, G1, 1e6, compare="rr")
    assert rep.max_residual < 1e-6


def test_equivalence_residual_and_invariant_match():
    pair = integrate_tau(Coefficient(1.0), F1, G1, [1.0, 1.2, 0.0, 0.3], cfg(), 2.0)
    rep = verify_rrr_equivalence(pair, Coefficient(1.0), F1, G1, 2.0)
    assert rep.max_residual < 1e-6
    assert rep.invariant_max_diff < 1e-10
    assert rep.invariant_tau_drift_rel < 1e-8


def test_equivalence_with_tau_dependent_frequency():
    omega = Coefficient(parse("1 + 0.2*sin(0.5*tau)", "tau"))
    pair = integrate_tau(omega, F1, G1, [1.0, 1.1, 0.1, 0.2], cfg(15.0), 1.5)
    rep = verify_rrr_equivalence(pair, omega, F1, G1, 1.5)
    assert rep.max_residual < 1e-6
    assert rep.invariant_max_diff < 1e-10


def test_invariant_tau_is_conserved():
    pair = integrate_tau(Coefficient(1.0), F1, G1, [1.0, 1.2, 0.0, 0.3], cfg(), 2.0)
    vals = invariant_tau(pair.tau_states, F1, G1)
    assert np.max(np.abs(vals - vals[0])) / abs(vals[0]) < 1e-8


def test_compare_mode_validated():
    pair = integrate_tau(Coefficient(1.0), None, None, [1.0, 0.0, 0.0, 1.0], cfg(5.0), 1.0)
    with pytest.raises(RempError):
        verify_rrr_equivalence(pair, Coefficient(1.0), None, None, 1.0, compare="bogus")
