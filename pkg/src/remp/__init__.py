"""Relativistic Ermakov-Milne-Pinney dynamics.

Integrates the planar relativistic time-dependent harmonic oscillator, its
closed radial formulation, and the coupled Ray-Reid-type pairs; evaluates
their exact first integrals and quantifies conservation along trajectories;
analyzes the conservative cases through pseudo-potentials, return points and
the periodicity criterion; and verifies the nonlinear superposition law and
the dynamical time-rescaling construction numerically.
"""

from .elliptic import ellip_E, ellip_F
from .errors import RempError
from .exprparse import Expr, parse
from .integrator import EventSpec, IntegratorConfig, Trajectory, integrate
from .invariants import (
    DriftReport,
    drift,
    energy_1d,
    energy_rel_emp,
    ermakov_lewis_nr,
    ermakov_lewis_rel,
    hamiltonian_full,
    rr_invariant,
    rrr_invariant,
)
from .kinematics import (
    CartState,
    EmpState,
    PolarState,
    RelParams,
    gamma_axis,
    gamma_cart,
    gamma_polar,
    polar_to_cart,
    polar_to_emp,
)
from .systems import Coefficient, SystemSpec

__all__ = [
    "CartState",
    "Coefficient",
    "DriftReport",
    "EmpState",
    "EventSpec",
    "Expr",
    "IntegratorConfig",
    "PolarState",
    "RelParams",
    "RempError",
    "SystemSpec",
    "Trajectory",
    "drift",
    "ellip_E",
    "ellip_F",
    "energy_1d",
    "energy_rel_emp",
    "ermakov_lewis_nr",
    "ermakov_lewis_rel",
    "gamma_axis",
    "gamma_cart",
    "gamma_polar",
    "hamiltonian_full",
    "integrate",
    "parse",
    "polar_to_cart",
    "polar_to_emp",
    "rr_invariant",
    "rrr_invariant",
]

__version__ = "0.1.0"
