"""Scenario-file loading and validation.

Configs are JSON objects validated eagerly and strictly: unknown keys are
rejected and no computation starts until the whole config has been checked.
Coefficient expressions use the grammar of :mod:`remp.exprparse` with free
variable ``t`` (frequency), ``tau`` (auxiliary-time frequency) or ``s``
(couplings).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .errors import ConfigError, ExprError
from .exprparse import Expr, parse
from .integrator import EventSpec, IntegratorConfig
from .kinematics import PolarState, RelParams, polar_to_cart, polar_to_emp
from .invariants import INVARIANT_NAMES, INVARIANT_SYSTEMS
from .superposition import initial_oscillator_data
from .systems import CHANNELS, STATE_COMPONENTS, SYSTEM_IDS, Coefficient, SystemSpec

_MISSING = object()


def load_json(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except OSError as e:
        raise ConfigError(f"cannot read config {path!r}: {e}") from None
    except json.JSONDecodeError as e:
        raise ConfigError(f"config {path!r} is not valid JSON: {e}") from None
    if not isinstance(obj, dict):
        raise ConfigError(f"config {path!r} must hold a JSON object")
    return obj


def _check_keys(obj: dict, allowed, where: str) -> None:
    unknown = sorted(set(obj) - set(allowed))
    if unknown:
        raise ConfigError(f"{where}: unknown key(s) {unknown}; allowed: {sorted(allowed)}")


def _get(obj: dict, key: str, types, where: str, default=_MISSING):
    if key not in obj:
        if default is _MISSING:
            raise ConfigError(f"{where}: missing required key {key!r}")
        return default
    val = obj[key]
    if types is float and isinstance(val, bool):
        raise ConfigError(f"{where}.{key}: expected a number, got a boolean")
    if types is float and isinstance(val, (int, float)):
        return float(val)
    if not isinstance(val, types):
        raise ConfigError(f"{where}.{key}: expected {types}, got {type(val).__name__}")
    return val


def _coefficient(obj: dict, key: str, var: str, where: str, default=_MISSING) -> Coefficient:
    val = obj.get(key, _MISSING)
    if val is _MISSING:
        if default is _MISSING:
            raise ConfigError(f"{where}: missing required key {key!r}")
        return default
    if isinstance(val, bool) or not isinstance(val, (int, float, str)):
        raise ConfigError(f"{where}.{key}: expected a number or expression string")
    if isinstance(val, str):
        try:
            return Coefficient(parse(val, var))
        except ExprError as e:
            raise ConfigError(f"{where}.{key}: {e}") from None
    return Coefficient(float(val))


def _expression(obj: dict, key: str, var: str, where: str) -> Expr | None:
    val = obj.get(key)
    if val is None:
        return None
    if not isinstance(val, str):
        raise ConfigError(f"{where}.{key}: expected an expression string")
    try:
        return parse(val, var)
    except ExprError as e:
        raise ConfigError(f"{where}.{key}: {e}") from None


def _params(obj: dict, where: str) -> RelParams:
    sub = _get(obj, "params", dict, where, default={})
    _check_keys(sub, ("c", "J", "Cemp"), f"{where}.params")
    c = _get(sub, "c", float, f"{where}.params", default=1.0)
    J = _get(sub, "J", float, f"{where}.params", default=0.0)
    cemp = sub.get("Cemp")
    if cemp is not None:
        cemp = _get(sub, "Cemp", float, f"{where}.params")
    if c <= 0.0:
        raise ConfigError(f"{where}.params.c must be positive, got {c}")
    return RelParams(c=c, J=J, Cemp=cemp)


def _integrator(obj: dict, where: str) -> IntegratorConfig:
    sub = _get(obj, "integrator", dict, where)
    allowed = ("method", "rtol", "atol", "max_step", "t_end", "sample_dt")
    _check_keys(sub, allowed, f"{where}.integrator")
    w = f"{where}.integrator"
    try:
        return IntegratorConfig(
            t_end=_get(sub, "t_end", float, w),
            method=_get(sub, "method", str, w, default="rk45"),
            rtol=_get(sub, "rtol", float, w, default=1e-10),
            atol=_get(sub, "atol", float, w, default=1e-12),
            max_step=(
                _get(sub, "max_step", float, w) if sub.get("max_step") is not None else None
            ),
            sample_dt=_get(sub, "sample_dt", float, w, default=0.01),
        )
    except ConfigError:
        raise
    except Exception as e:  # dataclass validation
        raise ConfigError(f"{w}: {e}") from None


def _initial_state(obj: dict, spec: SystemSpec, where: str):
    """Initial state, either per-component or as polar data (2D/radial systems)."""
    sub = _get(obj, "initial", dict, where)
    comps = STATE_COMPONENTS[spec.system]
    if "polar" in sub:
        _check_keys(sub, ("polar",), f"{where}.initial")
        pol = sub["polar"]
        if not isinstance(pol, dict):
            raise ConfigError(f"{where}.initial.polar must be an object")
        _check_keys(pol, ("rho", "rhodot", "theta", "t"), f"{where}.initial.polar")
        w = f"{where}.initial.polar"
        state = PolarState(
            t=_get(pol, "t", float, w, default=0.0),
            rho=_get(pol, "rho", float, w),
            rhodot=_get(pol, "rhodot", float, w, default=0.0),
            theta=_get(pol, "theta", float, w, default=0.0),
        )
        if spec.system in ("NR_EMP", "REL_EMP"):
            emp = polar_to_emp(state, spec.params.J, spec.params.c)
            return emp.t, [emp.x, emp.vx, emp.rho, emp.rhodot]
        if spec.system in ("NR_OSC_2D", "REL_OSC_2D", "NR_RR", "REL_RR"):
            cart = polar_to_cart(state, spec.params.J, spec.params.c)
            return cart.t, [cart.x, cart.y, cart.vx, cart.vy]
        raise ConfigError(f"{where}.initial.polar does not apply to {spec.system}")
    _check_keys(sub, comps + ("t",), f"{where}.initial")
    t0 = _get(sub, "t", float, f"{where}.initial", default=0.0)
    return t0, [_get(sub, c, float, f"{where}.initial") for c in comps]


@dataclass
class OutputRequest:
    channels: tuple[str, ...] = ()
    invariants: tuple[str, ...] = ()
    events: tuple[EventSpec, ...] = ()


def _outputs(obj: dict, spec: SystemSpec, where: str) -> OutputRequest:
    sub = _get(obj, "outputs", dict, where, default={})
    _check_keys(sub, ("channels", "invariants", "events"), f"{where}.outputs")
    channels = sub.get("channels", [])
    invariants = sub.get("invariants", [])
    events = sub.get("events", [])
    if not isinstance(channels, list) or not all(isinstance(x, str) for x in channels):
        raise ConfigError(f"{where}.outputs.channels must be a list of names")
    if not isinstance(invariants, list) or not all(isinstance(x, str) for x in invariants):
        raise ConfigError(f"{where}.outputs.invariants must be a list of names")
    for name in channels:
        if name not in CHANNELS:
            raise ConfigError(
                f"{where}.outputs.channels: unknown channel {name!r}; known {sorted(CHANNELS)}"
            )
        if spec.system not in CHANNELS[name]:
            raise ConfigError(
                f"{where}.outputs.channels: {name!r} does not apply to {spec.system}"
            )
    for name in invariants:
        if name not in INVARIANT_NAMES:
            raise ConfigError(
                f"{where}.outputs.invariants: unknown invariant {name!r}; "
                f"known {sorted(INVARIANT_NAMES)}"
            )
        if spec.system not in INVARIANT_SYSTEMS[name]:
            raise ConfigError(
                f"{where}.outputs.invariants: {name!r} applies to "
                f"{INVARIANT_SYSTEMS[name]}, not {spec.system}"
            )
        if name in ("H", "H1D") and not spec.kappa_sq.is_constant:
            raise ConfigError(
                f"{where}.outputs.invariants: {name!r} needs a constant kappa_sq"
            )
    if not isinstance(events, list):
        raise ConfigError(f"{where}.outputs.events must be a list")
    specs = []
    for i, ev in enumerate(events):
        if not isinstance(ev, dict):
            raise ConfigError(f"{where}.outputs.events[{i}] must be an object")
        _check_keys(ev, ("component", "direction"), f"{where}.outputs.events[{i}]")
        comp = _get(ev, "component", str, f"{where}.outputs.events[{i}]")
        if comp not in spec.components:
            raise ConfigError(
                f"{where}.outputs.events[{i}].component {comp!r} not in {spec.components}"
            )
        direction = _get(ev, "direction", str, f"{where}.outputs.events[{i}]", default="any")
        try:
            specs.append(EventSpec(component=comp, direction=direction))
        except ConfigError as e:
            raise ConfigError(f"{where}.outputs.events[{i}]: {e}") from None
    return OutputRequest(
        channels=tuple(channels), invariants=tuple(invariants), events=tuple(specs)
    )


@dataclass
class SimulateScenario:
    spec: SystemSpec
    t0: float
    init: list[float]
    integrator: IntegratorConfig
    outputs: OutputRequest


def load_simulate(obj: dict) -> SimulateScenario:
    where = "config"
    _check_keys(
        obj, ("system", "params", "kappa_sq", "f", "g", "initial", "integrator", "outputs"), where
    )
    system = _get(obj, "system", str, where)
    if system not in SYSTEM_IDS:
        raise ConfigError(f"{where}.system: unknown id {system!r}; known {list(SYSTEM_IDS)}")
    params = _params(obj, where)
    kappa = _coefficient(obj, "kappa_sq", "t", where)
    f = _expression(obj, "f", "s", where)
    g = _expression(obj, "g", "s", where)
    spec = SystemSpec(system, kappa, params, f=f, g=g)
    t0, init = _initial_state(obj, spec, where)
    cfg = _integrator(obj, where)
    outs = _outputs(obj, spec, where)
    return SimulateScenario(spec=spec, t0=t0, init=init, integrator=cfg, outputs=outs)


@dataclass
class SuperposeScenario:
    spec: SystemSpec
    t0: float
    init: list[float]
    delta: float
    integrator: IntegratorConfig
    tol: float


def load_superpose(obj: dict) -> SuperposeScenario:
    where = "config"
    _check_keys(
        obj,
        ("system", "params", "kappa_sq", "delta", "initial", "integrator", "tol"),
        where,
    )
    system = _get(obj, "system", str, where, default="REL_EMP")
    if system not in ("REL_EMP", "NR_EMP"):
        raise ConfigError(f"{where}.system: superposition runs on REL_EMP or NR_EMP")
    params = _params(obj, where)
    if not (params.J > 0.0):
        raise ConfigError(f"{where}.params.J: superposition law requires J > 0, got {params.J}")
    kappa = _coefficient(obj, "kappa_sq", "t", where)
    spec = SystemSpec(system, kappa, params)
    delta = _get(obj, "delta", float, where)
    sub = _get(obj, "initial", dict, where)
    _check_keys(sub, ("rho", "rhodot", "x", "vx", "t"), f"{where}.initial")
    w = f"{where}.initial"
    t0 = _get(sub, "t", float, w, default=0.0)
    rho0 = _get(sub, "rho", float, w)
    rhodot0 = _get(sub, "rhodot", float, w, default=0.0)
    # (x, vx) default to the values consistent with delta
    c_eff = params.c if system == "REL_EMP" else math.inf
    x_def, vx_def = initial_oscillator_data(rho0, rhodot0, params.J, c_eff, delta)
    x0 = _get(sub, "x", float, w, default=x_def)
    vx0 = _get(sub, "vx", float, w, default=vx_def)
    cfg = _integrator(obj, where)
    tol = _get(obj, "tol", float, where, default=1e-6)
    return SuperposeScenario(
        spec=spec,
        t0=t0,
        init=[x0, vx0, rho0, rhodot0],
        delta=delta,
        integrator=cfg,
        tol=tol,
    )


@dataclass
class RescaleScenario:
    omega_sq: Coefficient
    f: Expr | None
    g: Expr | None
    c: float
    init: list[float]
    integrator: IntegratorConfig
    tol: float
    compare: str


def load_rescale(obj: dict) -> RescaleScenario:
    where = "config"
    _check_keys(
        obj, ("omega_sq", "f", "g", "c", "initial", "integrator", "tol", "compare"), where
    )
    omega = _coefficient(obj, "omega_sq", "tau", where)
    f = _expression(obj, "f", "s", where)
    g = _expression(obj, "g", "s", where)
    if (f is None) != (g is None):
        raise ConfigError(f"{where}: provide both couplings f and g, or neither")
    c = _get(obj, "c", float, where, default=1.0)
    if c <= 0.0:
        raise ConfigError(f"{where}.c must be positive")
    sub = _get(obj, "initial", dict, where)
    _check_keys(sub, ("x", "y", "xp", "yp"), f"{where}.initial")
    w = f"{where}.initial"
    init = [
        _get(sub, "x", float, w),
        _get(sub, "y", float, w),
        _get(sub, "xp", float, w, default=0.0),
        _get(sub, "yp", float, w, default=0.0),
    ]
    cfg = _integrator(obj, where)
    tol = _get(obj, "tol", float, where, default=1e-6)
    compare = _get(obj, "compare", str, where, default="rrr")
    if compare not in ("rrr", "rr"):
        raise ConfigError(f"{where}.compare must be 'rrr' or 'rr'")
    return RescaleScenario(
        omega_sq=omega, f=f, g=g, c=c, init=init, integrator=cfg, tol=tol, compare=compare
    )


@dataclass
class ScanScenario:
    n: int
    seed: int
    h_max: float


def load_scan(obj: dict) -> ScanScenario:
    where = "config"
    _check_keys(obj, ("n", "seed", "H_max"), where)
    n = _get(obj, "n", int, where, default=1000)
    if isinstance(n, bool) or n < 1:
        raise ConfigError(f"{where}.n must be an integer >= 1, got {n!r}")
    seed = _get(obj, "seed", int, where, default=0)
    h_max = _get(obj, "H_max", float, where, default=3.0)
    if h_max < 1.0:
        raise ConfigError(f"{where}.H_max must be >= 1")
    return ScanScenario(n=n, seed=seed, h_max=h_max)


@dataclass
class PotentialScenario:
    potential: str  # "v1d" | "v"
    h: float
    jbar: float
    n: int


def load_potential(obj: dict) -> PotentialScenario:
    where = "config"
    _check_keys(obj, ("potential", "H", "J", "n"), where)
    potential = _get(obj, "potential", str, where)
    if potential not in ("v1d", "v"):
        raise ConfigError(f"{where}.potential must be 'v1d' or 'v'")
    h = _get(obj, "H", float, where)
    if h < 1.0:
        raise ConfigError(f"{where}.H must be >= 1")
    jbar = _get(obj, "J", float, where, default=0.0)
    if potential == "v" and jbar == 0.0:
        raise ConfigError(f"{where}.J must be nonzero for the radial potential")
    n = _get(obj, "n", int, where, default=401)
    if isinstance(n, bool) or n < 2:
        raise ConfigError(f"{where}.n must be an integer >= 2")
    return PotentialScenario(potential=potential, h=h, jbar=jbar, n=n)
