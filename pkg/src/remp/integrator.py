"""Deterministic explicit integration with adaptive error control.

The workhorse is an embedded Dormand-Prince 5(4) pair with the standard
quartic dense-output interpolant; a fixed-step classical RK4 (with cubic
Hermite dense output) is kept for cross-checking. Auxiliary quadrature
channels are appended to the state vector and integrated by the same
stepper, so they share its error control. Zero-crossing events are located
by bisection on the dense output to |dt| <= 1e-12.

A single run is single-threaded and fully deterministic: identical inputs
produce bit-identical trajectories. Independent runs share no mutable state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ConfigError,
    IntegrationAbort,
    MissingChannelError,
    RempError,
    StepSizeUnderflowError,
)
from .kinematics import CartState, EmpState
from .systems import SystemSpec, channel_rate, gamma_of_state, make_rhs, validate_initial

_EPS = float(np.finfo(float).eps)

# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0])
_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
]
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84])
# embedded 4th-order error weights (7 stages, FSAL)
_E = np.array(
    [71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40]
)
# dense-output polynomial weights: y(t0 + u*h) = y0 + h * K^T P [u, u^2, u^3, u^4]
_P = np.array(
    [
        [1.0, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
        [0.0, 0.0, 0.0, 0.0],
        [0.0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
        [0.0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
        [0.0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
        [0.0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
        [0.0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
    ]
)

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 10.0


@dataclass(frozen=True)
class IntegratorConfig:
    """Integration control: method, tolerances, horizon, output grid."""

    t_end: float
    method: str = "rk45"
    rtol: float = 1e-10
    atol: float = 1e-12
    max_step: float | None = None
    sample_dt: float = 0.01

    def __post_init__(self):
        if self.method not in ("rk45", "rk4"):
            raise ConfigError(f"unknown method {self.method!r} (use 'rk45' or 'rk4')")
        if not (self.rtol > 0.0 and self.atol > 0.0):
            raise ConfigError("rtol and atol must be positive")
        if not (self.sample_dt > 0.0):
            raise ConfigError("sample_dt must be positive")
        if self.max_step is not None and not (self.max_step > 0.0):
            raise ConfigError("max_step must be positive when given")


@dataclass(frozen=True)
class EventSpec:
    """Request zero-crossing detection on a named state component."""

    component: str
    direction: str = "any"  # rising | falling | any

    def __post_init__(self):
        if self.direction not in ("rising", "falling", "any"):
            raise ConfigError(f"unknown event direction {self.direction!r}")


@dataclass(frozen=True)
class EventRecord:
    """A located zero crossing: time, component, actual direction."""

    t: float
    component: str
    direction: str

    def to_json(self) -> dict:
        return {"t": self.t, "component": self.component, "direction": self.direction}


class _DenseStep:
    """Polynomial interpolant over one accepted step."""

    __slots__ = ("t0", "h", "y0", "q")

    def __init__(self, t0: float, h: float, y0: np.ndarray, q: np.ndarray):
        self.t0 = t0
        self.h = h
        self.y0 = y0
        self.q = q  # (dim, 4)

    def eval(self, t: float) -> np.ndarray:
        u = (t - self.t0) / self.h
        p = np.array([u, u * u, u**3, u**4])
        return self.y0 + self.h * (self.q @ p)


class DenseSolution:
    """Piecewise-polynomial interpolant of an integration run."""

    def __init__(self, t_start: float, steps: list[_DenseStep]):
        self.t_start = t_start
        self.steps = steps
        self.t_end = steps[-1].t0 + steps[-1].h if steps else t_start
        self._rights = np.array([s.t0 + s.h for s in steps])

    def __call__(self, t: float) -> np.ndarray:
        if not self.steps:
            raise ValueError("empty dense solution")
        if not (self.t_start - 1e-12 <= t <= self.t_end + 1e-12):
            raise ValueError(f"t={t!r} outside [{self.t_start!r}, {self.t_end!r}]")
        i = int(np.searchsorted(self._rights, t, side="left"))
        i = min(i, len(self.steps) - 1)
        return self.steps[i].eval(t)


@dataclass
class Trajectory:
    """Uniformly sampled solution plus auxiliary channels and invariants."""

    spec: SystemSpec
    t: np.ndarray
    states: np.ndarray  # (n, dim)
    gamma: np.ndarray
    channels: dict[str, np.ndarray] = field(default_factory=dict)
    invariants: dict[str, np.ndarray] = field(default_factory=dict)
    events: list[EventRecord] = field(default_factory=list)
    dense: "DenseSolution | None" = None

    def component(self, name: str) -> np.ndarray:
        try:
            idx = self.spec.components.index(name)
        except ValueError:
            raise KeyError(
                f"{self.spec.system} has components {self.spec.components}, not {name!r}"
            ) from None
        return self.states[:, idx]

    def channel(self, name: str) -> np.ndarray:
        if name not in self.channels:
            raise MissingChannelError(
                f"trajectory lacks channel {name!r}; it carries {sorted(self.channels)}"
            )
        return self.channels[name]

    @property
    def n(self) -> int:
        return len(self.t)


def _rms_norm(v: np.ndarray) -> float:
    return float(np.sqrt(np.mean(v * v)))


def _initial_step(rhs, t0, y0, f0, t_end, rtol, atol, max_step):
    span = t_end - t0
    scale = atol + np.abs(y0) * rtol
    d0 = _rms_norm(y0 / scale)
    d1 = _rms_norm(f0 / scale)
    h0 = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
    h0 = min(h0, span)
    try:
        f1 = rhs(t0 + h0, y0 + h0 * f0)
        d2 = _rms_norm((f1 - f0) / scale) / h0
    except RempError:
        return min(1e-3 * span, max_step)
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100 * h0, h1, span, max_step)


def _solve_rk45(rhs, t0, y0, t_end, rtol, atol, max_step):
    """Adaptive Dormand-Prince loop.

    Returns (DenseSolution, failure) where failure is None on success or
    (t_at_failure, error) if the right-hand side rejected a state or the
    step size underflowed; the dense solution then covers [t0, t_at_last_accept].
    """
    y = np.asarray(y0, dtype=float)
    t = t0
    steps: list[_DenseStep] = []
    try:
        f = rhs(t, y)
    except RempError as err:
        return DenseSolution(t0, steps), (t0, err)
    h = _initial_step(rhs, t0, y, f, t_end, rtol, atol, max_step)
    k = np.empty((7, y.size))
    rejected = False
    while t < t_end:
        h = min(h, max_step)
        last = h >= t_end - t
        if last:
            h = t_end - t
        if not last and h < 16.0 * _EPS * max(abs(t), 1.0):
            return DenseSolution(t0, steps), (
                t,
                StepSizeUnderflowError(
                    f"step size {h:.3e} underflowed at t={t!r} (tolerances too tight "
                    "or state approaching a guard)"
                ),
            )
        k[0] = f
        try:
            for s in range(1, 6):
                ys = y + h * (k[:s].T @ _A[s])
                k[s] = rhs(t + _C[s] * h, ys)
            y_new = y + h * (k[:6].T @ _B)
            k[6] = rhs(t + h, y_new)
        except RempError as err:
            return DenseSolution(t0, steps), (t, err)
        err_vec = h * (k.T @ _E)
        scale = atol + np.maximum(np.abs(y), np.abs(y_new)) * rtol
        err_norm = _rms_norm(err_vec / scale)
        if err_norm <= 1.0:
            q = k.T @ _P
            steps.append(_DenseStep(t, h, y.copy(), q))
            t = t_end if last else t + h
            y = y_new
            f = k[6].copy()  # FSAL; copy so a later rejected attempt cannot alias it
            factor = _MAX_FACTOR if err_norm == 0.0 else _SAFETY * err_norm**-0.2
            if rejected:
                factor = min(1.0, factor)
            h *= min(_MAX_FACTOR, max(_MIN_FACTOR, factor))
            rejected = False
        else:
            h *= max(_MIN_FACTOR, _SAFETY * err_norm**-0.2)
            rejected = True
    return DenseSolution(t0, steps), None


def _solve_rk4(rhs, t0, y0, t_end, h_step):
    """Classical fixed-step RK4 with cubic Hermite dense output."""
    y = np.asarray(y0, dtype=float)
    t = t0
    steps: list[_DenseStep] = []
    n_steps = max(1, math.ceil((t_end - t0) / h_step - 1e-12))
    h_step = (t_end - t0) / n_steps
    try:
        f = rhs(t, y)
    except RempError as err:
        return DenseSolution(t0, steps), (t0, err)
    for i in range(n_steps):
        h = h_step
        try:
            k1 = f
            k2 = rhs(t + h / 2, y + (h / 2) * k1)
            k3 = rhs(t + h / 2, y + (h / 2) * k2)
            k4 = rhs(t + h, y + h * k3)
            y_new = y + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
            f_new = rhs(t + h, y_new)
        except RempError as err:
            return DenseSolution(t0, steps), (t, err)
        delta = (y_new - y) / h
        q = np.empty((y.size, 4))
        q[:, 0] = k1
        q[:, 1] = 3 * delta - 2 * k1 - f_new
        q[:, 2] = k1 + f_new - 2 * delta
        q[:, 3] = 0.0
        steps.append(_DenseStep(t, h, y.copy(), q))
        t = t + h
        y = y_new
        f = f_new
    return DenseSolution(t0, steps), None


def _bisect_root(g, a: float, b: float, va: float) -> float:
    tol = max(1e-13, 4.0 * _EPS * max(abs(a), abs(b)))
    for _ in range(200):
        if (b - a) <= tol:
            break
        m = 0.5 * (a + b)
        vm = g(m)
        if vm == 0.0:
            return m
        if (vm > 0.0) == (va > 0.0):
            a = m
        else:
            b = m
    return 0.5 * (a + b)


def find_events(
    dense: DenseSolution, comp_idx: int, component: str, direction: str = "any", nsub: int = 8
) -> list[EventRecord]:
    """Locate zero crossings of one state component on the dense output.

    All sign changes are found by subdividing each accepted step and
    bisecting each bracketing subinterval to |dt| <= 1e-12. An exact zero at
    the very start of the run counts as a crossing (classified by the sign
    the component takes next).
    """

    def g(t: float) -> float:
        return float(dense(t)[comp_idx])

    records: list[EventRecord] = []

    def emit(t: float, dirn: str):
        if records and abs(t - records[-1].t) <= 1e-9:
            return
        records.append(EventRecord(t, component, dirn))

    v_prev = g(dense.t_start)
    if v_prev == 0.0:
        # classify the boundary zero by the first nonzero value after it
        for step in dense.steps:
            probes = np.linspace(step.t0, step.t0 + step.h, nsub + 1)[1:]
            vals = [g(tp) for tp in probes]
            nz = next((v for v in vals if v != 0.0), None)
            if nz is not None:
                emit(dense.t_start, "falling" if nz < 0.0 else "rising")
                break
    for step in dense.steps:
        ts = np.linspace(step.t0, step.t0 + step.h, nsub + 1)
        ta, va = ts[0], v_prev
        for tb in ts[1:]:
            vb = g(tb)
            if va != 0.0 and vb != 0.0 and (va > 0.0) != (vb > 0.0):
                tr = _bisect_root(g, ta, tb, va)
                emit(tr, "falling" if va > 0.0 else "rising")
            elif va != 0.0 and vb == 0.0:
                emit(tb, "falling" if va > 0.0 else "rising")
            ta, va = tb, vb
        v_prev = va
    if direction == "any":
        return records
    return [r for r in records if r.direction == direction]


def _as_vector(spec: SystemSpec, init) -> tuple[float, np.ndarray]:
    if isinstance(init, EmpState):
        return init.t, np.array([init.x, init.vx, init.rho, init.rhodot])
    if isinstance(init, CartState):
        return init.t, np.array([init.x, init.y, init.vx, init.vy])
    vec = np.asarray(init, dtype=float)
    return 0.0, vec


def _sample_grid(t0: float, t_end: float, dt: float) -> np.ndarray:
    n = int(math.floor((t_end - t0) / dt + 1e-9))
    ts = t0 + dt * np.arange(n + 1)
    if ts[-1] < t_end - 1e-9 * dt:
        ts = np.append(ts, t_end)
    else:
        ts[-1] = min(ts[-1], t_end)
    return ts


def integrate(
    spec: SystemSpec,
    init,
    cfg: IntegratorConfig,
    channels: tuple[str, ...] = (),
    events: tuple[EventSpec, ...] = (),
    t0: float | None = None,
    keep_dense: bool = False,
) -> Trajectory:
    """Integrate a system and sample it on a uniform grid via dense output.

    ``init`` is a state dataclass (CartState/EmpState) or a plain component
    sequence (then ``t0`` gives the start time, default 0). Requested
    auxiliary ``channels`` are integrated as extra state components.

    Raises :class:`~remp.errors.IntegrationAbort` carrying the partial
    trajectory if the right-hand side rejects a state mid-run or the step
    size underflows.
    """
    t_init, y_state = _as_vector(spec, init)
    if t0 is not None:
        t_init = float(t0)
    validate_initial(spec, y_state)
    if not (cfg.t_end > t_init):
        raise ConfigError(f"t_end={cfg.t_end!r} must exceed start time {t_init!r}")

    dim = spec.dim
    rates = [channel_rate(name, spec) for name in channels]
    y0 = np.concatenate([y_state, np.zeros(len(rates))])
    base_rhs = make_rhs(spec)

    if rates:

        def rhs(t, z):
            ys = z[:dim]
            dy = base_rhs(t, ys)
            extra = [rate(t, ys) for rate in rates]
            return np.concatenate([dy, extra])

    else:

        def rhs(t, z):
            return base_rhs(t, z)

    max_step = math.inf if cfg.max_step is None else cfg.max_step
    if cfg.method == "rk45":
        dense, failure = _solve_rk45(
            rhs, t_init, y0, cfg.t_end, cfg.rtol, cfg.atol, max_step
        )
    else:
        h = cfg.max_step if cfg.max_step is not None else cfg.sample_dt
        dense, failure = _solve_rk4(rhs, t_init, y0, cfg.t_end, h)

    t_last = dense.t_end if dense.steps else t_init

    def build(up_to: float) -> Trajectory:
        ts = _sample_grid(t_init, up_to, cfg.sample_dt)
        if dense.steps:
            rows = np.array([dense(tv) for tv in ts])
        else:
            ts = np.array([t_init])
            rows = y0[None, :]
        states = rows[:, :dim]
        chans = {
            name: rows[:, dim + i] for i, name in enumerate(channels)
        }
        gam = np.array([gamma_of_state(spec, row) for row in states])
        recs: list[EventRecord] = []
        if dense.steps:
            for ev in events:
                if ev.component not in spec.components:
                    raise ConfigError(
                        f"event component {ev.component!r} not in {spec.components}"
                    )
                idx = spec.components.index(ev.component)
                recs.extend(find_events(dense, idx, ev.component, ev.direction))
        recs.sort(key=lambda r: r.t)
        return Trajectory(
            spec=spec,
            t=ts,
            states=states,
            gamma=gam,
            channels=chans,
            events=recs,
            dense=dense if keep_dense else None,
        )

    if failure is not None:
        t_fail, cause = failure
        partial = build(t_last) if t_last > t_init else build(t_init)
        raise IntegrationAbort(cause, t_fail, partial)
    return build(cfg.t_end)
