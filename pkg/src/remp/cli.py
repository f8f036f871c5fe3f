"""Scenario runner: every module behind one executable.

Subcommands: simulate, plot-data, scan, superpose, rescale-check,
analyze-potential. Series go to CSV (17 significant digits, so doubles
round-trip exactly); summaries, drift reports and events go to a JSON
sidecar next to the CSV. Exit codes separate crash from falsified physics:

    0  success
    2  configuration rejected (nothing was computed)
    3  runtime guard tripped (superluminal state, axis singularity, ...)
    4  verification ran but the checked bound failed

All outputs are deterministic for a fixed config and seed.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import scenario
from .conservative import (
    analyze_v1d,
    analyze_v_rel_emp,
    periodicity_bound,
    periodicity_scan,
    return_points_1d,
    v1d,
)
from .errors import (
    ConfigError,
    InconsistentInitialDataError,
    IntegrationAbort,
    RempError,
)
from .integrator import integrate
from .invariants import attach, drift
from .rescale import integrate_tau, verify_rrr_equivalence
from .superposition import verify_superposition

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3
EXIT_VERIFY = 4

FIGURE_IDS = ("fig1", "fig2", "fig3", "fig4")


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _write_json(path: Path, obj) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")


def _sidecar(out: Path, config=None) -> Path:
    side = out.with_suffix(".json")
    if config is not None and side.resolve() == Path(config).resolve():
        raise ConfigError(
            f"summary sidecar {side} would overwrite the config file; "
            "choose a different --out"
        )
    return side


# --- simulate -----------------------------------------------------------------


def cmd_simulate(args) -> int:
    sc = scenario.load_simulate(scenario.load_json(args.config))
    out = Path(args.out)
    side = _sidecar(out, args.config)
    failure = None
    try:
        traj = integrate(
            sc.spec,
            sc.init,
            sc.integrator,
            channels=sc.outputs.channels,
            events=sc.outputs.events,
            t0=sc.t0,
        )
    except IntegrationAbort as abort:
        traj = abort.partial
        failure = {
            "t": abort.t,
            "type": type(abort.cause).__name__,
            "message": str(abort.cause),
        }
        print(f"integration aborted: {abort}", file=sys.stderr)

    drift_reports = []
    if traj.n >= 2:
        attach(traj, sc.outputs.invariants)
        drift_reports = [drift(traj, name) for name in sc.outputs.invariants]

    header = ["t", *sc.spec.components, "gamma"]
    columns = [traj.t, *traj.states.T, traj.gamma]
    for name in sc.outputs.channels:
        header.append(name)
        columns.append(traj.channels[name])
    for name in sc.outputs.invariants:
        if name in traj.invariants:
            header.append(name)
            columns.append(traj.invariants[name])
    _write_csv(out, header, zip(*columns))
    _write_json(
        side,
        {
            "command": "simulate",
            "system": sc.spec.system,
            "t_start": float(traj.t[0]),
            "t_end": float(traj.t[-1]),
            "n_samples": traj.n,
            "drift": [r.to_json() for r in drift_reports],
            "events": [e.to_json() for e in traj.events],
            "failure": failure,
        },
    )
    if failure is not None:
        return EXIT_RUNTIME
    print(f"simulate: {traj.n} samples -> {out}")
    return EXIT_OK


# --- plot-data -----------------------------------------------------------------

_FIG_DEFAULTS = {
    "fig1": {
        "x_range": [-3.0, 3.0],
        "v_range": [-0.999, 0.999],
        "nx": 121,
        "nv": 81,
        "levels": [],
        "n_level": 101,
    },
    "fig2": {"H_list": [1.1, 1.5, 2.0, 3.0], "n": 201},
    "fig3": {"H": 2.0, "J": 0.5, "n": 401},
    "fig4": {"H_max": 3.0, "n": 201},
}


def _figure_params(figure: str, config_path) -> dict:
    params = dict(_FIG_DEFAULTS[figure])
    if config_path is not None:
        obj = scenario.load_json(config_path)
        unknown = sorted(set(obj) - set(params))
        if unknown:
            raise ConfigError(
                f"{figure} config: unknown key(s) {unknown}; allowed {sorted(params)}"
            )
        params.update(obj)
    return params


def _fig1_level_rows(h: float, n_level: int):
    """Exact level curve of the 1D energy: v^2 = 1 - 1/(H - x^2/2)^2."""
    lo, hi = return_points_1d(h)
    if hi == 0.0:
        return [(h, 0.0, 0.0, 0.0)]
    rows = []
    for x in np.linspace(lo, hi, n_level):
        v_sq = 1.0 - 1.0 / (h - 0.5 * x * x) ** 2
        v = math.sqrt(max(v_sq, 0.0))
        rows.append((h, x, v, -v))
    return rows


def cmd_plotdata(args) -> int:
    figure = args.figure
    params = _figure_params(figure, args.config)
    out = Path(args.out)

    if figure == "fig1":
        xs = np.linspace(params["x_range"][0], params["x_range"][1], int(params["nx"]))
        vs = np.linspace(params["v_range"][0], params["v_range"][1], int(params["nv"]))
        rows = []
        for x in xs:
            for v in vs:
                rows.append((x, v, 1.0 / math.sqrt(1.0 - v * v) + 0.5 * x * x))
        _write_csv(out, ["x", "v", "H"], rows)
        levels = params["levels"]
        if levels:
            lrows = []
            for h in levels:
                if h < 1.0:
                    raise ConfigError(f"fig1 level H={h} must be >= 1")
                lrows.extend(_fig1_level_rows(float(h), int(params["n_level"])))
            lpath = out.with_name(out.stem + "_levels.csv")
            _write_csv(lpath, ["level_H", "x", "v_plus", "v_minus"], lrows)
            print(f"plot-data fig1: grid -> {out}, levels -> {lpath}")
        else:
            print(f"plot-data fig1: grid -> {out}")
        return EXIT_OK

    if figure == "fig2":
        rows = []
        for h in params["H_list"]:
            h = float(h)
            if h < 1.0:
                raise ConfigError(f"fig2 H={h} must be >= 1")
            sup = math.sqrt(2.0 * h)
            for x in np.linspace(-0.95 * sup, 0.95 * sup, int(params["n"])):
                rows.append((h, x, v1d(x, h)))
        _write_csv(out, ["H", "x", "V1D"], rows)
        print(f"plot-data fig2 -> {out}")
        return EXIT_OK

    if figure == "fig3":
        profile = analyze_v_rel_emp(float(params["H"]), float(params["J"]), int(params["n"]))
        _write_csv(out, ["rho", "V"], zip(profile.coords, profile.values))
        print(f"plot-data fig3 -> {out}")
        return EXIT_OK

    # fig4
    h_max = float(params["H_max"])
    if h_max < 1.0:
        raise ConfigError(f"fig4 H_max={h_max} must be >= 1")
    hs = np.linspace(1.0, h_max, int(params["n"]))
    _write_csv(out, ["H", "F"], ((h, periodicity_bound(h)) for h in hs))
    print(f"plot-data fig4 -> {out}")
    return EXIT_OK


# --- scan ----------------------------------------------------------------------


def cmd_scan(args) -> int:
    obj = scenario.load_json(args.config) if args.config else {}
    if args.n is not None:
        obj["n"] = args.n
    if args.seed is not None:
        obj["seed"] = args.seed
    sc = scenario.load_scan(obj)
    out = Path(args.out)
    side = _sidecar(out, args.config)
    result = periodicity_scan(sc.n, sc.seed, sc.h_max)
    _write_csv(
        out,
        ["rho", "v", "u", "J", "H", "F_of_H", "satisfied"],
        (
            (s.rho, s.v, s.u, s.jbar, s.h, s.bound, 1.0 if s.satisfied else 0.0)
            for s in result.samples
        ),
    )
    summary = {"command": "scan", **result.to_json()}
    _write_json(side, summary)
    print(f"scan: fraction satisfied = {result.fraction} -> {out}")
    return EXIT_OK


# --- superpose -------------------------------------------------------------------


def cmd_superpose(args) -> int:
    sc = scenario.load_superpose(scenario.load_json(args.config))
    tol = args.tol if args.tol is not None else sc.tol
    out = Path(args.out)
    side = _sidecar(out, args.config)
    try:
        result = verify_superposition(
            sc.spec, sc.init, sc.delta, sc.integrator
        )
    except InconsistentInitialDataError as e:
        # contradictory config, detected before any integration
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    dev = np.abs(result.x_reconstructed - result.x_reference)
    _write_csv(
        out,
        ["t", "x_ref", "x_reconstructed", "deviation"],
        zip(result.t, result.x_reference, result.x_reconstructed, dev),
    )
    passed = result.max_deviation < tol
    _write_json(
        side,
        {
            "command": "superpose",
            **result.to_json(),
            "tol": tol,
            "passed": bool(passed),
        },
    )
    print(f"superpose: max deviation = {result.max_deviation:.3e} (tol {tol:.3e}) -> {out}")
    return EXIT_OK if passed else EXIT_VERIFY


# --- rescale-check -----------------------------------------------------------------


def cmd_rescale_check(args) -> int:
    sc = scenario.load_rescale(scenario.load_json(args.config))
    tol = args.tol if args.tol is not None else sc.tol
    out = Path(args.out)
    side = _sidecar(out, args.config)
    pair = integrate_tau(sc.omega_sq, sc.f, sc.g, sc.init, sc.integrator, sc.c)
    report = verify_rrr_equivalence(pair, sc.omega_sq, sc.f, sc.g, sc.c, sc.compare)
    _write_csv(
        out,
        ["t", "residual_x", "residual_y"],
        zip(report.t_interior, report.residual_x, report.residual_y),
    )
    passed = report.max_residual < tol
    _write_json(
        side,
        {"command": "rescale-check", **report.to_json(), "tol": tol, "passed": bool(passed)},
    )
    print(
        f"rescale-check: max residual = {report.max_residual:.3e} "
        f"(tol {tol:.3e}), invariant match = {report.invariant_max_diff:.3e} -> {out}"
    )
    return EXIT_OK if passed else EXIT_VERIFY


# --- analyze-potential ---------------------------------------------------------------


def cmd_analyze_potential(args) -> int:
    sc = scenario.load_potential(scenario.load_json(args.config))
    out = Path(args.out)
    side = _sidecar(out, args.config)
    if sc.potential == "v1d":
        profile = analyze_v1d(sc.h, sc.n)
    else:
        profile = analyze_v_rel_emp(sc.h, sc.jbar, sc.n)
    _write_csv(out, ["coord", "V"], zip(profile.coords, profile.values))
    _write_json(
        side,
        {
            "command": "analyze-potential",
            "kind": profile.kind,
            "H": profile.h,
            "J": profile.jbar,
            "return_points": list(profile.return_points),
            "equilibrium": profile.equilibrium,
            "v_at_equilibrium": profile.v_at_equilibrium,
        },
    )
    print(f"analyze-potential: return points {profile.return_points} -> {out}")
    return EXIT_OK


# --- entry point ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="remp",
        description="Relativistic radial-oscillator systems: integrate, verify, analyze.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="integrate a system from a JSON scenario")
    p.add_argument("--config", required=True, help="scenario JSON path")
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("plot-data", help="emit figure-reproduction data")
    p.add_argument("figure", choices=FIGURE_IDS)
    p.add_argument("--config", default=None, help="optional parameter overrides (JSON)")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_plotdata)

    p = sub.add_parser("scan", help="periodicity-criterion scan over random states")
    p.add_argument("--config", default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(fn=cmd_scan)

    p = sub.add_parser("superpose", help="verify the nonlinear superposition law")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--tol", type=float, default=None)
    p.set_defaults(fn=cmd_superpose)

    p = sub.add_parser("rescale-check", help="verify the time-rescaling equivalence")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--tol", type=float, default=None)
    p.set_defaults(fn=cmd_rescale_check)

    p = sub.add_parser("analyze-potential", help="emit a pseudo-potential profile")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_analyze_potential)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except IntegrationAbort as e:
        print(f"runtime error: {e}", file=sys.stderr)
        return EXIT_RUNTIME
    except RempError as e:
        print(f"runtime error: {e}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
