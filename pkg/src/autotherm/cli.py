"""Command-line front end.

Subcommands: ``verify``, ``evolve``, ``qtsl-sweep``, ``bounds`` and
``oracle-compare``. Exit codes are stable for CI use: 0 on success, 1 when
a physics check fails, 2 on input errors. CSV output is deterministic:
fixed 17-significant-digit formatting and fixed iteration order regardless
of worker scheduling. ``AUTOTHERM_THREADS`` caps sweep parallelism.
"""

from __future__ import annotations

import argparse
import math
import os
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence

import numpy as np

from . import catalysis, oracles, speed_limits, thermo
from .errors import AutothermError, ScenarioParseError
from .hamiltonian import Scenario, builtin_scenario, swap_counterexample
from .quadrature import QuadratureConfig
from .scenario_io import parse_scenario_file

_BUILTIN_PATTERN = re.compile(r"^\s*(\w+)\s*\(([^)]*)\)\s*$")


def _fmt(x: float) -> str:
    if isinstance(x, float) and math.isnan(x):
        return "nan"
    return format(float(x), ".17g")


def _write_csv(path: str | None, header: Sequence[str], rows: Iterable[Sequence[float]]):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    text = "\n".join(lines) + "\n"
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_scenario(spec: str) -> Scenario:
    if os.path.exists(spec):
        return parse_scenario_file(spec)
    m = _BUILTIN_PATTERN.match(spec)
    if m:
        name = m.group(1).lower()
        args = [float(a) for a in m.group(2).split(",") if a.strip()]
        if name == "cmaybe" and len(args) == 1:
            return builtin_scenario("cmaybe", theta=args[0])
        if name in ("werner_zx", "werner_xx") and len(args) == 2:
            return builtin_scenario(name, lam=args[0], phi=args[1])
        if name == "swap_counterexample" and len(args) <= 1:
            return swap_counterexample(*args)
    raise ScenarioParseError(
        f"{spec!r} is neither a readable file nor a builtin like 'cmaybe(0.7)'")


def _parse_grid(text: str) -> np.ndarray:
    """Grid spec: ``start:stop:count`` (inclusive endpoints) or ``a,b,c``."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ScenarioParseError(f"bad grid {text!r}, expected start:stop:count")
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        if count < 1:
            raise ScenarioParseError(f"grid count must be >= 1 in {text!r}")
        return np.linspace(start, stop, count)
    values = [float(v) for v in text.split(",") if v.strip()]
    if not values:
        raise ScenarioParseError(f"empty grid {text!r}")
    return np.array(values)


def _parse_named_grids(specs: Sequence[str]) -> dict[str, np.ndarray]:
    grids: dict[str, np.ndarray] = {}
    for spec in specs:
        if "=" not in spec:
            raise ScenarioParseError(f"bad --grid {spec!r}, expected name=start:stop:count")
        name, text = spec.split("=", 1)
        grids[name.strip()] = _parse_grid(text)
    return grids


def _workers() -> int:
    env = os.environ.get("AUTOTHERM_THREADS", "")
    if env:
        return max(1, int(env))
    return min(8, os.cpu_count() or 1)


def _parallel_map(fn: Callable, items: Sequence) -> list:
    n = _workers()
    if n <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def _quad_config(args) -> QuadratureConfig | None:
    if args.quad_tol is None:
        return None
    return QuadratureConfig(abs_tol=args.quad_tol, rel_tol=args.quad_tol)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_verify(args) -> int:
    scenario = _load_scenario(args.scenario)
    report = catalysis.verify(scenario, args.tau, n_max=args.n_max)
    if args.format == "json":
        text = report.to_json()
    else:
        text = report.to_text()
    print(text)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(report.to_json() + "\n")
    return 0 if report.all_passed else 1


def cmd_evolve(args) -> int:
    scenario = _load_scenario(args.scenario)
    taus = _parse_grid(args.tau_grid)
    rows = _parallel_map(lambda t: thermo.ledger_row(thermo.ledger(scenario, float(t))), taus)
    _write_csv(args.out, thermo.LEDGER_COLUMNS, rows)
    return 0


def cmd_qtsl_sweep(args) -> int:
    quad = _quad_config(args)
    taus = _parse_grid(args.tau_grid)
    grids = _parse_named_grids(args.grid or [])
    points: list[tuple[dict, float]] = []
    if args.family:
        keys = sorted(grids)
        expected = {"cmaybe": ["theta"], "werner_zx": ["lam", "phi"],
                    "werner_xx": ["lam", "phi"]}.get(args.family)
        if expected is None:
            raise ScenarioParseError(f"unknown family {args.family!r}")
        if keys != sorted(expected):
            raise ScenarioParseError(
                f"family {args.family!r} sweeps parameters {expected}, got {keys}")
        mesh = [{}]
        for key in expected:
            mesh = [dict(m, **{key: float(v)}) for m in mesh for v in grids[key]]
        for params in mesh:
            for t in taus:
                points.append((params, float(t)))
        param_names = expected

        def scenario_for(params: dict) -> Scenario:
            return builtin_scenario(args.family, **params)
    else:
        if not args.scenario:
            raise ScenarioParseError("qtsl-sweep needs --family or --scenario")
        if grids:
            raise ScenarioParseError("named grids require --family")
        fixed = _load_scenario(args.scenario)
        param_names = []
        for t in taus:
            points.append(({}, float(t)))

        def scenario_for(params: dict) -> Scenario:
            return fixed

    cache: dict[tuple, Scenario] = {}

    def eval_point(point: tuple[dict, float]) -> list[float]:
        params, tau = point
        key = tuple(sorted(params.items()))
        scen = cache.get(key)
        if scen is None:
            scen = scenario_for(params)
            cache[key] = scen
        rep = speed_limits.qtsl_time(scen, args.p, tau, quad)
        return ([params[k] for k in param_names]
                + [tau, rep.dist_s, rep.dist_m, rep.lambda_s, rep.lambda_m,
                   rep.t_s, rep.t_m, rep.lambda_star, rep.t_star, rep.b_star,
                   rep.fannes_margin, rep.dynamical_landauer_margin,
                   rep.hypothesis_margin, rep.quadrature_error_estimate])

    # scenarios are cached per parameter point; prebuild them serially so the
    # worker pool shares read-only evolutions
    for params, _ in points:
        key = tuple(sorted(params.items()))
        if key not in cache:
            cache[key] = scenario_for(params)
    rows = _parallel_map(eval_point, points)
    header = (list(param_names)
              + ["tau", "dist_s", "dist_m", "lambda_s", "lambda_m", "t_s", "t_m",
                 "lambda_star", "t_star", "b_star", "fannes_margin",
                 "dynamical_landauer_margin", "hypothesis_margin", "quad_error"])
    _write_csv(args.out, header, rows)
    return 0


def cmd_bounds(args) -> int:
    scenario = _load_scenario(args.scenario)
    taus = _parse_grid(args.tau_grid)

    def eval_tau(t: float) -> list[float]:
        tau = float(t)
        fannes = speed_limits.fannes_audit(scenario, args.p, tau)
        exponent, bound, margin = speed_limits.hypothesis_testing_bound(
            scenario, args.p, tau)
        dyn = speed_limits.dynamical_landauer_audit(scenario, args.p, tau)
        return [tau, fannes, dyn, exponent, bound, margin]

    rows = _parallel_map(eval_tau, list(taus))
    header = ["tau", "fannes_margin", "dynamical_landauer_margin",
              "stein_exponent", "hypothesis_bound", "hypothesis_margin"]
    if args.format == "report":
        print(" ".join(header))
        for row in rows:
            print(" ".join(_fmt(v) for v in row))
        if args.out:
            _write_csv(args.out, header, rows)
    else:
        _write_csv(args.out, header, rows)
    worst = min(min(row[1], row[2], row[5]) for row in rows)
    return 0 if worst >= -args.margin_tol else 1


def cmd_oracle_compare(args) -> int:
    quad = _quad_config(args) or QuadratureConfig(abs_tol=1e-11, rel_tol=1e-11)
    taus = _parse_grid(args.tau_grid)
    grids = _parse_named_grids(args.grid or [])
    family = args.family.lower()
    rows = []
    worst = 0.0

    def compare_point(scen: Scenario, tau: float, oracle: dict) -> tuple[list, float]:
        rep = speed_limits.qtsl_time(scen, 1.0, tau, quad)
        dev = max(abs(rep.dist_s - oracle["dist_s"]),
                  abs(rep.dist_m - oracle["dist_m"]),
                  abs(rep.lambda_s - oracle["lambda_s"]),
                  abs(rep.lambda_m - oracle["lambda_m"]))
        t_dev = abs(rep.t_star - oracle["t1"]) if math.isfinite(oracle["t1"]) else 0.0
        row = [tau, rep.dist_s, oracle["dist_s"], rep.dist_m, oracle["dist_m"],
               rep.lambda_s, oracle["lambda_s"], rep.lambda_m, oracle["lambda_m"],
               rep.t_star, oracle["t1"], dev, t_dev]
        return row, max(dev, t_dev)

    if family == "cmaybe":
        thetas = grids.get("theta")
        if thetas is None:
            raise ScenarioParseError("cmaybe comparison needs --grid theta=...")
        header = ["theta", "tau", "dist_s", "dist_s_oracle", "dist_m", "dist_m_oracle",
                  "lambda_s", "lambda_s_oracle", "lambda_m", "lambda_m_oracle",
                  "t_star", "t1_oracle", "component_dev", "t_star_dev"]
        for theta in thetas:
            scen = builtin_scenario("cmaybe", theta=float(theta))
            for tau in taus:
                row, dev = compare_point(scen, float(tau),
                                         oracles.cmaybe_closed_forms(float(theta), float(tau)))
                rows.append([float(theta)] + row)
                worst = max(worst, dev)
    elif family == "werner_zx":
        phis = grids.get("phi")
        if phis is None:
            raise ScenarioParseError("werner_zx comparison needs --grid phi=...")
        header = ["phi", "tau", "dist_s", "dist_s_oracle", "dist_m", "dist_m_oracle",
                  "lambda_s", "lambda_s_oracle", "lambda_m", "lambda_m_oracle",
                  "t_star", "t1_oracle", "component_dev", "t_star_dev"]
        for phi in phis:
            scen = builtin_scenario("werner_zx", lam=1.0, phi=float(phi))
            for tau in taus:
                row, dev = compare_point(scen, float(tau),
                                         oracles.werner_zx_closed_forms(float(phi), float(tau)))
                rows.append([float(phi)] + row)
                worst = max(worst, dev)
    elif family == "werner_xx":
        phis = grids.get("phi", np.array([0.8]))
        lam = float(grids.get("lam", np.array([1.0]))[0])
        header = ["phi", "tau", "dist_s", "dist_s_oracle", "dist_m", "dist_m_oracle",
                  "lambda_s", "lambda_s_oracle", "lambda_m", "lambda_m_oracle",
                  "t_star", "t1_oracle", "component_dev", "t_star_dev"]
        for phi in phis:
            scen = builtin_scenario("werner_xx", lam=lam, phi=float(phi))
            for tau in taus:
                comp = oracles.werner_xx_components(lam, float(phi), float(tau))
                comp["t1"] = oracles.werner_xx_closed_forms(float(tau))["t1"]
                row, dev = compare_point(scen, float(tau), comp)
                rows.append([float(phi)] + row)
                worst = max(worst, dev)
    else:
        raise ScenarioParseError(f"unknown oracle family {args.family!r}")

    _write_csv(args.out, header, rows)
    print(f"max-abs-deviation {worst:.3e} over {len(rows)} points "
          f"(threshold {args.threshold:g})", file=sys.stderr)
    return 0 if worst <= args.threshold else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="autotherm",
        description="Autonomous quantum-thermodynamics simulator and verifier")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run the catalysis checks on a scenario")
    p.add_argument("--scenario", required=True,
                   help="scenario file or builtin spec like 'cmaybe(0.7)'")
    p.add_argument("--tau", type=float, default=1.0)
    p.add_argument("--n-max", type=int, default=4)
    p.add_argument("--format", choices=("report", "json"), default="report")
    p.add_argument("--out", default=None, help="also write a JSON report here")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("evolve", help="thermodynamic ledger over a tau grid")
    p.add_argument("--scenario", required=True)
    p.add_argument("--tau-grid", required=True,
                   help="start:stop:count or comma-separated values")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("qtsl-sweep", help="speed-limit report over parameter grids")
    p.add_argument("--family", choices=("cmaybe", "werner_zx", "werner_xx"), default=None)
    p.add_argument("--scenario", default=None, help="scenario for a tau-only sweep")
    p.add_argument("--grid", action="append", default=None,
                   metavar="NAME=START:STOP:COUNT")
    p.add_argument("--tau-grid", required=True)
    p.add_argument("--p", type=float, default=1.0)
    p.add_argument("--quad-tol", type=float, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_qtsl_sweep)

    p = sub.add_parser("bounds", help="inequality audits over a tau grid")
    p.add_argument("--scenario", required=True)
    p.add_argument("--tau-grid", required=True)
    p.add_argument("--p", type=float, default=1.0)
    p.add_argument("--margin-tol", type=float, default=1e-9)
    p.add_argument("--format", choices=("csv", "report"), default="csv")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("oracle-compare",
                       help="pipeline vs closed-form comparison for a builtin family")
    p.add_argument("--family", required=True)
    p.add_argument("--grid", action="append", default=None,
                   metavar="NAME=START:STOP:COUNT")
    p.add_argument("--tau-grid", required=True)
    p.add_argument("--quad-tol", type=float, default=None)
    p.add_argument("--threshold", type=float, default=1e-6)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_oracle_compare)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (AutothermError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
