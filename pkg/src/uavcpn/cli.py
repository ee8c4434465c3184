"""Command-line entry point: ``uavcpn {analyze,simulate,compare,sweep}``.

Exit codes: 0 success, 1 config/IO error, 2 comparison failure,
3 quadrature non-convergence.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .analysis import evaluate_average, evaluate_point
from .montecarlo import estimate_success
from .sweep import Axis, SweepSpec, compare, compare_tolerance, run_sweep, to_csv, to_json
from .units import CONFIG_ENV_VAR, ConfigError, load_config, load_config_file, parse_overrides, to_raw

EXIT_OK, EXIT_CONFIG, EXIT_COMPARE, EXIT_QUADRATURE = 0, 1, 2, 3


def _load(args):
    overrides = parse_overrides(args.set)
    path = args.config or os.environ.get(CONFIG_ENV_VAR)
    if path:
        return load_config_file(path, overrides)
    return load_config("", overrides)


def _emit(text: str, path: str | None):
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_analyze(args) -> int:
    cfg = _load(args)
    avg = evaluate_average(cfg)
    radii = [0.0, cfg.request_radius / 2.0, cfg.request_radius]
    points = [evaluate_point(r, cfg) for r in radii]
    converged = avg.converged and all(p.converged for p in points)
    if args.json:
        doc = {
            "average_success_probability": avg.success_prob,
            "average_lambda": avg.lambda_intensity,
            "quadrature_error_estimate": avg.quadrature_error_estimate,
            "converged": converged,
            "points": [
                {"r_u_m": p.r_u, "t1_s": p.t1, "service_radius_m": p.service_radius,
                 "lambda": p.lambda_intensity, "success_prob": p.success_prob}
                for p in points
            ],
            "config": to_raw(cfg),
        }
        text = json.dumps(doc, indent=2) + "\n"
    else:
        lines = [
            f"average_success_probability = {avg.success_prob!r}",
            f"average_lambda = {avg.lambda_intensity!r}",
            f"converged = {converged}",
            "",
            f"{'r_u_m':>10} {'t1_ms':>12} {'service_radius_m':>18} {'lambda':>14} {'success_prob':>14}",
        ]
        for p in points:
            lines.append(f"{p.r_u:10.2f} {p.t1 * 1e3:12.6f} {p.service_radius:18.3f} "
                         f"{p.lambda_intensity:14.6g} {p.success_prob:14.8f}")
        text = "\n".join(lines) + "\n"
    _emit(text, args.output)
    if not converged:
        print("warning: quadrature did not converge", file=sys.stderr)
    return EXIT_OK


def cmd_simulate(args) -> int:
    cfg = _load(args)
    est = estimate_success(cfg, args.trials, args.gus, args.seed, args.confidence, args.jobs)
    if args.json:
        text = json.dumps(est._asdict(), indent=2) + "\n"
    else:
        text = "".join(f"{k} = {v!r}\n" for k, v in est._asdict().items())
    _emit(text, args.output)
    return EXIT_OK


def _altitudes(text):
    start, stop, n = text.split(":")
    return np.linspace(float(start), float(stop), int(n))


def cmd_compare(args) -> int:
    cfg = _load(args)
    rows = compare(cfg, _altitudes(args.altitudes), args.trials, args.gus, args.seed, args.confidence, args.jobs)
    lines = [f"{'altitude_m':>10} {'theory':>12} {'mc':>12} {'ci':>10} {'delta':>10} {'tol':>8}  result"]
    for r in rows:
        lines.append(f"{r.altitude:10.2f} {r.theory:12.8f} {r.mc:12.8f} {r.ci:10.6f} {r.delta:10.6f} "
                     f"{compare_tolerance(r.ci):8.5f}  {'pass' if r.passed else 'FAIL'}")
    n_fail = sum(not r.passed for r in rows)
    lines.append(f"{len(rows) - n_fail}/{len(rows)} altitudes pass")
    _emit("\n".join(lines) + "\n", args.output)
    return EXIT_OK if n_fail == 0 else EXIT_COMPARE


def cmd_sweep(args) -> int:
    cfg = _load(args)
    try:
        spec = SweepSpec(tuple(Axis.parse(a) for a in args.axis), args.engine, args.trials, args.gus,
                         args.seed, args.confidence)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    records = run_sweep(spec, cfg, args.jobs)
    _emit(to_csv(spec, cfg, records), args.output)
    if args.json_output:
        with open(args.json_output, "w") as fh:
            fh.write(to_json(spec, cfg, records) + "\n")
    if not all(r.converged for r in records):
        print("error: quadrature did not converge at some grid points", file=sys.stderr)
        return EXIT_QUADRATURE
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help=f"config file (default: ${CONFIG_ENV_VAR}, else built-in defaults)")
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override a config key; repeatable")
    common.add_argument("--output", help="write results here instead of stdout")
    common.add_argument("--json", action="store_true", help="machine-readable output")

    mc = argparse.ArgumentParser(add_help=False)
    mc.add_argument("--trials", type=int, default=10_000)
    mc.add_argument("--gus", type=int, default=400, help="GUs per trial")
    mc.add_argument("--seed", type=int, default=0)
    mc.add_argument("--confidence", type=float, default=0.99)
    mc.add_argument("--jobs", type=int, default=1, help="worker processes")

    parser = argparse.ArgumentParser(prog="uavcpn", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"uavcpn {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="analytical task completion probability")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("simulate", parents=[common, mc], help="Monte Carlo estimate")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("compare", parents=[common, mc], help="theory vs Monte Carlo over altitude")
    p.add_argument("--altitudes", default="100:1000:19", metavar="START:STOP:N")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("sweep", parents=[common, mc], help="1- or 2-axis parameter sweep to CSV")
    p.add_argument("--axis", action="append", required=True, metavar="NAME:START:STOP:N[:log]",
                   help="altitude (m), cn_density (/km^2), cn_dist_radius (m), t_max (ms), "
                        "compute_latency (ms, model mean); repeat for a second axis")
    p.add_argument("--engine", choices=("theory", "mc", "both"), default="theory")
    p.add_argument("--json-output", help="also write a JSON mirror here")
    p.set_defaults(func=cmd_sweep, trials=1000)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
