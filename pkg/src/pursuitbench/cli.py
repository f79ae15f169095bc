"""Command-line interface for the benchmark harness."""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .controllers import (
    FIXED_LOOKAHEAD,
    ControllerKind,
    DynamicWindow,
    distance_point_to_line,
    optimal_velocity_in_window,
)
from .errors import ConfigError, PursuitBenchError
from .harness import load_config, load_sweep_config, run_comparison, run_lookahead_sweep, emit_report
from .metrics import scenario_metrics
from .paths import ReferencePath, generate_corner_path
from .simulator import run_scenario


def _cmd_compare(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    results = run_comparison(config, args.out)
    print(emit_report(results, config, args.out))
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    sweep = load_sweep_config(args.config)
    rows = run_lookahead_sweep(sweep, args.out)
    print(f"{'lookahead':>10} {'mean_cte':>10} {'travel_time':>12}")
    for lookahead, mean_cte, travel_time in rows:
        print(f"{lookahead:>10.3f} {mean_cte:>10.4f} {travel_time:>12.2f}")
    return 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    named = dict(config.paths)
    if args.path in named:
        reference = generate_corner_path(named[args.path])
        label = args.path
    elif Path(args.path).exists():
        reference = ReferencePath.from_csv(args.path)
        label = Path(args.path).stem
    else:
        raise ConfigError(
            f"--path '{args.path}' is neither a configured path name {sorted(named)} nor a CSV file"
        )
    lookahead = config.lookahead
    if args.lookahead is not None:
        lookahead = replace(lookahead, mode=FIXED_LOOKAHEAD, fixed_distance=args.lookahead)
    kind = ControllerKind.from_name(args.controller)
    result = run_scenario(
        reference,
        kind,
        config.limits,
        lookahead,
        config.regulation,
        max_time=config.max_time,
        goal_tolerance=config.goal_tolerance,
    )
    out = Path(args.out) if args.out else Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    trajectory_file = out / f"traj_{label}_{kind.value}.csv"
    result.log.to_csv(trajectory_file)
    metrics = scenario_metrics(result, reference)
    print(
        f"{kind.value} on {label}: reached={metrics.reached_goal}"
        f" violations={metrics.violation_ratio:.1f}%"
        f" mean_cte={metrics.mean_cte:.4f} m max_cte={metrics.max_cte:.4f} m"
        f" travel_time={metrics.travel_time:.2f} s"
    )
    print(f"trajectory written to {trajectory_file}")
    return 0


def _cmd_check_optimal(args: argparse.Namespace) -> int:
    window = DynamicWindow(args.v_lo, args.v_hi, args.w_lo, args.w_hi)
    command = optimal_velocity_in_window(window, args.kappa)
    analytic_distance = distance_point_to_line(command.v, command.omega, args.kappa)

    n = args.grid
    vs = np.linspace(window.v_lo, window.v_hi, n)
    ws = np.linspace(window.omega_lo, window.omega_hi, n)
    distances = np.abs(args.kappa * vs[:, None] - ws[None, :]) / math.sqrt(args.kappa**2 + 1.0)
    grid_min = float(distances.min())
    near_best = distances <= grid_min + 1e-12
    best_v_index = int(np.where(near_best.any(axis=1))[0].max())
    best_w_candidates = np.where(near_best[best_v_index])[0]
    best_w_index = int(best_w_candidates[np.argmax(np.abs(ws[best_w_candidates]))])

    print(
        f"window: v [{window.v_lo:g}, {window.v_hi:g}],"
        f" omega [{window.omega_lo:g}, {window.omega_hi:g}], kappa {args.kappa:g}"
    )
    print(f"analytic : v={command.v:.6f} omega={command.omega:.6f} distance={analytic_distance:.9f}")
    print(
        f"grid {n}x{n}: v={vs[best_v_index]:.6f} omega={ws[best_w_index]:.6f}"
        f" distance={grid_min:.9f}"
    )
    agrees = analytic_distance <= grid_min + 1e-9
    print(f"analytic distance <= grid minimum + 1e-9: {'yes' if agrees else 'NO'}")
    return 0 if agrees else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pursuitbench",
        description="Benchmark pure pursuit tracking controllers on corner paths.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    compare = sub.add_parser("compare", help="run the full controller-by-path comparison grid")
    compare.add_argument("--config", default="experiment_table1", help="config file or profile name")
    compare.add_argument("--out", default=None, help="output directory (default: config output_dir)")
    compare.set_defaults(func=_cmd_compare)

    sweep = sub.add_parser("sweep", help="lookahead trade-off sweep (dynamic-window controller)")
    sweep.add_argument("--config", default="simulation_table6", help="config file or profile name")
    sweep.add_argument("--out", default=None, help="output directory (default: config output_dir)")
    sweep.set_defaults(func=_cmd_sweep)

    simulate = sub.add_parser("simulate", help="run a single scenario and write its trajectory")
    simulate.add_argument("--controller", required=True, choices=[k.value for k in ControllerKind])
    simulate.add_argument("--path", required=True, help="configured path name or waypoint CSV file")
    simulate.add_argument("--lookahead", type=float, default=None, help="force a fixed lookahead [m]")
    simulate.add_argument("--config", default="experiment_table1", help="config file or profile name")
    simulate.add_argument("--out", default=None, help="output directory (default: config output_dir)")
    simulate.set_defaults(func=_cmd_simulate)

    check = sub.add_parser(
        "check-optimal",
        help="query the closed-form window selection and compare it against a grid search",
    )
    check.add_argument("--v-lo", type=float, required=True)
    check.add_argument("--v-hi", type=float, required=True)
    check.add_argument("--w-lo", type=float, required=True)
    check.add_argument("--w-hi", type=float, required=True)
    check.add_argument("--kappa", type=float, required=True)
    check.add_argument("--grid", type=int, default=201, help="grid resolution per axis")
    check.set_defaults(func=_cmd_check_optimal)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except PursuitBenchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
