"""Command-line interface.

Subcommands:
  extract       select waypoints for one trajectory file
  relabel       batch-extract a directory and write next-waypoint datasets
  stats         extraction statistics (counts, ratios, losses, wall time)
  compare       budgeted selector vs calibrated heuristics at matched counts
  replay-check  kinematic follow-the-waypoints check against a trajectory
  sweep         extractions across several budgets plus plot data
  oracle        brute-force cross-check of the solver (short files only)

Exit codes: 0 success, 1 failed check, 2 usage, 3 missing file or I/O
failure, 4 parse error, 5 schema error, 6 validation error, 7 domain error
(bad budget, malformed waypoint set, oversized oracle input, ...).
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from datetime import datetime, timezone
from pathlib import Path

from .baselines import METHOD_FIXED_INTERVAL, METHOD_ZERO_VELOCITY, calibrate_to_count
from .defaults import resolve_task_eta
from .relabel import relabel_trajectory
from .replay import default_follower_config, replay_waypoints
from .solver import (
    BRUTE_FORCE_LIMIT,
    ErrorBudget,
    annotate_losses,
    extract_waypoints_bruteforce,
    extract_waypoints_dp,
    sweep_eta,
)
from .state_space import MetricConfig
from .trajfile import (
    TrajectoryFileError,
    TrajectoryParseError,
    TrajectorySchemaError,
    TrajectoryValidationError,
    emit_plot_data,
    load_metric_config,
    load_trajectory,
    load_waypoints,
    save_relabeled,
    save_waypoints,
)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_PARSE = 4
EXIT_SCHEMA = 5
EXIT_VALIDATION = 6
EXIT_DOMAIN = 7

RATIO_LOW = 1.0 / 15.0
RATIO_HIGH = 1.0 / 5.0


def _timestamp() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _resolve_eta(args, parser: argparse.ArgumentParser) -> float:
    if args.eta is not None and args.task is not None:
        parser.error("--eta and --task are mutually exclusive")
    if args.eta is None and args.task is None:
        parser.error("one of --eta or --task is required")
    return float(args.eta) if args.eta is not None else resolve_task_eta(args.task)


def _metric(args) -> MetricConfig:
    if getattr(args, "metric_config", None):
        return load_metric_config(args.metric_config)
    return MetricConfig()


def _input_files(path_str: str) -> list[Path]:
    path = Path(path_str)
    if path.is_dir():
        files = sorted(p for p in path.iterdir() if p.suffix == ".json" and p.is_file())
        if not files:
            raise FileNotFoundError(f"{path}: no .json trajectory files")
        return files
    if not path.exists():
        raise FileNotFoundError(str(path))
    return [path]


def _ratio_str(count: int, length: int) -> str:
    return f"1:{length / count:.1f}"


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _cmd_extract(args, parser) -> int:
    eta = _resolve_eta(args, parser)
    metric = _metric(args)
    traj = load_trajectory(args.input)
    wp, stats = extract_waypoints_dp(traj, ErrorBudget(eta, metric))
    provenance = {"source_name": traj.name, "metric": metric}
    if not args.no_timestamp:
        provenance["created_at"] = _timestamp()
    save_waypoints(args.output, wp, provenance)
    print(
        f"{traj.name}: T={len(traj)} waypoints={len(wp)} ratio={_ratio_str(len(wp), len(traj))} "
        f"eta={eta!r} segment_loss={wp.achieved_segment_loss:.6g} "
        f"global_loss={wp.achieved_global_loss:.6g} wall_time={stats.wall_time:.3f}"
    )
    return EXIT_OK


def _cmd_relabel(args, parser) -> int:
    eta = float(args.eta)
    metric = _metric(args)
    budget = ErrorBudget(eta, metric)
    files = _input_files(args.input)
    out_dir = Path(args.output)
    out_dir.mkdir(parents=True, exist_ok=True)
    created_at = None if args.no_timestamp else _timestamp()
    failures = []
    rows = 0
    for f in files:
        try:
            traj = load_trajectory(f)
            wp, _ = extract_waypoints_dp(traj, budget)
            ds = relabel_trajectory(traj, wp)
        except (TrajectoryFileError, ValueError) as exc:
            failures.append((f.name, str(exc)))
            continue
        out = out_dir / (f.stem + ".relabeled.jsonl")
        save_relabeled(out, ds, metric=metric, created_at=created_at)
        rows += len(ds)
        print(f"{f.name}: {len(ds)} rows, {len(wp)} waypoints -> {out}")
    print(f"relabeled {len(files) - len(failures)}/{len(files)} trajectories, {rows} rows total")
    for name, err in failures:
        print(f"FAILED {name}: {err}", file=sys.stderr)
    return EXIT_DOMAIN if failures else EXIT_OK


def _cmd_stats(args, parser) -> int:
    eta = _resolve_eta(args, parser)
    metric = _metric(args)
    budget = ErrorBudget(eta, metric)
    warned = False
    for f in _input_files(args.input):
        traj = load_trajectory(f)
        wp, stats = extract_waypoints_dp(traj, budget)
        ratio = len(wp) / len(traj)
        losses = " ".join(
            f"{l:.6g}"
            for l in _segment_losses(traj, wp, metric)
        )
        print(
            f"{traj.name}: T={len(traj)} waypoints={len(wp)} ratio={_ratio_str(len(wp), len(traj))} "
            f"segment_loss={wp.achieved_segment_loss:.6g} global_loss={wp.achieved_global_loss:.6g} "
            f"evaluations={stats.segment_loss_evaluations} wall_time={stats.wall_time:.3f}"
        )
        print(f"{traj.name}: per-segment losses: {losses}")
        if not (args.ratio_low <= ratio <= args.ratio_high):
            warned = True
            print(
                f"WARNING {traj.name}: ratio {_ratio_str(len(wp), len(traj))} outside "
                f"[1:{1 / args.ratio_low:.0f}, 1:{1 / args.ratio_high:.0f}]; consider adjusting eta",
                file=sys.stderr,
            )
    return EXIT_OK if not warned or not args.strict_ratio else EXIT_CHECK_FAILED


def _segment_losses(traj, wp, metric) -> list[float]:
    from .reconstruction import SegmentScorer

    scorer = SegmentScorer(traj, metric)
    return [scorer.loss(a, b) for a, b in zip(wp.indices, wp.indices[1:])]


def _cmd_compare(args, parser) -> int:
    eta = _resolve_eta(args, parser)
    metric = _metric(args)
    budget = ErrorBudget(eta, metric)
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    known = {"awe", METHOD_ZERO_VELOCITY, METHOD_FIXED_INTERVAL}
    unknown = [m for m in methods if m not in known]
    if unknown:
        parser.error(f"unknown methods {unknown}; choose from {sorted(known)}")
    header = f"{'trajectory':<24} {'method':<10} {'count':>5} {'segment':>12} {'global':>12} {'replay_dev':>12}"
    print(header)
    wins = {m: {"global": 0, "replay": 0, "n": 0} for m in methods if m != "awe"}
    for f in _input_files(args.input):
        traj = load_trajectory(f)
        awe_wp, _ = extract_waypoints_dp(traj, budget)
        follower = default_follower_config(
            traj, eta, control_multiplier=args.control_multiplier, metric=metric
        )
        awe_replay = replay_waypoints(traj, awe_wp, follower)
        results = {}
        for method in methods:
            if method == "awe":
                wp = awe_wp
                replay = awe_replay
            else:
                wp = annotate_losses(traj, calibrate_to_count(traj, method, len(awe_wp)).waypoints, metric)
                replay = replay_waypoints(traj, wp, follower)
            results[method] = (wp, replay)
            print(
                f"{traj.name:<24} {method:<10} {len(wp):>5} {wp.achieved_segment_loss:>12.6f} "
                f"{wp.achieved_global_loss:>12.6f} {replay.max_tracking_deviation:>12.6f}"
            )
        for method, (wp, replay) in results.items():
            if method == "awe":
                continue
            wins[method]["n"] += 1
            if awe_wp.achieved_global_loss <= wp.achieved_global_loss:
                wins[method]["global"] += 1
            if awe_replay.max_tracking_deviation <= replay.max_tracking_deviation:
                wins[method]["replay"] += 1
    for method, tally in wins.items():
        if tally["n"]:
            print(
                f"awe <= {method}: global loss {tally['global']}/{tally['n']}, "
                f"replay deviation {tally['replay']}/{tally['n']}"
            )
    return EXIT_OK


def _cmd_replay_check(args, parser) -> int:
    traj = load_trajectory(args.input)
    wp, _ = load_waypoints(args.waypoints)
    wp.validate_for(traj)
    follower = default_follower_config(
        traj,
        wp.eta_used,
        control_multiplier=args.control_multiplier,
        blocking=args.blocking,
    )
    overrides = {}
    if args.max_step is not None:
        overrides["max_step"] = args.max_step
    if args.reach_tolerance is not None:
        overrides["reach_tolerance"] = args.reach_tolerance
    if overrides:
        follower = dataclasses.replace(follower, **overrides)
    report = replay_waypoints(traj, wp, follower)
    reached = sum(report.per_waypoint_reached)
    print(
        f"{traj.name}: waypoints_reached={reached}/{len(report.per_waypoint_reached)} "
        f"reached_final={report.reached_final} ticks={report.ticks_used} "
        f"max_tracking_deviation={report.max_tracking_deviation:.6g}"
    )
    return EXIT_OK if report.reached_final else EXIT_CHECK_FAILED


def _cmd_sweep(args, parser) -> int:
    try:
        etas = [float(x) for x in args.etas.split(",") if x.strip()]
    except ValueError:
        parser.error(f"--etas must be a comma-separated list of numbers, got {args.etas!r}")
    traj = load_trajectory(args.input)
    metric = _metric(args)
    results = sweep_eta(traj, etas, metric)
    for eta, wp in results:
        print(f"eta={eta!r}: waypoints={len(wp)} ratio={_ratio_str(len(wp), len(traj))}")
    if args.plot_out:
        emit_plot_data(traj, results, args.plot_out)
        print(f"plot data -> {args.plot_out}")
    return EXIT_OK


def _cmd_oracle(args, parser) -> int:
    traj = load_trajectory(args.input)
    if len(traj) > BRUTE_FORCE_LIMIT:
        raise ValueError(
            f"oracle requires T <= {BRUTE_FORCE_LIMIT}, got {len(traj)}; "
            "the brute-force enumeration would blow up"
        )
    metric = _metric(args)
    budget = ErrorBudget(float(args.eta), metric)
    wp, _ = extract_waypoints_dp(traj, budget)
    brute = extract_waypoints_bruteforce(traj, budget)
    verdict = "MATCH" if len(wp) == len(brute) else "MISMATCH"
    print(f"dp={len(wp)} brute={len(brute)} {verdict}")
    print(f"dp indices:    {list(wp.indices)}")
    print(f"brute indices: {list(brute.indices)}")
    return EXIT_OK if verdict == "MATCH" else EXIT_CHECK_FAILED


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wpx",
        description="Minimal-waypoint decomposition of robot demonstrations, "
        "with relabeling, baselines, and replay checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_eta_task(p):
        p.add_argument("--eta", type=float, default=None, help="error budget")
        p.add_argument("--task", default=None, help="resolve eta from the task defaults table")

    p = sub.add_parser("extract", help="select waypoints for one trajectory file")
    p.add_argument("--input", required=True)
    add_eta_task(p)
    p.add_argument("--output", required=True)
    p.add_argument("--metric-config", default=None, help="JSON file of metric weights")
    p.add_argument("--no-timestamp", action="store_true", help="omit created_at for byte-stable output")
    p.set_defaults(func=_cmd_extract)

    p = sub.add_parser("relabel", help="batch-extract a directory and write relabeled datasets")
    p.add_argument("--input", required=True, help="directory of trajectory files")
    p.add_argument("--eta", type=float, required=True)
    p.add_argument("--output", required=True, help="output directory")
    p.add_argument("--metric-config", default=None)
    p.add_argument("--no-timestamp", action="store_true")
    p.set_defaults(func=_cmd_relabel)

    p = sub.add_parser("stats", help="extraction statistics for a file or directory")
    p.add_argument("--input", required=True)
    add_eta_task(p)
    p.add_argument("--metric-config", default=None)
    p.add_argument("--ratio-low", type=float, default=RATIO_LOW, help="lower waypoint:length ratio bound")
    p.add_argument("--ratio-high", type=float, default=RATIO_HIGH, help="upper waypoint:length ratio bound")
    p.add_argument("--strict-ratio", action="store_true", help="nonzero exit when a ratio falls outside the band")
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("compare", help="selector comparison at matched waypoint counts")
    p.add_argument("--input", required=True)
    add_eta_task(p)
    p.add_argument("--methods", default="awe,zero-vel,fixed")
    p.add_argument("--metric-config", default=None)
    p.add_argument("--control-multiplier", type=int, default=10)
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("replay-check", help="kinematic replay of a saved waypoint set")
    p.add_argument("--input", required=True)
    p.add_argument("--waypoints", required=True)
    p.add_argument("--control-multiplier", type=int, default=10)
    p.add_argument("--max-step", type=float, default=None)
    p.add_argument("--reach-tolerance", type=float, default=None)
    p.add_argument("--blocking", action="store_true", help="advance only on reach, never on budget expiry")
    p.set_defaults(func=_cmd_replay_check)

    p = sub.add_parser("sweep", help="extractions across several budgets")
    p.add_argument("--input", required=True)
    p.add_argument("--etas", required=True, help="comma-separated budgets")
    p.add_argument("--plot-out", default=None, help="write long-format CSV plot data here")
    p.add_argument("--metric-config", default=None)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("oracle", help="brute-force cross-check of the solver (short files)")
    p.add_argument("--input", required=True)
    p.add_argument("--eta", type=float, required=True)
    p.add_argument("--metric-config", default=None)
    p.set_defaults(func=_cmd_oracle)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, parser)
    except TrajectoryParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except TrajectorySchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except TrajectoryValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except FileNotFoundError as exc:
        print(f"error: file not found: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    raise SystemExit(main())
