#!/usr/bin/env python3
"""Show how the waypoint set grows as the error budget tightens.

Runs a descending budget sweep on one demo (synthetic by default), prints the
count progression, and writes long-format plot data for visual inspection.

Example:
    python scripts/budget_sweep_demo.py --plot-out sweep.csv
    python scripts/budget_sweep_demo.py --input data/corpus/demo-000.json --etas 0.05,0.01,0.005
"""

import argparse

import numpy as np

from waypoint_extraction.solver import sweep_eta
from waypoint_extraction.synthetic import make_segmented_ee_trajectory
from waypoint_extraction.trajfile import emit_plot_data, load_trajectory


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--input", default=None, help="trajectory file (otherwise synthetic)")
    parser.add_argument("--etas", default="0.08,0.04,0.02,0.01,0.005")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--plot-out", default=None)
    args = parser.parse_args()

    if args.input:
        traj = load_trajectory(args.input)
    else:
        traj = make_segmented_ee_trajectory(np.random.default_rng(args.seed), name="sweep-demo")
    etas = [float(x) for x in args.etas.split(",")]
    results = sweep_eta(traj, etas)
    print(f"{traj.name}: T={len(traj)}")
    for eta, wp in results:
        bar = "#" * len(wp)
        print(f"eta={eta:<8g} waypoints={len(wp):>4} ratio=1:{len(traj) / len(wp):<5.1f} {bar}")
    if args.plot_out:
        emit_plot_data(traj, results, args.plot_out)
        print(f"plot data -> {args.plot_out}")


if __name__ == "__main__":
    main()
