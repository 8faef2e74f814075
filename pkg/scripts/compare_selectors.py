#!/usr/bin/env python3
"""Corpus-level selector comparison: budgeted DP vs calibrated heuristics.

Generates (or loads) a corpus, matches heuristic waypoint counts to the DP's
count per trajectory, and reports how often the DP's polyline wins on global
reconstruction loss and on kinematic replay deviation.

Example:
    python scripts/compare_selectors.py --n 25 --eta 0.005 --seed 3
    python scripts/compare_selectors.py --corpus data/corpus --eta 0.005
"""

import argparse
from pathlib import Path

import numpy as np

from waypoint_extraction.baselines import calibrate_to_count
from waypoint_extraction.replay import default_follower_config, replay_waypoints
from waypoint_extraction.solver import ErrorBudget, annotate_losses, extract_waypoints_dp
from waypoint_extraction.synthetic import make_corpus
from waypoint_extraction.trajfile import load_trajectory

METHODS = ("zero-vel", "fixed")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--corpus", default=None, help="directory of trajectory files (otherwise synthetic)")
    parser.add_argument("--n", type=int, default=25, help="synthetic corpus size when --corpus is not given")
    parser.add_argument("--eta", type=float, default=0.005)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--control-multiplier", type=int, default=10)
    args = parser.parse_args()

    if args.corpus:
        files = sorted(Path(args.corpus).glob("*.json"))
        corpus = [load_trajectory(f) for f in files]
    else:
        corpus = make_corpus(np.random.default_rng(args.seed), args.n, eta=args.eta)

    budget = ErrorBudget(args.eta)
    tallies = {m: {"global": 0, "replay": 0, "n": 0, "count_gap": []} for m in METHODS}
    for traj in corpus:
        awe, stats = extract_waypoints_dp(traj, budget)
        follower = default_follower_config(traj, args.eta, control_multiplier=args.control_multiplier)
        awe_dev = replay_waypoints(traj, awe, follower).max_tracking_deviation
        print(
            f"{traj.name}: T={len(traj)} awe={len(awe)} global={awe.achieved_global_loss:.5f} "
            f"replay_dev={awe_dev:.5f} wall={stats.wall_time:.2f}s"
        )
        for method in METHODS:
            cal = calibrate_to_count(traj, method, len(awe))
            heur = annotate_losses(traj, cal.waypoints)
            dev = replay_waypoints(traj, cal.waypoints, follower).max_tracking_deviation
            t = tallies[method]
            t["n"] += 1
            t["count_gap"].append(len(cal.waypoints) - len(awe))
            t["global"] += awe.achieved_global_loss <= heur.achieved_global_loss
            t["replay"] += awe_dev <= dev
            print(
                f"  {method:9s} count={len(cal.waypoints)} global={heur.achieved_global_loss:.5f} "
                f"replay_dev={dev:.5f}"
            )

    print()
    for method, t in tallies.items():
        gaps = np.array(t["count_gap"])
        print(
            f"awe <= {method}: global {t['global']}/{t['n']}, replay {t['replay']}/{t['n']} "
            f"(count gap mean {gaps.mean():+.1f}, max |gap| {np.abs(gaps).max()})"
        )


if __name__ == "__main__":
    main()
