#!/usr/bin/env python3
"""Generate a synthetic demonstration corpus as trajectory files.

Example:
    python scripts/make_corpus.py --out data/corpus --n 50 --eta 0.005 --seed 7
"""

import argparse
from pathlib import Path

import numpy as np

from waypoint_extraction.synthetic import make_corpus
from waypoint_extraction.trajfile import save_trajectory


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--n", type=int, default=50, help="number of trajectories")
    parser.add_argument("--eta", type=float, default=0.005, help="budget the jitter is scaled to (sigma = eta/5)")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(args.seed)
    for traj in make_corpus(rng, args.n, eta=args.eta):
        save_trajectory(out / f"{traj.name}.json", traj)
        print(f"{traj.name}: T={len(traj)}")
    print(f"wrote {args.n} trajectories to {out}")


if __name__ == "__main__":
    main()
