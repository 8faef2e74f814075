"""Next-waypoint relabeling of demonstration frames.

Each frame of a demonstration is paired with the state of the nearest
waypoint strictly after it, so a BC policy trained on the result predicts
waypoints instead of single-step targets. Every frame between two waypoints
appears in the output; only the final frame is dropped, since nothing lies
after the last waypoint.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass

from .solver import ErrorBudget, WaypointSet, extract_waypoints_dp
from .state_space import State, Trajectory

__all__ = [
    "RelabeledFrame",
    "RelabeledDataset",
    "CorpusRelabelResult",
    "next_waypoint_index",
    "relabel_trajectory",
    "relabel_corpus",
]


@dataclass(frozen=True, eq=False)
class RelabeledFrame:
    """One training row: the frame plus its next-waypoint target."""

    t: int
    obs_ref: str | None
    state: State
    target_waypoint: State
    target_index: int
    waypoints_remaining: int

    def __post_init__(self):
        if self.target_index <= self.t:
            raise ValueError("target_index must lie strictly after the frame")
        if self.waypoints_remaining < 1:
            raise ValueError("waypoints_remaining must be >= 1")


@dataclass(frozen=True, eq=False)
class RelabeledDataset:
    """Relabeled rows for one demonstration, |trajectory| - 1 of them."""

    source_name: str
    eta: float
    frames: tuple[RelabeledFrame, ...]

    def __len__(self) -> int:
        return len(self.frames)


def next_waypoint_index(t: int, wp: WaypointSet) -> int:
    """Smallest waypoint index strictly greater than t.

    A frame sitting exactly on a waypoint targets the following one, never
    itself. Raises for frames at or past the final waypoint.
    """
    t = int(t)
    if t < 0:
        raise ValueError("frame index must be >= 0")
    if t >= wp.indices[-1]:
        raise ValueError(f"no waypoint after frame {t} (last waypoint is {wp.indices[-1]})")
    return wp.indices[bisect_right(wp.indices, t)]


def relabel_trajectory(traj: Trajectory, wp: WaypointSet) -> RelabeledDataset:
    """Pair every frame except the last with its next waypoint's state.

    Row t and target_index are the frames' own time indices, which coincide
    with frame positions for the usual contiguous trajectories but stay
    meaningful when the time axis has gaps.
    """
    wp.validate_for(traj)
    rows = []
    for pos in range(len(traj) - 1):
        target = next_waypoint_index(pos, wp)
        remaining = len(wp.indices) - bisect_right(wp.indices, pos)
        frame = traj.frames[pos]
        rows.append(
            RelabeledFrame(
                t=frame.t,
                obs_ref=frame.obs_ref,
                state=frame.state,
                target_waypoint=traj.frames[target].state,
                target_index=traj.frames[target].t,
                waypoints_remaining=remaining,
            )
        )
    eta = wp.eta_used if wp.eta_used is not None else math.nan
    return RelabeledDataset(traj.name, eta, tuple(rows))


@dataclass(frozen=True)
class CorpusRelabelResult:
    """Merged relabeling output plus corpus-level bookkeeping.

    mean_ratio is waypoints per frame (count / length); mean_compression is
    its reciprocal view, frames per waypoint. Trajectories that failed to
    extract are listed by (name, error) and do not abort the batch.
    """

    datasets: tuple[RelabeledDataset, ...]
    failures: tuple[tuple[str, str], ...]
    mean_waypoint_count: float
    mean_ratio: float
    mean_compression: float


def relabel_corpus(trajs, budget: ErrorBudget) -> CorpusRelabelResult:
    """Extract waypoints and relabel every trajectory in input order."""
    trajs = list(trajs)
    if not trajs:
        raise ValueError("corpus is empty")
    datasets = []
    failures = []
    counts = []
    ratios = []
    compressions = []
    for traj in trajs:
        try:
            wp, _ = extract_waypoints_dp(traj, budget)
            datasets.append(relabel_trajectory(traj, wp))
        except ValueError as exc:
            failures.append((traj.name, str(exc)))
            continue
        counts.append(len(wp))
        ratios.append(len(wp) / len(traj))
        compressions.append(len(traj) / len(wp))
    def _mean(xs):
        return sum(xs) / len(xs) if xs else math.nan
    return CorpusRelabelResult(
        datasets=tuple(datasets),
        failures=tuple(failures),
        mean_waypoint_count=_mean(counts),
        mean_ratio=_mean(ratios),
        mean_compression=_mean(compressions),
    )
