"""Minimum-cardinality waypoint selection under a segment error budget.

A subsequence of frame indices is feasible when every consecutive pair, read
as a chord over the original frames between them, keeps its segment loss
within the budget. The solver returns the smallest feasible subsequence that
contains both endpoints, breaking ties toward the lexicographically smallest
index sequence so results are reproducible.

The search is a breadth-first minimum-node path over the chord feasibility
graph, which optimizes the same segment-decomposed objective as the
recursive split-and-merge formulation but gives a flat table with cheap
screening. extract_waypoints_bruteforce is the independent check: it
enumerates subsequences by cardinality and must agree with the solver.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .reconstruction import SegmentScorer, _checked_indices
from .state_space import DEFAULT_METRIC, MetricConfig, Trajectory

__all__ = [
    "ErrorBudget",
    "WaypointSet",
    "SolveStats",
    "extract_waypoints_dp",
    "extract_waypoints_bruteforce",
    "sweep_eta",
    "annotate_losses",
    "BRUTE_FORCE_LIMIT",
]

BRUTE_FORCE_LIMIT = 20


@dataclass(frozen=True)
class ErrorBudget:
    """Scalar reconstruction budget plus the distance metric it is read in."""

    eta: float
    metric: MetricConfig = field(default_factory=MetricConfig)

    def __post_init__(self):
        eta = float(self.eta)
        if not (math.isfinite(eta) and eta > 0.0):
            raise ValueError("eta must be a positive finite scalar")
        object.__setattr__(self, "eta", eta)


@dataclass(frozen=True)
class WaypointSet:
    """Strictly increasing frame indices selected as waypoints.

    Extraction records the budget it ran with and the losses it achieved;
    heuristic selectors leave those as None.
    """

    indices: tuple[int, ...]
    eta_used: float | None = None
    achieved_segment_loss: float | None = None
    achieved_global_loss: float | None = None

    def __post_init__(self):
        indices = tuple(int(i) for i in self.indices)
        if not indices:
            raise ValueError("waypoint set cannot be empty")
        if indices[0] != 0:
            raise ValueError("waypoint set must start at frame 0")
        if any(b <= a for a, b in zip(indices, indices[1:])):
            raise ValueError("waypoint indices must be strictly increasing")
        object.__setattr__(self, "indices", indices)
        for name in ("eta_used", "achieved_segment_loss", "achieved_global_loss"):
            v = getattr(self, name)
            if v is not None:
                v = float(v)
                if not math.isfinite(v) or v < 0.0:
                    raise ValueError(f"{name} must be finite and >= 0")
                object.__setattr__(self, name, v)
        if self.eta_used is not None and self.achieved_segment_loss is not None:
            if self.achieved_segment_loss > self.eta_used:
                raise ValueError("achieved segment loss exceeds the budget it was solved under")

    def __len__(self) -> int:
        return len(self.indices)

    def validate_for(self, traj: Trajectory) -> None:
        if self.indices[-1] != len(traj) - 1:
            raise ValueError(
                f"waypoint set ends at {self.indices[-1]} but trajectory has {len(traj)} frames"
            )


@dataclass
class SolveStats:
    """Work counters for one extraction."""

    subproblems_evaluated: int = 0
    segment_loss_evaluations: int = 0
    wall_time: float = 0.0


class _Feasibility:
    """Memoized chord feasibility on top of a SegmentScorer."""

    def __init__(self, scorer: SegmentScorer, eta: float):
        self.scorer = scorer
        self.eta = eta
        self.verdict: dict[tuple[int, int], bool] = {}
        self.full_loss: dict[tuple[int, int], float] = {}
        self.evaluations = 0

    def feasible(self, i: int, j: int) -> bool:
        if j <= i + 1:
            return True
        key = (i, j)
        v = self.verdict.get(key)
        if v is None:
            self.evaluations += 1
            loss = self.scorer.loss(i, j, stop_above=self.eta)
            v = loss <= self.eta
            self.verdict[key] = v
            if v:
                # early exit never fired, so this value is the exact loss
                self.full_loss[key] = loss
        return v

    def exact_loss(self, i: int, j: int) -> float:
        if j <= i + 1:
            return 0.0
        key = (i, j)
        if key not in self.full_loss:
            self.evaluations += 1
            self.full_loss[key] = self.scorer.loss(i, j)
        return self.full_loss[key]


def _min_hops_to_end(T: int, feas: _Feasibility, stats: SolveStats) -> list[int | None]:
    """Backward BFS: hops[i] = fewest chords from frame i to frame T-1.

    Always terminates because adjacent chords are free, so the largest
    unassigned frame can reach an assigned one each layer. Candidate edges
    are screened in bulk with the scorer's lower bound before any exact
    segment evaluation.
    """
    hops: list[int | None] = [None] * T
    hops[T - 1] = 0
    stats.subproblems_evaluated += 1
    unassigned = list(range(T - 1))
    frontier = [T - 1]
    layer = 0
    while hops[0] is None:
        layer += 1
        pool = np.array(unassigned, dtype=int)
        candidates: dict[int, list[int]] = {}
        for j in frontier:
            sources = pool[pool < j]
            if sources.size == 0:
                continue
            keep = feas.scorer.probe_pass(sources, j, feas.eta)
            for i in sources[keep]:
                candidates.setdefault(int(i), []).append(j)
        reached = []
        for i in sorted(candidates):
            for j in sorted(candidates[i], key=lambda jj: jj - i):
                if feas.feasible(i, j):
                    hops[i] = layer
                    reached.append(i)
                    stats.subproblems_evaluated += 1
                    break
        assert reached, "BFS stalled; adjacent chords guarantee progress"
        assigned = set(reached)
        unassigned = [i for i in unassigned if i not in assigned]
        frontier = reached
    return hops


def _lex_smallest_path(T: int, hops: list[int | None], feas: _Feasibility) -> list[int]:
    """Greedy front-to-back reconstruction of the minimal path, always taking
    the smallest next index that still finishes in the remaining hop count."""
    path = [0]
    cur = 0
    while cur != T - 1:
        need = hops[cur] - 1
        for j in range(cur + 1, T):
            if hops[j] == need and feas.feasible(cur, j):
                path.append(j)
                cur = j
                break
        else:
            raise AssertionError("no continuation found on a minimal path")
    return path


def _solve(scorer: SegmentScorer, eta: float) -> tuple[WaypointSet, SolveStats]:
    stats = SolveStats()
    start = time.perf_counter()
    T = len(scorer)
    feas = _Feasibility(scorer, eta)
    hops = _min_hops_to_end(T, feas, stats)
    indices = _lex_smallest_path(T, hops, feas)
    seg = max(feas.exact_loss(a, b) for a, b in itertools.pairwise(indices))
    glob = scorer.global_loss(indices)
    stats.segment_loss_evaluations = feas.evaluations
    stats.wall_time = time.perf_counter() - start
    wp = WaypointSet(tuple(indices), eta_used=eta, achieved_segment_loss=seg, achieved_global_loss=glob)
    return wp, stats


def extract_waypoints_dp(traj: Trajectory, budget: ErrorBudget) -> tuple[WaypointSet, SolveStats]:
    """Smallest endpoint-containing waypoint subsequence whose every chord
    stays within budget.eta; deterministic for identical inputs."""
    if len(traj) < 2:
        raise ValueError("trajectory needs at least 2 frames")
    scorer = SegmentScorer(traj, budget.metric)
    return _solve(scorer, budget.eta)


def extract_waypoints_bruteforce(traj: Trajectory, budget: ErrorBudget) -> WaypointSet:
    """Exhaustive minimal search, the cross-check for extract_waypoints_dp.

    Enumerates endpoint-containing subsequences in order of increasing
    cardinality, lexicographic within a cardinality, and returns the first
    whose chords all fit the budget. Refuses trajectories longer than
    BRUTE_FORCE_LIMIT frames.
    """
    T = len(traj)
    if T > BRUTE_FORCE_LIMIT:
        raise ValueError(f"brute force is limited to {BRUTE_FORCE_LIMIT} frames, got {T}")
    scorer = SegmentScorer(traj, budget.metric)
    feas = _Feasibility(scorer, budget.eta)
    interior = range(1, T - 1)
    for k in range(0, T - 1):
        for combo in itertools.combinations(interior, k):
            seq = (0, *combo, T - 1)
            if all(feas.feasible(a, b) for a, b in itertools.pairwise(seq)):
                seg = max(feas.exact_loss(a, b) for a, b in itertools.pairwise(seq))
                glob = scorer.global_loss(seq)
                return WaypointSet(seq, budget.eta, seg, glob)
    raise AssertionError("the full frame sequence is always feasible")


def sweep_eta(
    traj: Trajectory, etas, metric: MetricConfig = DEFAULT_METRIC
) -> list[tuple[float, WaypointSet]]:
    """One extraction per budget, returned in descending budget order."""
    etas = [float(e) for e in etas]
    if not etas:
        raise ValueError("sweep needs at least one eta")
    if any(not (math.isfinite(e) and e > 0.0) for e in etas):
        raise ValueError("every eta must be a positive finite scalar")
    scorer = SegmentScorer(traj, metric)
    out = []
    for eta in sorted(etas, reverse=True):
        wp, _ = _solve(scorer, eta)
        out.append((eta, wp))
    return out


def annotate_losses(traj: Trajectory, waypoints, metric: MetricConfig = DEFAULT_METRIC) -> WaypointSet:
    """Attach achieved segment and global losses to an arbitrary index set,
    e.g. one produced by a heuristic selector."""
    indices = _checked_indices(traj, waypoints)
    scorer = SegmentScorer(traj, metric)
    seg = max(scorer.loss(a, b) for a, b in itertools.pairwise(indices))
    glob = scorer.global_loss(indices)
    return WaypointSet(indices, eta_used=None, achieved_segment_loss=seg, achieved_global_loss=glob)
