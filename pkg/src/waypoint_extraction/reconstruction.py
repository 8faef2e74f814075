"""Chord projection and reconstruction losses for waypoint subsequences.

The segment loss scores one chord against the frames it spans and is the
feasibility test inside the solver. The global reconstruction loss scores a
whole waypoint polyline: the worst, over all original frames, of the nearest
distance to any chord. The global loss is never larger than the worst
per-segment loss, because a frame may project onto a chord other than the
one containing it.

Everything here is pure; SegmentScorer just caches the trajectory's arrays
so repeated chord queries stay cheap.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .state_space import (
    DEFAULT_METRIC,
    MetricConfig,
    State,
    StateKind,
    Trajectory,
    _check_same_kind,
    interpolate,
    state_distance,
)

__all__ = [
    "ProjectionResult",
    "project_onto_chord",
    "segment_loss",
    "reconstruction_loss",
    "SegmentScorer",
    "min_distances_to_polyline",
]


@dataclass(frozen=True)
class ProjectionResult:
    """Distance to one chord plus where on the chord the point landed."""

    distance: float
    segment_index: int
    u: float


def project_onto_chord(
    x: State, a: State, b: State, cfg: MetricConfig = DEFAULT_METRIC, segment_index: int = 0
) -> ProjectionResult:
    """Project x onto the interpolated chord from a to b.

    The chord parameter u* comes from the position components alone (full
    joint vector in joint space), clamped to [0, 1]; the distance then
    compares x against the fully interpolated state at u*, so orientation
    differences count even though they do not steer the projection. A
    degenerate chord (identical projection anchors) pins u* to 0.
    """
    _check_same_kind(x, a)
    _check_same_kind(a, b)
    if x.kind is StateKind.EE:
        anchor, span, point = a.position, b.position - a.position, x.position
    else:
        anchor, span, point = a.joints, b.joints - a.joints, x.joints
    denom = float(np.dot(span, span))
    if denom == 0.0:
        u = 0.0
    else:
        u = min(1.0, max(0.0, float(np.dot(point - anchor, span)) / denom))
    ref = interpolate(a, b, u)
    return ProjectionResult(state_distance(x, ref, cfg), segment_index, u)


def segment_loss(traj: Trajectory, i: int, j: int, cfg: MetricConfig = DEFAULT_METRIC) -> float:
    """Worst projection distance of frames i..j onto the chord (i, j).

    Zero for adjacent frames: the endpoints project onto themselves.
    """
    if not (0 <= i < j < len(traj)):
        raise IndexError(f"segment ({i}, {j}) out of range for trajectory of length {len(traj)}")
    a = traj.frames[i].state
    b = traj.frames[j].state
    worst = 0.0
    for t in range(i + 1, j):
        worst = max(worst, project_onto_chord(traj.frames[t].state, a, b, cfg).distance)
    return worst


def reconstruction_loss(traj: Trajectory, waypoints, cfg: MetricConfig = DEFAULT_METRIC) -> float:
    """Global loss of a waypoint polyline against its source trajectory.

    Max over frames of the min distance to any consecutive-waypoint chord.
    The waypoint set must contain both trajectory endpoints.
    """
    indices = _checked_indices(traj, waypoints)
    scorer = SegmentScorer(traj, cfg)
    return scorer.global_loss(indices)


def _checked_indices(traj: Trajectory, waypoints) -> tuple[int, ...]:
    indices = tuple(int(i) for i in getattr(waypoints, "indices", waypoints))
    if not indices or indices[0] != 0 or indices[-1] != len(traj) - 1:
        raise ValueError("waypoint set must include both trajectory endpoints")
    if any(b <= a for a, b in zip(indices, indices[1:])):
        raise ValueError("waypoint indices must be strictly increasing")
    if indices[-1] >= len(traj):
        raise ValueError("waypoint index out of range")
    return indices


# ---------------------------------------------------------------------------
# vectorized kernels
# ---------------------------------------------------------------------------


class _StateArrays:
    """Dense array view of a state sequence for vectorized chord math."""

    __slots__ = ("kind", "pos", "quat", "grip", "vec")

    def __init__(self, kind: StateKind, pos=None, quat=None, grip=None, vec=None):
        self.kind = kind
        self.pos = pos
        self.quat = quat
        self.grip = grip
        self.vec = vec

    @classmethod
    def from_states(cls, states: Sequence[State]) -> "_StateArrays":
        kind = states[0].kind
        if kind is StateKind.EE:
            return cls(
                kind,
                pos=np.stack([s.position for s in states]),
                quat=np.stack([s.orientation for s in states]),
                grip=np.array([s.gripper for s in states]),
            )
        return cls(kind, vec=np.stack([s.joints for s in states]))

    @classmethod
    def from_trajectory(cls, traj: Trajectory) -> "_StateArrays":
        return cls.from_states([f.state for f in traj.frames])

    def __len__(self) -> int:
        return len(self.pos) if self.kind is StateKind.EE else len(self.vec)


def _slerp_rows(qa: np.ndarray, qb: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Row-wise slerp; qa/qb broadcast against u along axis 0."""
    qa = np.broadcast_to(qa, (len(u), 4))
    qb = np.broadcast_to(qb, (len(u), 4))
    dots = np.sum(qa * qb, axis=1)
    sign = np.where(dots < 0.0, -1.0, 1.0)
    qb = qb * sign[:, None]
    dots = np.minimum(np.abs(dots), 1.0)
    near = dots > 1.0 - 1e-12
    theta = np.arccos(dots)
    sin_theta = np.where(near, 1.0, np.sin(theta))
    wa = np.where(near, 1.0 - u, np.sin((1.0 - u) * theta) / sin_theta)
    wb = np.where(near, u, np.sin(u * theta) / sin_theta)
    out = wa[:, None] * qa + wb[:, None] * qb
    return out / np.linalg.norm(out, axis=1, keepdims=True)


def _chord_distances(
    points: _StateArrays,
    ts: np.ndarray,
    anchors: _StateArrays,
    i: int,
    j: int,
    cfg: MetricConfig,
) -> np.ndarray:
    """Distances of points[ts] to the chord between anchors i and j."""
    if points.kind is StateKind.EE:
        a = anchors.pos[i]
        span = anchors.pos[j] - a
        pts = points.pos[ts]
        denom = float(span @ span)
        if denom == 0.0:
            u = np.zeros(len(ts))
        else:
            u = np.clip((pts - a) @ span / denom, 0.0, 1.0)
        proj = a + u[:, None] * span
        out = cfg.position_weight * np.linalg.norm(pts - proj, axis=1)
        qs = _slerp_rows(anchors.quat[i], anchors.quat[j], u)
        dots = np.minimum(np.abs(np.sum(points.quat[ts] * qs, axis=1)), 1.0)
        out = out + cfg.orientation_weight * 2.0 * np.arccos(dots)
        if cfg.include_gripper:
            g = anchors.grip[i] + u * (anchors.grip[j] - anchors.grip[i])
            out = out + cfg.gripper_weight * np.abs(points.grip[ts] - g)
        return out
    a = anchors.vec[i]
    span = anchors.vec[j] - a
    pts = points.vec[ts]
    denom = float(span @ span)
    if denom == 0.0:
        u = np.zeros(len(ts))
    else:
        u = np.clip((pts - a) @ span / denom, 0.0, 1.0)
    proj = a + u[:, None] * span
    weights = cfg.joint_weights(anchors.vec.shape[1])
    return np.linalg.norm((pts - proj) * weights, axis=1)


class SegmentScorer:
    """Cached per-trajectory evaluator for chord losses.

    Matches segment_loss / reconstruction_loss up to floating-point
    reassociation while scoring many chords without rebuilding arrays. The
    solver leans on two extras: loss() can stop early once a chord is proven
    over budget, and probe_pass() screens whole batches of candidate chords
    with a cheap single-frame lower bound.
    """

    _FIRST_BLOCK = 16
    _MAX_BLOCK = 256

    def __init__(self, traj: Trajectory, cfg: MetricConfig = DEFAULT_METRIC):
        self.cfg = cfg
        self.arrays = _StateArrays.from_trajectory(traj)
        if self.arrays.kind is StateKind.JOINT:
            # fail fast on a mask/dimension mismatch
            cfg.joint_weights(self.arrays.vec.shape[1])

    def __len__(self) -> int:
        return len(self.arrays)

    def frame_distances(self, i: int, j: int, ts: np.ndarray) -> np.ndarray:
        return _chord_distances(self.arrays, ts, self.arrays, i, j, self.cfg)

    def loss(self, i: int, j: int, stop_above: float | None = None) -> float:
        """Segment loss of chord (i, j), scanning interior frames in growing
        blocks; with stop_above set, returns early (with a value above the
        bound) as soon as the chord is proven infeasible."""
        if j <= i + 1:
            return 0.0
        worst = 0.0
        lo = i + 1
        block = self._FIRST_BLOCK
        while lo < j:
            hi = min(j, lo + block)
            worst = max(worst, float(self.frame_distances(i, j, np.arange(lo, hi)).max()))
            if stop_above is not None and worst > stop_above:
                return worst
            lo = hi
            block = min(self._MAX_BLOCK, block * 2)
        return worst

    # Screening slack: the row-wise probe kernel and the exact kernel round
    # differently (arccos near 1 turns ulp-level dot differences into ~1e-8
    # of angle), so a chord sitting exactly on the budget could otherwise be
    # screened out here yet accepted by loss(). Over-include near the
    # boundary; the exact check decides.
    _PROBE_SLACK = 1e-6

    def _probe_distances(self, sources: np.ndarray, probes: np.ndarray, j: int) -> np.ndarray:
        """Distance of frame probes[k] to the chord (sources[k], j), rowwise."""
        arrays = self.arrays
        cfg = self.cfg
        if arrays.kind is StateKind.EE:
            a = arrays.pos[sources]
            span = arrays.pos[j] - a
            pts = arrays.pos[probes]
            denom = np.sum(span * span, axis=1)
            safe = np.where(denom == 0.0, 1.0, denom)
            u = np.clip(np.sum((pts - a) * span, axis=1) / safe, 0.0, 1.0)
            u = np.where(denom == 0.0, 0.0, u)
            proj = a + u[:, None] * span
            out = cfg.position_weight * np.linalg.norm(pts - proj, axis=1)
            qs = _slerp_rows(arrays.quat[sources], arrays.quat[j], u)
            dots = np.minimum(np.abs(np.sum(arrays.quat[probes] * qs, axis=1)), 1.0)
            out = out + cfg.orientation_weight * 2.0 * np.arccos(dots)
            if cfg.include_gripper:
                g = arrays.grip[sources] + u * (arrays.grip[j] - arrays.grip[sources])
                out = out + cfg.gripper_weight * np.abs(arrays.grip[probes] - g)
            return out
        a = arrays.vec[sources]
        span = arrays.vec[j] - a
        pts = arrays.vec[probes]
        denom = np.sum(span * span, axis=1)
        safe = np.where(denom == 0.0, 1.0, denom)
        u = np.clip(np.sum((pts - a) * span, axis=1) / safe, 0.0, 1.0)
        u = np.where(denom == 0.0, 0.0, u)
        proj = a + u[:, None] * span
        weights = cfg.joint_weights(arrays.vec.shape[1])
        return np.linalg.norm((pts - proj) * weights, axis=1)

    def probe_pass(self, sources: np.ndarray, j: int, eta: float) -> np.ndarray:
        """Screen chords (sources[k], j): False entries are certainly over
        budget, judged by the worst of three sampled interior frames (each a
        lower bound on the full segment loss). True entries still need
        loss(). Three spread samples rather than one keep periodic paths
        from aliasing straight through the screen."""
        sources = np.asarray(sources, dtype=int)
        lb = self._probe_distances(sources, (sources + j) // 2, j)
        lb = np.maximum(lb, self._probe_distances(sources, (3 * sources + j) // 4, j))
        lb = np.maximum(lb, self._probe_distances(sources, (sources + 3 * j) // 4, j))
        # adjacent chords have no interior frames and are always feasible
        bound = eta + self._PROBE_SLACK + 1e-9 * eta
        return (lb <= bound) | (j - sources <= 1)

    def global_loss(self, indices: Sequence[int]) -> float:
        """Reconstruction loss of the polyline through the given indices."""
        ts = np.arange(len(self))
        best = None
        for a, b in zip(indices, indices[1:]):
            d = self.frame_distances(int(a), int(b), ts)
            best = d if best is None else np.minimum(best, d)
        return float(best.max())


def min_distances_to_polyline(
    states: Sequence[State], anchors: Sequence[State], cfg: MetricConfig = DEFAULT_METRIC
) -> np.ndarray:
    """Per-state distance to the nearest chord of the polyline through anchors."""
    if len(anchors) < 2:
        raise ValueError("polyline needs at least two anchors")
    _check_same_kind(states[0], anchors[0])
    points = _StateArrays.from_states(states)
    chain = _StateArrays.from_states(anchors)
    ts = np.arange(len(states))
    best = None
    for i in range(len(anchors) - 1):
        d = _chord_distances(points, ts, chain, i, i + 1, cfg)
        best = d if best is None else np.minimum(best, d)
    return best
