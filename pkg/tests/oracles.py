"""Independent reference implementations used to cross-check the library.

Orientation math goes through scipy.spatial.transform instead of the
package's own quaternion code, and chord projections are found by grid
minimization instead of the closed form, so agreement is meaningful.
"""

from __future__ import annotations

import numpy as np
from scipy.spatial.transform import Rotation, Slerp

from waypoint_extraction.state_space import EEState, JointState, MetricConfig


def _rotation(state: EEState) -> Rotation:
    w, x, y, z = state.orientation
    return Rotation.from_quat([x, y, z, w])


def oracle_state_distance(x, y, cfg: MetricConfig = MetricConfig()) -> float:
    if isinstance(x, JointState):
        weights = np.ones(x.dim) if cfg.joint_mask is None else np.asarray(cfg.joint_mask)
        return float(np.linalg.norm(weights * (x.joints - y.joints)))
    d = cfg.position_weight * float(np.linalg.norm(x.position - y.position))
    d += cfg.orientation_weight * float((_rotation(x).inv() * _rotation(y)).magnitude())
    if cfg.include_gripper:
        d += cfg.gripper_weight * abs(x.gripper - y.gripper)
    return d


def _grid_argmin_u(point: np.ndarray, a: np.ndarray, b: np.ndarray, rounds: int = 4, n: int = 1001) -> float:
    """Minimize |point - lerp(a, b, u)| over u in [0, 1] by nested grids."""
    lo, hi = 0.0, 1.0
    best_u = 0.0
    for _ in range(rounds):
        us = np.linspace(lo, hi, n)
        pts = a[None, :] + us[:, None] * (b - a)[None, :]
        k = int(np.argmin(np.linalg.norm(pts - point[None, :], axis=1)))
        best_u = float(us[k])
        lo = float(us[max(0, k - 1)])
        hi = float(us[min(n - 1, k + 1)])
    return best_u


def _slerp_state(a: EEState, b: EEState, u: float) -> Rotation:
    key = Rotation.concatenate([_rotation(a), _rotation(b)])
    if (_rotation(a).inv() * _rotation(b)).magnitude() < 1e-12:
        return _rotation(a)
    return Slerp([0.0, 1.0], key)([u])[0]


def oracle_projection_distance(x, a, b, cfg: MetricConfig = MetricConfig()) -> float:
    """Distance of x to the chord a->b: position-argmin u found by grid
    search, combined distance evaluated at that u."""
    if isinstance(x, JointState):
        u = _grid_argmin_u(x.joints, a.joints, b.joints)
        ref = a.joints + u * (b.joints - a.joints)
        weights = np.ones(x.dim) if cfg.joint_mask is None else np.asarray(cfg.joint_mask)
        return float(np.linalg.norm(weights * (x.joints - ref)))
    u = _grid_argmin_u(x.position, a.position, b.position)
    ref_pos = a.position + u * (b.position - a.position)
    d = cfg.position_weight * float(np.linalg.norm(x.position - ref_pos))
    ref_rot = _slerp_state(a, b, u)
    d += cfg.orientation_weight * float((_rotation(x).inv() * ref_rot).magnitude())
    if cfg.include_gripper:
        ref_grip = a.gripper + u * (b.gripper - a.gripper)
        d += cfg.gripper_weight * abs(x.gripper - ref_grip)
    return d


def oracle_segment_loss(traj, i: int, j: int, cfg: MetricConfig = MetricConfig()) -> float:
    """Exhaustive per-state projection onto the containing chord."""
    a = traj.frames[i].state
    b = traj.frames[j].state
    return max(
        (oracle_projection_distance(traj.frames[t].state, a, b, cfg) for t in range(i, j + 1)),
        default=0.0,
    )


def oracle_reconstruction_loss(traj, indices, cfg: MetricConfig = MetricConfig()) -> float:
    """Double-loop max over frames of min over chords."""
    worst = 0.0
    for frame in traj.frames:
        nearest = min(
            oracle_projection_distance(
                frame.state, traj.frames[a].state, traj.frames[b].state, cfg
            )
            for a, b in zip(indices, indices[1:])
        )
        worst = max(worst, nearest)
    return worst


def oracle_next_waypoint(t: int, indices) -> int:
    """Linear scan for the first waypoint index strictly after t."""
    for idx in indices:
        if idx > t:
            return idx
    raise AssertionError(f"no waypoint after {t}")
