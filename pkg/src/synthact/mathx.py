"""Small 3D transform helpers shared across the engine.

All transforms are 4x4 row-major float64 matrices acting on column
vectors; the world frame is right-handed, Y-up, in meters.
"""

from __future__ import annotations

import numpy as np


def translation(t) -> np.ndarray:
    m = np.eye(4)
    m[:3, 3] = np.asarray(t, dtype=np.float64)
    return m


def scaling(s) -> np.ndarray:
    s = np.asarray(s, dtype=np.float64)
    if s.ndim == 0:
        s = np.full(3, float(s))
    m = np.eye(4)
    m[0, 0], m[1, 1], m[2, 2] = s
    return m


def rotation_x(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    m = np.eye(4)
    m[1, 1], m[1, 2] = c, -s
    m[2, 1], m[2, 2] = s, c
    return m


def rotation_y(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    m = np.eye(4)
    m[0, 0], m[0, 2] = c, s
    m[2, 0], m[2, 2] = -s, c
    return m


def rotation_z(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    m = np.eye(4)
    m[0, 0], m[0, 1] = c, -s
    m[1, 0], m[1, 1] = s, c
    return m


def rotation_y_about(angle: float, pivot) -> np.ndarray:
    """Rotation about a vertical (world Y) axis through ``pivot``."""
    return translation(pivot) @ rotation_y(angle) @ translation(-np.asarray(pivot))


def axis_angle_matrix(rotvec) -> np.ndarray:
    """Rodrigues' formula: axis-angle vector (radians) to a 4x4 rotation."""
    rotvec = np.asarray(rotvec, dtype=np.float64)
    angle = float(np.linalg.norm(rotvec))
    m = np.eye(4)
    if angle < 1e-12:
        return m
    axis = rotvec / angle
    k = np.array(
        [
            [0.0, -axis[2], axis[1]],
            [axis[2], 0.0, -axis[0]],
            [-axis[1], axis[0], 0.0],
        ]
    )
    m[:3, :3] = np.eye(3) + np.sin(angle) * k + (1.0 - np.cos(angle)) * (k @ k)
    return m


def rigid_inverse(m: np.ndarray) -> np.ndarray:
    """Inverse of a rigid transform (rotation + translation only)."""
    r = m[:3, :3]
    out = np.eye(4)
    out[:3, :3] = r.T
    out[:3, 3] = -r.T @ m[:3, 3]
    return out


def look_at(eye, target, up=(0.0, 1.0, 0.0)) -> np.ndarray:
    """World-from-camera pose with the camera looking down its -Z axis."""
    eye = np.asarray(eye, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    z = eye - target
    z = z / np.linalg.norm(z)
    x = np.cross(np.asarray(up, dtype=np.float64), z)
    n = np.linalg.norm(x)
    if n < 1e-12:
        # looking straight up/down: pick an arbitrary horizontal right axis
        x = np.array([1.0, 0.0, 0.0])
    else:
        x = x / n
    y = np.cross(z, x)
    m = np.eye(4)
    m[:3, 0], m[:3, 1], m[:3, 2], m[:3, 3] = x, y, z, eye
    return m


def transform_points(m: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Apply a 4x4 affine transform to an (N, 3) point array."""
    points = np.asarray(points, dtype=np.float64)
    return points @ m[:3, :3].T + m[:3, 3]


def transform_directions(m: np.ndarray, dirs: np.ndarray) -> np.ndarray:
    return np.asarray(dirs, dtype=np.float64) @ m[:3, :3].T


def normalized(v: np.ndarray, axis: int = -1) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64)
    n = np.linalg.norm(v, axis=axis, keepdims=True)
    return v / np.maximum(n, 1e-12)
