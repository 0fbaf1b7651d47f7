"""Deterministic software rendering of SceneGraphs.

Pixel conventions: pixel (0, 0) is top-left; continuous image
coordinates put pixel (i, j)'s center at (j + 0.5, i + 0.5); the
principal point of a W x H frame is the continuous point (W/2, H/2).
Depth buffers hold view-space distance in meters (+inf background).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..body import ContractError
from ..formats.clip import ClipContainer
from ..formats.mesh import Texture
from ..mathx import rigid_inverse, normalized
from ..scene import Camera, SceneGraph
from .kernels import rasterize_node


class ConfigError(ValueError):
    pass


@dataclass
class RenderConfig:
    resolution: int = 224
    fps: int = 25
    supersample: bool = False
    shadows: bool = True
    shadow_resolution: int = 1024
    shadow_bias: float = 0.012
    shadow_slope_bias: float = 0.05
    background: tuple[float, float, float] = (0.0, 0.0, 0.0)


def project(camera: Camera, world_point, width: int = 224, height: int = 224):
    """Pinhole projection of one world point.

    Returns ((px, py), view_depth) in continuous pixel coordinates
    (origin top-left). The caller is responsible for near-plane clipping.
    """
    p = np.asarray(world_point, dtype=np.float64)
    view = rigid_inverse(camera.pose) @ np.append(p, 1.0)
    depth = -view[2]
    f = (height / 2.0) / np.tan(camera.vfov / 2.0)
    px = width / 2.0 + f * view[0] / depth
    py = height / 2.0 - f * view[1] / depth
    return (px, py), depth


def unproject(camera: Camera, pixel, depth: float, width: int = 224, height: int = 224):
    """Inverse of project: continuous pixel + view depth to world point."""
    f = (height / 2.0) / np.tan(camera.vfov / 2.0)
    x = (pixel[0] - width / 2.0) * depth / f
    y = -(pixel[1] - height / 2.0) * depth / f
    view = np.array([x, y, -depth, 1.0])
    return (camera.pose @ view)[:3]


_EMPTY_TEX = np.zeros((1, 1, 3), dtype=np.float32)
_EMPTY_SHADOW = np.zeros((1, 1), dtype=np.float32)


def _node_arrays(node):
    """World-space geometry + per-vertex attributes for one node."""
    mesh = node.mesh
    m = node.transform
    wpos = mesh.vertices @ m[:3, :3].T + m[:3, 3]
    wnrm = normalized(mesh.normals @ m[:3, :3].T)

    if node.color_override is not None:
        vcol = np.tile(np.asarray(node.color_override, dtype=np.float64), (len(wpos), 1))
        tex, uv, use_tex = _EMPTY_TEX, None, False
    elif node.texture is not None and mesh.uvs is not None:
        vcol = np.full((len(wpos), 3), 0.78)
        tex = node.texture.pixels.astype(np.float32) / 255.0
        uv, use_tex = mesh.uvs, True
    elif mesh.colors is not None:
        vcol, tex, uv, use_tex = mesh.colors, _EMPTY_TEX, None, False
    else:
        vcol = np.full((len(wpos), 3), 0.78)
        tex, uv, use_tex = _EMPTY_TEX, None, False
    if uv is None:
        uv = np.zeros((len(wpos), 2))
    return wpos, wnrm, uv, vcol, tex, use_tex


def _clip_near(view_z, tris, attr, near):
    """Clip triangles against the z = -near plane in view space.

    ``attr`` is an (V, K) array whose first column must be view z;
    returns (tris, attr) with straddling triangles re-tessellated.
    """
    inside = view_z <= -near
    tri_inside = inside[tris]
    n_in = tri_inside.sum(axis=1)
    keep = tris[n_in == 3]
    cross = tris[(n_in > 0) & (n_in < 3)]
    if len(cross) == 0:
        return keep, attr

    new_attr = [attr]
    new_tris = [keep]
    next_index = len(attr)
    extra = []
    for tri in cross:
        poly = [attr[i] for i in tri]
        out = []
        for k in range(3):
            a = poly[k]
            b = poly[(k + 1) % 3]
            sa = -near - a[0]  # >= 0 means inside
            sb = -near - b[0]
            if sa >= 0:
                out.append((True, a))
            if (sa >= 0) != (sb >= 0):
                t = sa / (sa - sb)
                out.append((False, a + t * (b - a)))
        if len(out) < 3:
            continue
        idx = []
        for _is_orig, vert in out:
            extra.append(vert)
            idx.append(next_index)
            next_index += 1
        for k in range(1, len(idx) - 1):
            new_tris.append(np.array([[idx[0], idx[k], idx[k + 1]]], dtype=tris.dtype))
    if extra:
        new_attr.append(np.stack(extra))
    return np.concatenate(new_tris), np.concatenate(new_attr)


def _light_arrays(scene: SceneGraph):
    dirs = [l for l in scene.lights if l.kind == "directional"]
    pts = [l for l in scene.lights if l.kind == "point"]
    dir_vec = np.stack([l.vector for l in dirs]) if dirs else np.zeros((0, 3))
    dir_int = np.array([l.intensity for l in dirs])
    dir_col = np.stack([np.asarray(l.color, dtype=np.float64) for l in dirs]) if dirs else np.zeros((0, 3))
    pt_pos = np.stack([l.vector for l in pts]) if pts else np.zeros((0, 3))
    pt_int = np.array([l.intensity for l in pts])
    pt_col = np.stack([np.asarray(l.color, dtype=np.float64) for l in pts]) if pts else np.zeros((0, 3))
    return dir_vec, dir_int, dir_col, pt_pos, pt_int, pt_col


def _build_shadow_map(scene: SceneGraph, node_world, config: RenderConfig):
    """Orthographic depth map from the first directional light."""
    dirs = [l for l in scene.lights if l.kind == "directional"]
    if not dirs or not config.shadows:
        return _EMPTY_SHADOW, np.eye(4), 0
    d = dirs[0].vector
    lz = -d
    up = np.array([0.0, 1.0, 0.0]) if abs(lz[1]) < 0.95 else np.array([1.0, 0.0, 0.0])
    lx = np.cross(up, lz)
    lx /= np.linalg.norm(lx)
    ly = np.cross(lz, lx)
    basis = np.stack([lx, ly, -lz])  # rows: light x, light y, travel depth

    all_pts = np.concatenate([w for w, *_ in node_world]) if node_world else np.zeros((1, 3))
    lc = all_pts @ basis.T
    lo = lc.min(axis=0) - 0.05
    hi = lc.max(axis=0) + 0.05
    span = np.maximum(hi - lo, 1e-6)
    s = config.shadow_resolution

    # rows map world -> (shadow u px, shadow v px, light depth in meters)
    mat = np.eye(4)
    mat[0, :3] = basis[0] * (s / span[0])
    mat[0, 3] = -lo[0] * s / span[0]
    mat[1, :3] = basis[1] * (s / span[1])
    mat[1, 3] = -lo[1] * s / span[1]
    mat[2, :3] = basis[2]
    mat[2, 3] = -lo[2]

    shadow = np.full((s, s), np.inf, dtype=np.float32)
    dummy_color = np.zeros((1, 1, 3), dtype=np.float32)
    zeros3 = np.zeros((0, 3))
    zeros1 = np.zeros(0)
    for wpos, _wnrm, _uv, _vcol, _tex, _use, tris in node_world:
        if len(tris) == 0:
            continue
        pts = np.stack(
            [
                wpos @ mat[0, :3] + mat[0, 3],
                wpos @ mat[1, :3] + mat[1, 3],
            ],
            axis=1,
        )
        depth_attr = wpos @ mat[2, :3] + mat[2, 3]
        rasterize_node(
            tris.astype(np.int64),
            pts,
            np.ones(len(wpos)),
            depth_attr,
            wpos,
            wpos,
            np.zeros((len(wpos), 2)),
            np.zeros((len(wpos), 3)),
            False,
            _EMPTY_TEX,
            zeros3,
            zeros1,
            zeros3,
            zeros3,
            zeros1,
            zeros3,
            np.zeros(3),
            _EMPTY_SHADOW,
            np.eye(4),
            0.0,
            0.0,
            0,
            1,
            1,
            dummy_color,
            shadow,
            np.inf,
        )
    return shadow, mat, 1


def render_frame(scene: SceneGraph, config: RenderConfig | None = None):
    """Rasterize one scene; returns (rgb uint8 (H, W, 3), depth float32 (H, W))."""
    config = config or RenderConfig()
    res = config.resolution
    ss = 2 if config.supersample else 1
    w = h = res * ss

    cam = scene.camera
    view_from_world = rigid_inverse(cam.pose)
    f = (h / 2.0) / np.tan(cam.vfov / 2.0)

    node_world = []
    for node in scene.nodes:
        wpos, wnrm, uv, vcol, tex, use_tex = _node_arrays(node)
        node_world.append((wpos, wnrm, uv, vcol, tex, use_tex, node.mesh.triangles))

    shadow, shadow_mat, has_shadow = _build_shadow_map(scene, node_world, config)
    dir_vec, dir_int, dir_col, pt_pos, pt_int, pt_col = _light_arrays(scene)
    ambient = np.asarray(scene.ambient, dtype=np.float64)

    color = np.empty((h, w, 3), dtype=np.float32)
    color[:] = np.asarray(config.background, dtype=np.float32)
    depth = np.full((h, w), np.inf, dtype=np.float32)

    for wpos, wnrm, uv, vcol, tex, use_tex, tris in node_world:
        if len(tris) == 0 or len(wpos) == 0:
            continue
        view = wpos @ view_from_world[:3, :3].T + view_from_world[:3, 3]
        # attribute rows: [view_z, view_x, view_y, wpos, wnrm, uv, vcol]
        attr = np.concatenate(
            [view[:, 2:3], view[:, 0:1], view[:, 1:2], wpos, wnrm, uv, vcol], axis=1
        )
        tris2, attr = _clip_near(view[:, 2], tris.astype(np.int64), attr, cam.near)
        if len(tris2) == 0:
            continue
        vz = attr[:, 0]
        vdepth = -vz
        invz = 1.0 / vdepth
        px = w / 2.0 + f * attr[:, 1] * invz
        py = h / 2.0 - f * attr[:, 2] * invz
        pts = np.stack([px, py], axis=1)
        rasterize_node(
            np.ascontiguousarray(tris2),
            np.ascontiguousarray(pts),
            np.ascontiguousarray(invz),
            np.ascontiguousarray(vdepth),
            np.ascontiguousarray(attr[:, 3:6]),
            np.ascontiguousarray(attr[:, 6:9]),
            np.ascontiguousarray(attr[:, 9:11]),
            np.ascontiguousarray(attr[:, 11:14]),
            use_tex,
            tex,
            dir_vec,
            dir_int,
            dir_col,
            pt_pos,
            pt_int,
            pt_col,
            ambient,
            shadow,
            shadow_mat,
            config.shadow_bias,
            config.shadow_slope_bias,
            has_shadow,
            0,
            0,
            color,
            depth,
            cam.far,
        )

    if ss > 1:
        color = color.reshape(res, ss, res, ss, 3).mean(axis=(1, 3))
        depth = depth.reshape(res, ss, res, ss).min(axis=(1, 3))
    rgb = np.clip(np.round(color * 255.0), 0, 255).astype(np.uint8)
    return rgb, depth


def render_clip(
    scenes: list[SceneGraph],
    label: str,
    provenance: dict | None = None,
    config: RenderConfig | None = None,
) -> ClipContainer:
    """Render a scene sequence into a clip container at the config fps."""
    if not scenes:
        raise ContractError("cannot render an empty scene sequence")
    config = config or RenderConfig()
    frames = np.empty((len(scenes), config.resolution, config.resolution, 3), dtype=np.uint8)
    for i, scene in enumerate(scenes):
        frames[i], _ = render_frame(scene, config)
    return ClipContainer(
        width=config.resolution,
        height=config.resolution,
        fps=config.fps,
        label=label,
        frames=frames,
        provenance=provenance or {},
    )


@dataclass
class DepthSequence:
    """Rendered depth stream: u16 millimeters (0 = invalid/background),
    pinhole intrinsics on integer pixel indices, and per-frame
    world-from-camera poses in the computer-vision convention
    (x right, y down, z forward)."""

    frames_mm: np.ndarray  # (N, H, W) uint16
    fx: float
    fy: float
    cx: float
    cy: float
    poses: np.ndarray  # (N, 4, 4)
    fps: int = 25


_GL_TO_CV = np.diag([1.0, -1.0, -1.0, 1.0])


def camera_pose_cv(camera: Camera) -> np.ndarray:
    """World-from-camera with CV axes (x right, y down, z forward)."""
    return camera.pose @ _GL_TO_CV


def render_depth_sequence(scenes: list[SceneGraph], config: RenderConfig | None = None) -> DepthSequence:
    """Depth render of a scene sequence, in u16 millimeters."""
    if not scenes:
        raise ContractError("cannot render an empty scene sequence")
    config = config or RenderConfig()
    far = scenes[0].camera.far
    if far >= 65.535:
        raise ConfigError(f"far plane {far} m does not fit u16 millimeters")
    res = config.resolution
    frames = np.zeros((len(scenes), res, res), dtype=np.uint16)
    poses = np.zeros((len(scenes), 4, 4))
    # depth pass ignores supersampling: geometry, not shading
    cfg = RenderConfig(
        resolution=res, fps=config.fps, supersample=False, shadows=False
    )
    for i, scene in enumerate(scenes):
        _, depth = render_frame(scene, cfg)
        mm = np.where(np.isfinite(depth), np.round(depth * 1000.0), 0.0)
        frames[i] = np.clip(mm, 0, 65535).astype(np.uint16)
        poses[i] = camera_pose_cv(scene.camera)
    f = (res / 2.0) / np.tan(scenes[0].camera.vfov / 2.0)
    c = res / 2.0 - 0.5
    return DepthSequence(frames, fx=f, fy=f, cx=c, cy=c, poses=poses, fps=config.fps)
