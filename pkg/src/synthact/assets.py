"""Procedural stand-in assets.

Real deployments point the pipeline at their own wall images,
environment models and reconstructed scenes; these generators provide
deterministic placeholders so the engine runs (and tests run) with no
external downloads: six wall background textures (three indoor-ish,
three outdoor-ish) and a furnished living-room environment.
"""

from __future__ import annotations

import numpy as np

from .formats.mesh import Mesh, Texture, compute_vertex_normals
from .formats.motion import MotionTake
from .body import SkinnedBody, make_procedural_humanoid
from .rng import SplitMix64
from .scene import SceneNode


def _value_noise(shape, cell, seed, octaves=3):
    """Cheap deterministic multi-octave value noise in [0, 1]."""
    rng = np.random.default_rng(seed)
    out = np.zeros(shape)
    amp_total = 0.0
    for o in range(octaves):
        step = max(2, cell // (2**o))
        gh, gw = shape[0] // step + 2, shape[1] // step + 2
        grid = rng.random((gh, gw))
        ys = np.arange(shape[0]) / step
        xs = np.arange(shape[1]) / step
        y0 = ys.astype(int)
        x0 = xs.astype(int)
        fy = (ys - y0)[:, None]
        fx = (xs - x0)[None, :]
        a = grid[y0][:, x0]
        b = grid[y0][:, x0 + 1]
        c = grid[y0 + 1][:, x0]
        d = grid[y0 + 1][:, x0 + 1]
        amp = 0.5**o
        out += amp * ((a * (1 - fx) + b * fx) * (1 - fy) + (c * (1 - fx) + d * fx) * fy)
        amp_total += amp
    return out / amp_total


def _indoor_texture(size, seed) -> Texture:
    rng = SplitMix64(seed)
    base = np.array([rng.uniform(0.55, 0.85), rng.uniform(0.5, 0.8), rng.uniform(0.45, 0.75)])
    img = np.ones((size, size, 3)) * base
    noise = _value_noise((size, size), size // 8, seed)[..., None]
    img = img * (0.85 + 0.3 * noise)
    # skirting board and a picture frame
    img[int(size * 0.88):, :] *= np.array([0.55, 0.45, 0.38]) / base
    x0, x1 = int(size * rng.uniform(0.1, 0.35)), int(size * rng.uniform(0.55, 0.8))
    y0, y1 = int(size * 0.18), int(size * 0.52)
    img[y0:y1, x0:x1] = np.array([rng.uniform(0.2, 0.9), rng.uniform(0.2, 0.9), rng.uniform(0.2, 0.9)])
    img[y0 : y0 + 4, x0:x1] = 0.15
    img[y1 - 4 : y1, x0:x1] = 0.15
    img[y0:y1, x0 : x0 + 4] = 0.15
    img[y0:y1, x1 - 4 : x1] = 0.15
    return Texture.from_array(np.clip(img * 255, 0, 255).astype(np.uint8))


def _outdoor_texture(size, seed) -> Texture:
    rng = SplitMix64(seed)
    img = np.zeros((size, size, 3))
    ys = np.linspace(0, 1, size)[:, None]
    sky_top = np.array([0.35, 0.55, 0.95])
    sky_bot = np.array([0.75, 0.85, 1.0])
    img[:] = sky_top + (sky_bot - sky_top) * ys[..., None]
    horizon = int(size * rng.uniform(0.55, 0.7))
    ground = np.array([rng.uniform(0.25, 0.45), rng.uniform(0.45, 0.65), rng.uniform(0.15, 0.3)])
    img[horizon:] = ground
    noise = _value_noise((size, size), size // 6, seed + 7)[..., None]
    img[horizon:] *= 0.8 + 0.4 * noise[horizon:]
    # sun and a couple of tree blobs
    sx, sy = int(size * rng.uniform(0.15, 0.85)), int(size * rng.uniform(0.1, 0.3))
    yy, xx = np.mgrid[0:size, 0:size]
    sun = (xx - sx) ** 2 + (yy - sy) ** 2 < (size * 0.06) ** 2
    img[sun] = (1.0, 0.95, 0.6)
    for _ in range(3):
        tx = int(size * rng.uniform(0.05, 0.95))
        th = int(size * rng.uniform(0.12, 0.2))
        blob = (xx - tx) ** 2 + ((yy - horizon) * 1.6) ** 2 < th**2
        img[blob & (yy <= horizon)] = (0.15, rng.uniform(0.3, 0.5), 0.12)
    return Texture.from_array(np.clip(img * 255, 0, 255).astype(np.uint8))


def make_wall_textures(size: int = 512, seed: int = 9000) -> list[Texture]:
    """Six deterministic wall backgrounds: indices 0-2 indoor, 3-5 outdoor."""
    return [_indoor_texture(size, seed + i) for i in range(3)] + [
        _outdoor_texture(size, seed + 100 + i) for i in range(3)
    ]


def _quad(p0, p1, p2, p3):
    verts = np.array([p0, p1, p2, p3], dtype=np.float64)
    tris = np.array([[0, 1, 2], [0, 2, 3]], dtype=np.int32)
    uvs = np.array([[0, 0], [1, 0], [1, 1], [0, 1]], dtype=np.float64)
    normals = compute_vertex_normals(verts, tris)
    return Mesh(verts, normals, tris, uvs=uvs)


def _box(center, size, color) -> Mesh:
    cx, cy, cz = center
    sx, sy, sz = np.asarray(size) / 2.0
    corners = np.array(
        [
            [cx - sx, cy - sy, cz - sz],
            [cx + sx, cy - sy, cz - sz],
            [cx + sx, cy + sy, cz - sz],
            [cx - sx, cy + sy, cz - sz],
            [cx - sx, cy - sy, cz + sz],
            [cx + sx, cy - sy, cz + sz],
            [cx + sx, cy + sy, cz + sz],
            [cx - sx, cy + sy, cz + sz],
        ]
    )
    faces = [
        (0, 3, 2, 1),  # back  (-z)
        (4, 5, 6, 7),  # front (+z)
        (0, 1, 5, 4),  # bottom
        (3, 7, 6, 2),  # top
        (0, 4, 7, 3),  # left
        (1, 2, 6, 5),  # right
    ]
    verts, tris = [], []
    for face in faces:
        base = len(verts)
        verts.extend(corners[list(face)])
        tris.append([base, base + 1, base + 2])
        tris.append([base, base + 2, base + 3])
    verts = np.asarray(verts)
    tris = np.asarray(tris, dtype=np.int32)
    colors = np.tile(color, (len(verts), 1))
    return Mesh(verts, compute_vertex_normals(verts, tris), tris, colors=colors)


def _checker_texture(size=256, n=8, c0=(0.72, 0.66, 0.58), c1=(0.45, 0.38, 0.33)) -> Texture:
    yy, xx = np.mgrid[0:size, 0:size]
    checks = ((xx * n // size) + (yy * n // size)) % 2
    img = np.where(checks[..., None] == 0, c0, c1)
    return Texture.from_array((img * 255).astype(np.uint8))


def _poster_texture(size=256, seed=7) -> Texture:
    noise = _value_noise((size, size), size // 5, seed)
    img = np.stack([0.75 + 0.2 * noise, 0.72 + 0.2 * noise, 0.65 + 0.25 * noise], axis=-1)
    # high-contrast blocks give the intensity corners feature matching needs
    rng = SplitMix64(seed)
    for _ in range(6):
        x0 = rng.randint(size - 60)
        y0 = rng.randint(size - 60)
        w = 24 + rng.randint(36)
        h = 24 + rng.randint(36)
        img[y0 : y0 + h, x0 : x0 + w] = (rng.uniform(0.05, 0.95), rng.uniform(0.05, 0.95), rng.uniform(0.05, 0.95))
    return Texture.from_array(np.clip(img * 255, 0, 255).astype(np.uint8))


ROOM_HALF = 3.0  # 6 x 6 m living room
ROOM_HEIGHT = 2.8


def make_room(seed: int = 4000) -> list[SceneNode]:
    """Furnished living-room fixture.

    The floor's top surface sits 1 mm below y = 0 so a body standing at
    the origin never z-fights it. Wall and ceiling nodes are colorable
    (they are the recolorable "background"); furniture is not.
    """
    r, ht = ROOM_HALF, ROOM_HEIGHT
    eps = 0.001
    nodes = []

    floor = _quad((-r, -eps, r), (r, -eps, r), (r, -eps, -r), (-r, -eps, -r))
    nodes.append(SceneNode(floor, np.eye(4), name="floor", texture=_checker_texture()))

    walls = [
        ("wall_n", (-r, 0, -r), (r, 0, -r), (r, ht, -r), (-r, ht, -r)),
        ("wall_s", (r, 0, r), (-r, 0, r), (-r, ht, r), (r, ht, r)),
        ("wall_e", (r, 0, -r), (r, 0, r), (r, ht, r), (r, ht, -r)),
        ("wall_w", (-r, 0, r), (-r, 0, -r), (-r, ht, -r), (-r, ht, r)),
    ]
    for i, (name, *pts) in enumerate(walls):
        mesh = _quad(*pts)
        nodes.append(
            SceneNode(mesh, np.eye(4), name=name, texture=_poster_texture(seed=seed + i), colorable=True)
        )

    ceiling = _quad((-r, ht, -r), (r, ht, -r), (r, ht, r), (-r, ht, r))
    ceiling.colors = np.tile((0.92, 0.92, 0.9), (ceiling.num_vertices, 1))
    nodes.append(SceneNode(ceiling, np.eye(4), name="ceiling", colorable=True))

    furniture = [
        ("table_top", (1.7, 0.72, -1.3), (1.3, 0.06, 0.8), (0.55, 0.36, 0.24)),
        ("table_leg1", (1.15, 0.345, -1.65), (0.08, 0.69, 0.08), (0.4, 0.26, 0.17)),
        ("table_leg2", (2.25, 0.345, -1.65), (0.08, 0.69, 0.08), (0.4, 0.26, 0.17)),
        ("table_leg3", (1.15, 0.345, -0.95), (0.08, 0.69, 0.08), (0.4, 0.26, 0.17)),
        ("table_leg4", (2.25, 0.345, -0.95), (0.08, 0.69, 0.08), (0.4, 0.26, 0.17)),
        ("sofa_seat", (-1.9, 0.25, 1.2), (1.8, 0.5, 0.85), (0.5, 0.2, 0.2)),
        ("sofa_back", (-1.9, 0.75, 1.55), (1.8, 0.6, 0.22), (0.45, 0.17, 0.17)),
        ("shelf", (-2.6, 0.9, -1.8), (0.5, 1.8, 0.9), (0.3, 0.34, 0.4)),
        ("crate", (0.9, 0.25, 1.9), (0.5, 0.5, 0.5), (0.65, 0.55, 0.3)),
    ]
    for name, center, size, color in furniture:
        nodes.append(SceneNode(_box(center, size, color), np.eye(4), name=name))
    return nodes


def recon_scene_nodes(mesh: Mesh, scene_id: str) -> list[SceneNode]:
    """Wrap a reconstructed (vertex-colored) mesh as a room environment."""
    return [SceneNode(mesh, np.eye(4), name=f"recon:{scene_id}")]


def default_assets():
    """Full procedural asset bundle: body, takes, walls, room."""
    from .augment import AssetBundle

    body, takes = make_procedural_humanoid()
    return (
        AssetBundle(
            body=body,
            wall_textures=make_wall_textures(),
            environment=make_room(),
            recon_scenes={},
        ),
        takes,
    )
