"""Scene graph assembly: wall scenes, room scenes, camera/light orbits
and flat background recoloring.

Scenes are immutable snapshots; every operation returns a new
SceneGraph that shares mesh data with its input.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .body import ContractError, body_height
from .formats.errors import ValidationError
from .formats.mesh import Mesh, Texture
from .mathx import (
    look_at,
    rigid_inverse,
    rotation_y,
    rotation_y_about,
    scaling,
    transform_directions,
    transform_points,
    translation,
)

# The named palette: 12 distinct colors (the source list names yellow
# twice). Values follow the CSS color table; "offwhite" is linen.
PALETTE: dict[str, tuple[float, float, float]] = {
    "pink": (1.0, 0.753, 0.796),
    "purple": (0.502, 0.0, 0.502),
    "cyan": (0.0, 1.0, 1.0),
    "red": (1.0, 0.0, 0.0),
    "green": (0.0, 0.502, 0.0),
    "yellow": (1.0, 1.0, 0.0),
    "brown": (0.647, 0.165, 0.165),
    "blue": (0.0, 0.0, 1.0),
    "offwhite": (0.980, 0.941, 0.902),
    "white": (1.0, 1.0, 1.0),
    "orange": (1.0, 0.647, 0.0),
    "grey": (0.502, 0.502, 0.502),
}


@dataclass
class Camera:
    vfov: float  # vertical field of view, radians
    aspect: float
    near: float
    far: float
    pose: np.ndarray  # world-from-camera, camera looks down its -Z

    def __post_init__(self):
        if not 0.0 < self.vfov < np.pi:
            raise ValidationError(f"vfov {self.vfov} outside (0, pi)")
        if not 0.0 < self.near < self.far:
            raise ValidationError(f"near/far ({self.near}, {self.far}) invalid")
        self.pose = np.asarray(self.pose, dtype=np.float64).reshape(4, 4)


@dataclass
class Light:
    kind: str  # "directional" | "point"
    vector: np.ndarray  # direction of travel (unit) or position
    intensity: float = 1.0
    color: tuple[float, float, float] = (1.0, 1.0, 1.0)

    def __post_init__(self):
        self.vector = np.asarray(self.vector, dtype=np.float64).reshape(3)
        if self.kind not in ("directional", "point"):
            raise ValidationError(f"unknown light kind {self.kind!r}")
        if self.intensity < 0:
            raise ValidationError("light intensity must be >= 0")
        if self.kind == "directional":
            n = np.linalg.norm(self.vector)
            if n < 1e-12:
                raise ValidationError("directional light needs a nonzero direction")
            self.vector = self.vector / n


@dataclass
class SceneNode:
    mesh: Mesh
    transform: np.ndarray
    name: str = ""
    texture: Texture | None = None
    color_override: tuple[float, float, float] | None = None
    colorable: bool = False

    def __post_init__(self):
        self.transform = np.asarray(self.transform, dtype=np.float64).reshape(4, 4)


@dataclass
class SceneGraph:
    nodes: list[SceneNode]
    camera: Camera
    lights: list[Light]
    ambient: tuple[float, float, float] = (0.25, 0.25, 0.25)
    body_index: int = 0

    def body_node(self) -> SceneNode:
        return self.nodes[self.body_index]

    def body_anchor(self) -> np.ndarray:
        """World position of the body node's origin (its vertical axis)."""
        return self.nodes[self.body_index].transform[:3, 3].copy()


DEFAULT_VFOV = np.deg2rad(45.0)
DEFAULT_NEAR = 0.1
DEFAULT_FAR = 50.0
BODY_FRAME_FILL = 0.75  # fraction of image height the default body spans


def framing_distance(height: float, vfov: float = DEFAULT_VFOV, fill: float = BODY_FRAME_FILL) -> float:
    """Camera distance at which an object of the given height spans
    ``fill`` of the frame height."""
    return height / (2.0 * fill * np.tan(vfov / 2.0))


def default_camera(body_h: float, anchor=(0.0, 0.0, 0.0)) -> Camera:
    anchor = np.asarray(anchor, dtype=np.float64)
    d = framing_distance(body_h)
    center = anchor + (0.0, 0.5 * body_h, 0.0)
    eye = center + (0.0, 0.0, d)
    return Camera(DEFAULT_VFOV, 1.0, DEFAULT_NEAR, DEFAULT_FAR, look_at(eye, center))


def model_view(scene: SceneGraph, node_index: int) -> np.ndarray:
    """View-from-model matrix for one node, in a fixed association order."""
    return rigid_inverse(scene.camera.pose) @ scene.nodes[node_index].transform


def _wall_quad(camera: Camera, wall_z: float, margin: float = 1.2) -> Mesh:
    """Textured quad at world z = wall_z, sized to cover the frustum."""
    eye_z = camera.pose[2, 3]
    depth = eye_z - wall_z
    half_h = np.tan(camera.vfov / 2.0) * depth * margin
    half_w = half_h * camera.aspect
    cy = camera.pose[1, 3]
    verts = np.array(
        [
            [-half_w, cy - half_h, wall_z],
            [half_w, cy - half_h, wall_z],
            [half_w, cy + half_h, wall_z],
            [-half_w, cy + half_h, wall_z],
        ]
    )
    normals = np.tile((0.0, 0.0, 1.0), (4, 1))
    uvs = np.array([[0.0, 1.0], [1.0, 1.0], [1.0, 0.0], [0.0, 0.0]])
    tris = np.array([[0, 1, 2], [0, 2, 3]], dtype=np.int32)
    return Mesh(verts, normals, tris, uvs=uvs)


DEFAULT_SUN = Light("directional", (0.35, -0.55, -1.0), intensity=1.0)


def build_wall_scene(
    background: Texture,
    body_mesh: Mesh,
    rotation_deg: float = 0.0,
    placement: tuple[float, float, float] = (0.0, 0.0, 1.0),
    body_h: float | None = None,
) -> SceneGraph:
    """Textured back wall + body in front, camera framing the default body.

    ``placement`` is (dx, dy, scale) in meters/unitless, applied as
    translate-then-scale about the body origin. ``body_h`` fixes the
    camera framing height; defaults to the height of ``body_mesh``.
    """
    if background is None:
        raise ContractError("wall scene needs a background texture")
    if not -90.0 <= rotation_deg <= 90.0:
        raise ContractError(f"rotation {rotation_deg} outside [-90, 90] degrees")
    dx, dy, s = placement
    h = body_h if body_h is not None else body_height(body_mesh)

    camera = default_camera(h)
    body_xf = translation((dx, dy, 0.0)) @ scaling(s) @ rotation_y(np.deg2rad(rotation_deg))
    body_node = SceneNode(body_mesh, body_xf, name="body")

    wall_z = -1.2 - 0.4 * max(0.0, s - 1.0)
    wall = _wall_quad(camera, wall_z)
    wall_node = SceneNode(wall, np.eye(4), name="wall", texture=background)

    return SceneGraph(
        nodes=[body_node, wall_node],
        camera=camera,
        lights=[replace(DEFAULT_SUN)],
        body_index=0,
    )


def build_room_scene(
    environment: list[SceneNode],
    body_mesh: Mesh,
    anchor: np.ndarray | None = None,
    body_h: float | None = None,
) -> SceneGraph:
    """Body placed at a configured anchor inside an environment."""
    anchor = np.eye(4) if anchor is None else np.asarray(anchor, dtype=np.float64)
    h = body_h if body_h is not None else body_height(body_mesh)

    if environment:
        lo = np.full(3, np.inf)
        hi = np.full(3, -np.inf)
        for node in environment:
            pts = transform_points(node.transform, node.mesh.vertices)
            lo = np.minimum(lo, pts.min(axis=0))
            hi = np.maximum(hi, pts.max(axis=0))
        p = anchor[:3, 3]
        if np.any(p < lo) or np.any(p > hi):
            warnings.warn(
                f"body anchor {p.tolist()} lies outside the environment bounds",
                stacklevel=2,
            )

    body_node = SceneNode(body_mesh, anchor, name="body")
    camera = default_camera(h, anchor=anchor[:3, 3])
    sun = replace(DEFAULT_SUN)
    fill = Light("point", anchor[:3, 3] + (1.1, 2.3, 1.0), intensity=0.35)
    nodes = [body_node] + list(environment)
    return SceneGraph(nodes=nodes, camera=camera, lights=[sun, fill], body_index=0)


def orbit_camera_and_light(scene: SceneGraph, angle_deg: float) -> SceneGraph:
    """Rotate the camera and all lights rigidly about the body's vertical
    axis; the body node itself is untouched."""
    if not -90.0 <= angle_deg <= 90.0:
        raise ContractError(f"orbit angle {angle_deg} outside [-90, 90] degrees")
    pivot = scene.body_anchor()
    rot = rotation_y_about(np.deg2rad(angle_deg), pivot)
    camera = replace(scene.camera, pose=rot @ scene.camera.pose)
    lights = []
    for light in scene.lights:
        if light.kind == "directional":
            lights.append(replace(light, vector=transform_directions(rot, light.vector)))
        else:
            lights.append(replace(light, vector=transform_points(rot, light.vector[None])[0]))
    return replace(scene, camera=camera, lights=lights)


def translate_camera_and_light(scene: SceneGraph, delta_world) -> SceneGraph:
    """Move the camera rig (camera + lights) by a world-space offset."""
    delta = np.asarray(delta_world, dtype=np.float64).reshape(3)
    pose = scene.camera.pose.copy()
    pose[:3, 3] += delta
    lights = []
    for light in scene.lights:
        if light.kind == "point":
            lights.append(replace(light, vector=light.vector + delta))
        else:
            lights.append(light)
    return replace(scene, camera=replace(scene.camera, pose=pose), lights=lights)


def set_background_color(scene: SceneGraph, color_name: str) -> SceneGraph:
    """Apply a flat palette color to every node flagged colorable."""
    if color_name not in PALETTE:
        raise ValidationError(
            f"unknown background color {color_name!r}; expected one of {sorted(PALETTE)}"
        )
    rgb = PALETTE[color_name]
    nodes = [
        replace(n, color_override=rgb) if n.colorable else n for n in scene.nodes
    ]
    return replace(scene, nodes=nodes)
