"""The five augmentation strategies.

Each strategy turns one motion take into a differently varied clip:

  BG+R    textured back wall, body rotated by a random angle
  BG+R2T  textured back wall, body translated by (h*x, h*y) then scaled by s
  3D+R    3D room, recolored background, camera+light orbited by a random angle
  3D+M    3D room, camera+light translating and orbiting linearly over the clip
  R3D+R   reconstructed scene mesh as the room, camera+light orbited

Sampling is driven entirely by a seeded deterministic generator; all
ranges are uniform: angles in [-90, 90] degrees, s in [0.7, 1.3],
x in [-0.5, 0.5], y in [-0.1, 0.1].
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, fields

import numpy as np

from .body import ContractError, SkinnedBody, body_height, lbs_pose
from .formats.errors import ValidationError
from .formats.mesh import Texture
from .formats.motion import MotionTake
from .rng import SplitMix64
from .scene import (
    PALETTE,
    SceneGraph,
    SceneNode,
    build_room_scene,
    build_wall_scene,
    orbit_camera_and_light,
    set_background_color,
    translate_camera_and_light,
)


class Method(str, enum.Enum):
    BG_R = "BG+R"
    BG_R2T = "BG+R2T"
    THREED_R = "3D+R"
    THREED_M = "3D+M"
    R3D_R = "R3D+R"

    def __str__(self) -> str:  # manifest/path friendly
        return self.value


class ConfigurationError(ValueError):
    """A method was requested without the assets it needs."""


N_BACKGROUNDS = 6  # three indoor + three outdoor wall images

_COLOR_NAMES = sorted(PALETTE)


@dataclass
class AugmentSpec:
    """Sampled parameters of one augmentation strategy.

    Only the fields of the active method are set; everything else stays
    None. Angles are degrees, s is a unitless scale, x/y are fractions
    of the body height.
    """

    method: Method
    seed: int
    theta: float | None = None  # BG+R, 3D+R, R3D+R
    background_index: int | None = None  # BG+R, BG+R2T
    s: float | None = None  # BG+R2T
    x: float | None = None  # BG+R2T
    y: float | None = None  # BG+R2T
    color_name: str | None = None  # 3D+R
    x1: float | None = None  # 3D+M
    x2: float | None = None
    y1: float | None = None
    y2: float | None = None
    theta1: float | None = None
    theta2: float | None = None
    scene_id: str | None = None  # R3D+R

    _FIELDS_BY_METHOD = {
        Method.BG_R: ("theta", "background_index"),
        Method.BG_R2T: ("background_index", "s", "x", "y"),
        Method.THREED_R: ("theta", "color_name"),
        Method.THREED_M: ("x1", "x2", "y1", "y2", "theta1", "theta2"),
        Method.R3D_R: ("theta", "scene_id"),
    }

    def validate(self) -> "AugmentSpec":
        active = self._FIELDS_BY_METHOD[self.method]
        for f in fields(self):
            if f.name in ("method", "seed"):
                continue
            value = getattr(self, f.name)
            if f.name in active:
                if value is None:
                    raise ValidationError(f"{self.method} spec missing field {f.name}")
            elif value is not None:
                raise ValidationError(f"{self.method} spec must not set field {f.name}")
        for name in ("theta", "theta1", "theta2"):
            v = getattr(self, name)
            if v is not None and not -90.0 <= v <= 90.0:
                raise ValidationError(f"{name}={v} outside [-90, 90]")
        if self.s is not None and not 0.7 <= self.s <= 1.3:
            raise ValidationError(f"s={self.s} outside [0.7, 1.3]")
        for name in ("x", "x1", "x2"):
            v = getattr(self, name)
            if v is not None and not -0.5 <= v <= 0.5:
                raise ValidationError(f"{name}={v} outside [-0.5, 0.5]")
        for name in ("y", "y1", "y2"):
            v = getattr(self, name)
            if v is not None and not -0.1 <= v <= 0.1:
                raise ValidationError(f"{name}={v} outside [-0.1, 0.1]")
        if self.background_index is not None and not 0 <= self.background_index < N_BACKGROUNDS:
            raise ValidationError(f"background_index={self.background_index} outside 0..{N_BACKGROUNDS - 1}")
        if self.color_name is not None and self.color_name not in PALETTE:
            raise ValidationError(f"unknown color {self.color_name!r}")
        return self

    def to_json(self) -> dict:
        doc = {"method": self.method.value, "seed": self.seed}
        for f in fields(self):
            if f.name in ("method", "seed"):
                continue
            value = getattr(self, f.name)
            if value is not None:
                doc[f.name] = value
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "AugmentSpec":
        kwargs = dict(doc)
        kwargs["method"] = Method(kwargs["method"])
        return cls(**kwargs).validate()


def sample_spec(method: Method, rng: SplitMix64, scene_ids: tuple[str, ...] = ("scene0",)) -> AugmentSpec:
    """Draw one spec for the given method; all values uniform over their
    stated ranges. The draw order per method is fixed."""
    method = Method(method)
    spec = AugmentSpec(method=method, seed=rng.seed)
    if method == Method.BG_R:
        spec.theta = rng.uniform(-90.0, 90.0)
        spec.background_index = rng.randint(N_BACKGROUNDS)
    elif method == Method.BG_R2T:
        spec.background_index = rng.randint(N_BACKGROUNDS)
        spec.s = rng.uniform(0.7, 1.3)
        spec.x = rng.uniform(-0.5, 0.5)
        spec.y = rng.uniform(-0.1, 0.1)
    elif method == Method.THREED_R:
        spec.theta = rng.uniform(-90.0, 90.0)
        spec.color_name = rng.choice(_COLOR_NAMES)
    elif method == Method.THREED_M:
        spec.x1 = rng.uniform(-0.5, 0.5)
        spec.x2 = rng.uniform(-0.5, 0.5)
        spec.y1 = rng.uniform(-0.1, 0.1)
        spec.y2 = rng.uniform(-0.1, 0.1)
        spec.theta1 = rng.uniform(-90.0, 90.0)
        spec.theta2 = rng.uniform(-90.0, 90.0)
    elif method == Method.R3D_R:
        spec.theta = rng.uniform(-90.0, 90.0)
        spec.scene_id = rng.choice(tuple(scene_ids))
    return spec.validate()


def body_placement(spec: AugmentSpec, h: float) -> tuple[tuple[float, float], float]:
    """BG+R2T placement: translation (h*x, h*y) in meters, then scale s
    about the body origin."""
    if spec.method != Method.BG_R2T:
        raise ContractError(f"body_placement applies to BG+R2T, not {spec.method}")
    if h <= 0:
        raise ContractError("body height must be positive")
    return (h * spec.x, h * spec.y), spec.s


def camera_track(spec: AugmentSpec, frame_index: int, frame_count: int, h: float = 1.0):
    """3D+M per-frame camera state: linear interpolation of the body's
    apparent offset ((x1*h, y1*h) -> (x2*h, y2*h)) and orbit angle
    (theta1 -> theta2) over the clip."""
    if spec.method != Method.THREED_M:
        raise ContractError(f"camera_track applies to 3D+M, not {spec.method}")
    if frame_count < 2:
        raise ContractError("camera track needs at least 2 frames")
    if not 0 <= frame_index < frame_count:
        raise ContractError(f"frame index {frame_index} outside [0, {frame_count})")
    t = frame_index / (frame_count - 1)
    ox = ((1.0 - t) * spec.x1 + t * spec.x2) * h
    oy = ((1.0 - t) * spec.y1 + t * spec.y2) * h
    angle = (1.0 - t) * spec.theta1 + t * spec.theta2
    return (ox, oy), angle


@dataclass
class AssetBundle:
    """Everything realize() needs: the body, wall textures, the room
    environment nodes, and reconstructed scene meshes by id."""

    body: SkinnedBody
    wall_textures: list[Texture]
    environment: list[SceneNode]
    recon_scenes: dict[str, list[SceneNode]]

    def scene_ids(self) -> tuple[str, ...]:
        return tuple(sorted(self.recon_scenes))


def realize(spec: AugmentSpec, assets: AssetBundle, take: MotionTake) -> list[SceneGraph]:
    """Build the per-frame scene sequence for one sampled spec."""
    spec.validate()
    n = take.frame_count
    meshes = [lbs_pose(assets.body, take.frames[i]) for i in range(n)]
    h = body_height(meshes[0])  # first-frame posed height drives framing

    if spec.method in (Method.BG_R, Method.BG_R2T):
        if spec.background_index >= len(assets.wall_textures):
            raise ConfigurationError(
                f"{spec.method} needs wall texture {spec.background_index}; "
                f"only {len(assets.wall_textures)} available"
            )
        tex = assets.wall_textures[spec.background_index]
        if spec.method == Method.BG_R:
            return [
                build_wall_scene(tex, m, rotation_deg=spec.theta, body_h=h) for m in meshes
            ]
        (dx, dy), s = body_placement(spec, h)
        return [
            build_wall_scene(tex, m, placement=(dx, dy, s), body_h=h) for m in meshes
        ]

    if spec.method in (Method.THREED_R, Method.THREED_M):
        env = assets.environment
        if not env:
            raise ConfigurationError(f"{spec.method} needs a room environment")
    else:  # R3D+R
        env = assets.recon_scenes.get(spec.scene_id)
        if env is None:
            raise ConfigurationError(
                f"R3D+R needs reconstructed scene {spec.scene_id!r}; "
                f"available: {sorted(assets.recon_scenes)}"
            )

    scenes = []
    for i, m in enumerate(meshes):
        scene = build_room_scene(env, m, body_h=h)
        if spec.method == Method.THREED_R:
            scene = set_background_color(scene, spec.color_name)
            scene = orbit_camera_and_light(scene, spec.theta)
        elif spec.method == Method.THREED_M:
            (ox, oy), angle = camera_track(spec, i, n, h)
            scene = orbit_camera_and_light(scene, angle)
            # Displacing the camera rig by -offset in its own right/up
            # axes puts the body at view coordinates (+ox, +oy).
            right = scene.camera.pose[:3, 0]
            up = scene.camera.pose[:3, 1]
            scene = translate_camera_and_light(scene, -ox * right - oy * up)
        else:
            scene = orbit_camera_and_light(scene, spec.theta)
        scenes.append(scene)
    return scenes
