"""Motion takes and rig serialization (JSON).

A motion take file carries per-frame axis-angle joint rotations:

    {
      "subject": "S01",
      "label": "walking",              # one of the three action classes
      "fps": 25.0,
      "joints": ["root", "pelvis", ...],
      "frames": [
        {"rotations": [[ax, ay, az], ...], "root_translation": [0, 0, 0]},
        ...
      ]
    }

A rig file (the companion "rig JSON") carries the skeleton, template
mesh and skinning weights; see write_rig for the exact field list.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import ParseError, StructuralError, ValidationError

ACTIONS = ("walking", "sitting_down", "hand_waving")


@dataclass
class PoseFrame:
    """Axis-angle rotation per joint (radians) plus a root translation."""

    joint_rotations: np.ndarray  # (J, 3) float64
    root_translation: np.ndarray  # (3,) float64, fixed to zero in v1

    def __post_init__(self):
        self.joint_rotations = np.ascontiguousarray(self.joint_rotations, dtype=np.float64).reshape(-1, 3)
        self.root_translation = np.ascontiguousarray(self.root_translation, dtype=np.float64).reshape(3)


@dataclass
class MotionTake:
    subject_id: str
    action_label: str
    fps: float
    joint_names: list[str]
    frames: list[PoseFrame]

    def validate(self) -> "MotionTake":
        if self.action_label not in ACTIONS:
            raise ValidationError(
                f"unknown action label {self.action_label!r}; expected one of {ACTIONS}"
            )
        if self.fps <= 0:
            raise ValidationError("fps must be positive")
        if len(self.frames) < 2:
            raise ValidationError("a motion take needs at least 2 frames")
        n = len(self.joint_names)
        for i, frame in enumerate(self.frames):
            if frame.joint_rotations.shape[0] != n:
                raise StructuralError(
                    f"frame {i} has {frame.joint_rotations.shape[0]} rotations for {n} joints"
                )
            if not np.all(np.isfinite(frame.joint_rotations)):
                raise StructuralError(f"frame {i} has non-finite rotations")
        return self

    @property
    def frame_count(self) -> int:
        return len(self.frames)


def parse_motion_take(data: bytes) -> MotionTake:
    try:
        doc = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise ParseError(f"motion take is not valid JSON: {e}") from e
    try:
        joints = list(doc["joints"])
        frames = [
            PoseFrame(
                np.asarray(f["rotations"], dtype=np.float64),
                np.asarray(f.get("root_translation", (0.0, 0.0, 0.0)), dtype=np.float64),
            )
            for f in doc["frames"]
        ]
        take = MotionTake(
            subject_id=str(doc["subject"]),
            action_label=str(doc["label"]),
            fps=float(doc["fps"]),
            joint_names=joints,
            frames=frames,
        )
    except (KeyError, TypeError, ValueError) as e:
        raise ParseError(f"motion take JSON missing or malformed field: {e}") from e
    return take.validate()


def write_motion_take(take: MotionTake) -> bytes:
    take.validate()
    doc = {
        "subject": take.subject_id,
        "label": take.action_label,
        "fps": take.fps,
        "joints": list(take.joint_names),
        "frames": [
            {
                "rotations": f.joint_rotations.tolist(),
                "root_translation": f.root_translation.tolist(),
            }
            for f in take.frames
        ],
    }
    return json.dumps(doc, indent=1).encode("utf-8")


def write_rig(body) -> bytes:
    """Serialize a SkinnedBody (rig + template + weights) to JSON bytes."""
    doc = {
        "joints": [
            {
                "name": j.name,
                "parent": j.parent,
                "rotation": j.rest_rotation.tolist(),
                "translation": j.rest_translation.tolist(),
            }
            for j in body.rig.joints
        ],
        "template": {
            "vertices": body.template.vertices.tolist(),
            "triangles": body.template.triangles.tolist(),
            "colors": body.template.colors.tolist() if body.template.colors is not None else None,
        },
        "weights": [
            [[int(j), float(w)] for j, w in vertex] for vertex in body.iter_weights()
        ],
    }
    return json.dumps(doc).encode("utf-8")


def parse_rig(data: bytes):
    from ..body import Joint, SkeletonRig, SkinnedBody
    from .mesh import Mesh, compute_vertex_normals

    try:
        doc = json.loads(data.decode("utf-8"))
        joints = [
            Joint(
                name=str(j["name"]),
                parent=int(j["parent"]),
                rest_rotation=np.asarray(j["rotation"], dtype=np.float64),
                rest_translation=np.asarray(j["translation"], dtype=np.float64),
            )
            for j in doc["joints"]
        ]
        vertices = np.asarray(doc["template"]["vertices"], dtype=np.float64)
        triangles = np.asarray(doc["template"]["triangles"], dtype=np.int32)
        colors = doc["template"].get("colors")
        template = Mesh(
            vertices,
            compute_vertex_normals(vertices, triangles),
            triangles,
            colors=np.asarray(colors, dtype=np.float64) if colors is not None else None,
        )
        weights = [[(int(j), float(w)) for j, w in vertex] for vertex in doc["weights"]]
    except (KeyError, TypeError, ValueError) as e:
        raise ParseError(f"rig JSON missing or malformed field: {e}") from e
    return SkinnedBody.from_weight_lists(SkeletonRig(joints), template, weights)
