"""Skinned humanoid body: kinematic rig, forward kinematics and linear
blend skinning, plus a deterministic procedural test humanoid with one
hand-authored motion take per action class.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .formats.errors import StructuralError, ValidationError
from .formats.mesh import Mesh, compute_vertex_normals
from .formats.motion import MotionTake, PoseFrame
from .mathx import axis_angle_matrix, translation

MAX_INFLUENCES = 4


class ContractError(ValueError):
    """A caller violated an operation precondition."""


@dataclass
class Joint:
    name: str
    parent: int  # -1 for the root
    rest_rotation: np.ndarray  # axis-angle (3,)
    rest_translation: np.ndarray  # (3,) meters

    def rest_local(self) -> np.ndarray:
        m = axis_angle_matrix(self.rest_rotation)
        m[:3, 3] = self.rest_translation
        return m


@dataclass
class SkeletonRig:
    joints: list[Joint]

    def __post_init__(self):
        roots = [i for i, j in enumerate(self.joints) if j.parent < 0]
        if len(roots) != 1 or roots[0] != 0:
            raise StructuralError("rig must have exactly one root at index 0")
        for i, j in enumerate(self.joints):
            if j.parent >= i:
                raise StructuralError(f"joint {i} has parent {j.parent}; rig must be topologically sorted")

    @property
    def joint_count(self) -> int:
        return len(self.joints)

    def joint_index(self, name: str) -> int:
        for i, j in enumerate(self.joints):
            if j.name == name:
                return i
        raise KeyError(name)


@dataclass
class SkinnedBody:
    rig: SkeletonRig
    template: Mesh
    weight_joints: np.ndarray  # (V, 4) int32, padded with 0
    weight_values: np.ndarray  # (V, 4) float64, padded with 0

    def __post_init__(self):
        v = self.template.num_vertices
        self.weight_joints = np.ascontiguousarray(self.weight_joints, dtype=np.int32).reshape(v, MAX_INFLUENCES)
        self.weight_values = np.ascontiguousarray(self.weight_values, dtype=np.float64).reshape(v, MAX_INFLUENCES)

    def validate(self) -> "SkinnedBody":
        sums = self.weight_values.sum(axis=1)
        if np.any(np.abs(sums - 1.0) > 1e-6):
            raise StructuralError("skin weights must sum to 1 per vertex")
        if np.any(self.weight_values < -1e-12):
            raise StructuralError("negative skin weight")
        if self.weight_joints.min() < 0 or self.weight_joints.max() >= self.rig.joint_count:
            raise StructuralError("skin weight joint index out of range")
        self.template.validate()
        return self

    def iter_weights(self):
        """Per-vertex sparse (joint, weight) lists, zero weights dropped."""
        for j_row, w_row in zip(self.weight_joints, self.weight_values):
            yield [(int(j), float(w)) for j, w in zip(j_row, w_row) if w > 0.0]

    @classmethod
    def from_weight_lists(cls, rig: SkeletonRig, template: Mesh, weights) -> "SkinnedBody":
        v = template.num_vertices
        if len(weights) != v:
            raise StructuralError("weight list length does not match vertex count")
        wj = np.zeros((v, MAX_INFLUENCES), dtype=np.int32)
        wv = np.zeros((v, MAX_INFLUENCES), dtype=np.float64)
        for i, influences in enumerate(weights):
            if len(influences) > MAX_INFLUENCES:
                raise StructuralError(
                    f"vertex {i} has {len(influences)} influences (max {MAX_INFLUENCES})"
                )
            for k, (j, w) in enumerate(influences):
                wj[i, k] = j
                wv[i, k] = w
        return cls(rig, template, wj, wv).validate()


def identity_pose(rig: SkeletonRig) -> PoseFrame:
    return PoseFrame(np.zeros((rig.joint_count, 3)), np.zeros(3))


def forward_kinematics(rig: SkeletonRig, pose: PoseFrame) -> np.ndarray:
    """World transform per joint, shape (J, 4, 4).

    world(j) = world(parent(j)) @ rest_local(j) @ rot(pose_j), with an
    identity parent for the root; the root additionally applies the
    pose's root translation on the world side.
    """
    if pose.joint_rotations.shape[0] != rig.joint_count:
        raise ContractError(
            f"pose has {pose.joint_rotations.shape[0]} rotations for "
            f"{rig.joint_count} joints"
        )
    if not np.all(np.isfinite(pose.joint_rotations)):
        raise ContractError("pose rotations must be finite")
    out = np.empty((rig.joint_count, 4, 4))
    for i, joint in enumerate(rig.joints):
        local = joint.rest_local() @ axis_angle_matrix(pose.joint_rotations[i])
        if joint.parent < 0:
            out[i] = translation(pose.root_translation) @ local
        else:
            out[i] = out[joint.parent] @ local
    return out


def rest_transforms(rig: SkeletonRig) -> np.ndarray:
    return forward_kinematics(rig, identity_pose(rig))


def lbs_pose(body: SkinnedBody, pose: PoseFrame) -> Mesh:
    """Skin the template with linear blend skinning for one pose.

    v' = sum_k w_k T_k T_rest,k^-1 v; normals are transformed by the
    rotation parts and renormalized.
    """
    world = forward_kinematics(body.rig, pose)
    rest = rest_transforms(body.rig)
    skin = world @ np.linalg.inv(rest)  # (J, 4, 4)

    # Per-vertex blended matrix from up to 4 influences.
    gathered = skin[body.weight_joints]  # (V, 4, 4, 4)
    blended = np.einsum("vk,vkij->vij", body.weight_values, gathered)

    verts = body.template.vertices
    new_verts = np.einsum("vij,vj->vi", blended[:, :3, :3], verts) + blended[:, :3, 3]
    new_normals = np.einsum("vij,vj->vi", blended[:, :3, :3], body.template.normals)
    lens = np.linalg.norm(new_normals, axis=1, keepdims=True)
    new_normals = new_normals / np.maximum(lens, 1e-12)

    return Mesh(
        new_verts,
        new_normals,
        body.template.triangles,
        uvs=body.template.uvs,
        colors=body.template.colors,
        texture_id=body.template.texture_id,
    )


def body_height(mesh: Mesh) -> float:
    """Vertical extent (max_y - min_y) of a mesh, in meters."""
    if mesh.num_vertices == 0:
        raise ContractError("cannot measure the height of an empty mesh")
    ys = mesh.vertices[:, 1]
    return float(ys.max() - ys.min())


# ---------------------------------------------------------------------------
# Procedural test humanoid


def _tube(p0, p1, r0, r1, radial=14, rings=8):
    """Open tapered tube from p0 to p1; returns (verts, tris, ring_t)."""
    p0 = np.asarray(p0, dtype=np.float64)
    p1 = np.asarray(p1, dtype=np.float64)
    axis = p1 - p0
    length = np.linalg.norm(axis)
    axis = axis / max(length, 1e-12)
    ref = np.array([0.0, 0.0, 1.0]) if abs(axis[2]) < 0.9 else np.array([1.0, 0.0, 0.0])
    side = np.cross(axis, ref)
    side /= np.linalg.norm(side)
    up = np.cross(axis, side)

    verts = []
    ring_t = []
    for ri in range(rings):
        t = ri / (rings - 1)
        center = p0 + axis * (t * length)
        radius = r0 + (r1 - r0) * t
        for ai in range(radial):
            ang = 2.0 * np.pi * ai / radial
            verts.append(center + radius * (np.cos(ang) * side + np.sin(ang) * up))
            ring_t.append(t)
    tris = []
    for ri in range(rings - 1):
        for ai in range(radial):
            a = ri * radial + ai
            b = ri * radial + (ai + 1) % radial
            c = a + radial
            d = b + radial
            tris.append([a, b, d])
            tris.append([a, d, c])
    # end caps
    base = len(verts)
    verts.append(p0)
    verts.append(p1)
    ring_t += [0.0, 1.0]
    for ai in range(radial):
        b = (ai + 1) % radial
        tris.append([base, b, ai])
        tris.append([base + 1, (rings - 1) * radial + ai, (rings - 1) * radial + b])
    return np.asarray(verts), np.asarray(tris, dtype=np.int64), np.asarray(ring_t)


def _sphere(center, radius, rows=9, cols=14):
    center = np.asarray(center, dtype=np.float64)
    verts = [center + (0.0, radius, 0.0)]
    for ri in range(1, rows):
        phi = np.pi * ri / rows
        for ci in range(cols):
            th = 2.0 * np.pi * ci / cols
            verts.append(
                center
                + radius * np.array([np.sin(phi) * np.cos(th), np.cos(phi), np.sin(phi) * np.sin(th)])
            )
    verts.append(center + (0.0, -radius, 0.0))
    bottom = len(verts) - 1
    tris = []
    for ci in range(cols):
        tris.append([0, 1 + (ci + 1) % cols, 1 + ci])
    for ri in range(rows - 2):
        row0 = 1 + ri * cols
        row1 = row0 + cols
        for ci in range(cols):
            a, b = row0 + ci, row0 + (ci + 1) % cols
            c, d = row1 + ci, row1 + (ci + 1) % cols
            tris.append([a, b, d])
            tris.append([a, d, c])
    last = 1 + (rows - 2) * cols
    for ci in range(cols):
        tris.append([bottom, last + ci, last + (ci + 1) % cols])
    return np.asarray(verts), np.asarray(tris, dtype=np.int64)


_SKIN = (0.87, 0.68, 0.55)
_SHIRT = (0.30, 0.42, 0.65)
_PANTS = (0.25, 0.25, 0.30)


def make_procedural_humanoid() -> tuple[SkinnedBody, dict[str, MotionTake]]:
    """Deterministic low-poly humanoid (22 joints, height 1.7 m) plus one
    authored motion take per action class, at 25 fps.
    """
    J = []  # (name, parent name, offset)
    J.append(("root", None, (0.0, 0.0, 0.0)))
    J.append(("pelvis", "root", (0.0, 0.96, 0.0)))
    J.append(("spine", "pelvis", (0.0, 0.13, 0.0)))
    J.append(("chest", "spine", (0.0, 0.15, 0.0)))
    J.append(("neck", "chest", (0.0, 0.18, 0.0)))
    J.append(("head", "neck", (0.0, 0.07, 0.0)))
    for side, sx in (("l", 1.0), ("r", -1.0)):
        J.append((f"{side}_hip", "pelvis", (sx * 0.10, -0.04, 0.0)))
        J.append((f"{side}_knee", f"{side}_hip", (0.0, -0.46, 0.0)))
        J.append((f"{side}_ankle", f"{side}_knee", (0.0, -0.42, 0.0)))
        J.append((f"{side}_toe", f"{side}_ankle", (0.0, -0.03, 0.13)))
        J.append((f"{side}_shoulder", "chest", (sx * 0.21, 0.14, 0.0)))
        J.append((f"{side}_elbow", f"{side}_shoulder", (sx * 0.28, 0.0, 0.0)))
        J.append((f"{side}_wrist", f"{side}_elbow", (sx * 0.26, 0.0, 0.0)))
        J.append((f"{side}_hand", f"{side}_wrist", (sx * 0.10, 0.0, 0.0)))

    names = [name for name, _, _ in J]
    index = {name: i for i, name in enumerate(names)}
    joints = [
        Joint(
            name=name,
            parent=index[parent] if parent is not None else -1,
            rest_rotation=np.zeros(3),
            rest_translation=np.asarray(offset, dtype=np.float64),
        )
        for name, parent, offset in J
    ]
    rig = SkeletonRig(joints)
    world = rest_transforms(rig)
    pos = {name: world[index[name], :3, 3] for name in names}

    # Bones carry geometry; each is skinned to its start joint, blending
    # into the parent joint near the start of the tube.
    bones = [
        # (start joint, end point, r0, r1, color, blend parent)
        ("pelvis", pos["spine"], 0.135, 0.125, _SHIRT, None),
        ("spine", pos["chest"], 0.125, 0.13, _SHIRT, "pelvis"),
        ("chest", pos["neck"], 0.13, 0.07, _SHIRT, "spine"),
        ("neck", pos["head"], 0.045, 0.045, _SKIN, "chest"),
    ]
    for side in ("l", "r"):
        bones += [
            (f"{side}_hip", pos[f"{side}_knee"], 0.075, 0.055, _PANTS, "pelvis"),
            (f"{side}_knee", pos[f"{side}_ankle"], 0.055, 0.04, _PANTS, f"{side}_hip"),
            (f"{side}_ankle", pos[f"{side}_toe"], 0.04, 0.035, _PANTS, f"{side}_knee"),
            (f"{side}_shoulder", pos[f"{side}_elbow"], 0.05, 0.042, _SHIRT, "chest"),
            (f"{side}_elbow", pos[f"{side}_wrist"], 0.042, 0.035, _SKIN, f"{side}_shoulder"),
            (f"{side}_wrist", pos[f"{side}_hand"], 0.035, 0.028, _SKIN, f"{side}_elbow"),
        ]

    all_verts, all_tris, all_colors = [], [], []
    weights: list[list[tuple[int, float]]] = []
    offset = 0
    for start, end, r0, r1, color, blend in bones:
        verts, tris, ring_t = _tube(pos[start], end, r0, r1)
        all_verts.append(verts)
        all_tris.append(tris + offset)
        all_colors.append(np.tile(color, (len(verts), 1)))
        j = index[start]
        pj = index[blend] if blend is not None else j
        for t in ring_t:
            if blend is not None and t < 0.25:
                wp = 0.5 * (1.0 - t / 0.25)
                weights.append([(pj, wp), (j, 1.0 - wp)])
            else:
                weights.append([(j, 1.0)])
        offset += len(verts)

    head_center = pos["head"] + (0.0, 0.11, 0.0)
    verts, tris = _sphere(head_center, 0.11)
    all_verts.append(verts)
    all_tris.append(tris + offset)
    all_colors.append(np.tile(_SKIN, (len(verts), 1)))
    weights += [[(index["head"], 1.0)]] * len(verts)
    offset += len(verts)

    vertices = np.concatenate(all_verts)
    triangles = np.concatenate(all_tris)
    colors = np.concatenate(all_colors)

    # Normalize height to exactly 1.7 m with feet on y = 0. The root keeps
    # an identity rest transform (so root pose = global rigid motion); the
    # vertical shift is absorbed by the root's child.
    y_min, y_max = vertices[:, 1].min(), vertices[:, 1].max()
    scale = 1.7 / (y_max - y_min)
    vertices[:, 1] = (vertices[:, 1] - y_min) * scale
    vertices[:, 0] *= scale
    vertices[:, 2] *= scale
    for j in rig.joints:
        if j.parent < 0:
            continue
        t = j.rest_translation * scale
        if j.parent == 0:
            t[1] = (j.rest_translation[1] - y_min) * scale
        j.rest_translation = t

    template = Mesh(
        vertices,
        compute_vertex_normals(vertices, triangles),
        triangles.astype(np.int32),
        colors=colors,
    )
    body = SkinnedBody.from_weight_lists(rig, template, weights)

    takes = {
        "walking": _walking_take(rig),
        "sitting_down": _sitting_take(rig),
        "hand_waving": _waving_take(rig),
    }
    return body, takes


def _empty_rotations(rig: SkeletonRig, n_frames: int) -> np.ndarray:
    return np.zeros((n_frames, rig.joint_count, 3))


def _to_take(rig: SkeletonRig, rotations: np.ndarray, label: str, subject="proc") -> MotionTake:
    frames = [PoseFrame(rotations[i], np.zeros(3)) for i in range(rotations.shape[0])]
    return MotionTake(
        subject_id=subject,
        action_label=label,
        fps=25.0,
        joint_names=[j.name for j in rig.joints],
        frames=frames,
    ).validate()


def _walking_take(rig: SkeletonRig, n=50) -> MotionTake:
    rot = _empty_rotations(rig, n)
    i = rig.joint_index
    for f in range(n):
        phase = 2.0 * np.pi * f / 25.0  # one stride per second
        swing = 0.45 * np.sin(phase)
        rot[f, i("l_hip"), 0] = swing
        rot[f, i("r_hip"), 0] = -swing
        rot[f, i("l_knee"), 0] = 0.35 * max(0.0, -np.sin(phase)) + 0.08
        rot[f, i("r_knee"), 0] = 0.35 * max(0.0, np.sin(phase)) + 0.08
        rot[f, i("l_shoulder"), 0] = -0.35 * np.sin(phase)
        rot[f, i("r_shoulder"), 0] = 0.35 * np.sin(phase)
        rot[f, i("l_elbow"), 0] = -0.2
        rot[f, i("r_elbow"), 0] = -0.2
        rot[f, i("spine"), 1] = 0.06 * np.sin(phase)
    return _to_take(rig, rot, "walking")


def _sitting_take(rig: SkeletonRig, n=50) -> MotionTake:
    rot = _empty_rotations(rig, n)
    i = rig.joint_index
    for f in range(n):
        t = min(1.0, f / (n - 10))
        ease = 0.5 - 0.5 * np.cos(np.pi * t)  # smooth descent, then hold
        for side in ("l", "r"):
            rot[f, i(f"{side}_hip"), 0] = 1.45 * ease
            rot[f, i(f"{side}_knee"), 0] = -1.5 * ease
            rot[f, i(f"{side}_shoulder"), 0] = 0.35 * ease
        rot[f, i("spine"), 0] = 0.25 * ease
        rot[f, i("chest"), 0] = -0.15 * ease
    return _to_take(rig, rot, "sitting_down")


def _waving_take(rig: SkeletonRig, n=50) -> MotionTake:
    # Only the right arm chain moves; everything else stays at rest.
    rot = _empty_rotations(rig, n)
    i = rig.joint_index
    for f in range(n):
        t = min(1.0, f / 8.0)  # raise the arm over the first 8 frames
        wave = np.sin(2.0 * np.pi * (f / 12.5))
        rot[f, i("r_shoulder"), 2] = 1.9 * t
        rot[f, i("r_elbow"), 2] = 0.5 * t + 0.45 * t * wave
        rot[f, i("r_wrist"), 2] = 0.25 * t * wave
    return _to_take(rig, rot, "hand_waving")
