"""Triangle mesh and texture value types."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import StructuralError


@dataclass
class Texture:
    """Row-major RGB8 image. ``pixels`` has shape (height, width, 3)."""

    width: int
    height: int
    pixels: np.ndarray

    def __post_init__(self):
        self.pixels = np.ascontiguousarray(self.pixels, dtype=np.uint8)
        if self.pixels.shape != (self.height, self.width, 3):
            raise StructuralError(
                f"texture buffer shape {self.pixels.shape} does not match "
                f"{self.height}x{self.width}x3"
            )

    @classmethod
    def from_array(cls, pixels: np.ndarray) -> "Texture":
        pixels = np.asarray(pixels)
        return cls(width=pixels.shape[1], height=pixels.shape[0], pixels=pixels)


@dataclass
class Mesh:
    """Indexed triangle mesh in meters.

    vertices : (N, 3) float64
    normals  : (N, 3) float64, unit length
    uvs      : optional (N, 2) float64 texture coordinates in [0, 1]^2
    triangles: (T, 3) int32 vertex indices
    colors   : optional (N, 3) float64 per-vertex RGB in [0, 1]
    texture_id : optional reference to an external texture
    """

    vertices: np.ndarray
    normals: np.ndarray
    triangles: np.ndarray
    uvs: np.ndarray | None = None
    colors: np.ndarray | None = None
    texture_id: object = None

    def __post_init__(self):
        self.vertices = np.ascontiguousarray(self.vertices, dtype=np.float64).reshape(-1, 3)
        self.normals = np.ascontiguousarray(self.normals, dtype=np.float64).reshape(-1, 3)
        self.triangles = np.ascontiguousarray(self.triangles, dtype=np.int32).reshape(-1, 3)
        if self.uvs is not None:
            self.uvs = np.ascontiguousarray(self.uvs, dtype=np.float64).reshape(-1, 2)
        if self.colors is not None:
            self.colors = np.ascontiguousarray(self.colors, dtype=np.float64).reshape(-1, 3)

    @property
    def num_vertices(self) -> int:
        return self.vertices.shape[0]

    @property
    def num_triangles(self) -> int:
        return self.triangles.shape[0]

    def validate(self) -> "Mesh":
        """Check mesh invariants; raise StructuralError on violation."""
        n = self.num_vertices
        if self.normals.shape[0] != n:
            raise StructuralError("normal count does not match vertex count")
        if self.uvs is not None and self.uvs.shape[0] != n:
            raise StructuralError("uv count does not match vertex count")
        if self.colors is not None and self.colors.shape[0] != n:
            raise StructuralError("color count does not match vertex count")
        if self.triangles.size:
            if self.triangles.min() < 0 or self.triangles.max() >= n:
                raise StructuralError("triangle index out of range")
            t = self.triangles
            if np.any((t[:, 0] == t[:, 1]) | (t[:, 1] == t[:, 2]) | (t[:, 0] == t[:, 2])):
                raise StructuralError("degenerate triangle (repeated vertex index)")
        if n:
            norms = np.linalg.norm(self.normals, axis=1)
            if np.any(np.abs(norms - 1.0) > 1e-4):
                raise StructuralError("normals are not unit length")
        return self

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        return self.vertices.min(axis=0), self.vertices.max(axis=0)


def compute_vertex_normals(vertices: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    """Area-weighted vertex normals from triangle geometry."""
    vertices = np.asarray(vertices, dtype=np.float64)
    triangles = np.asarray(triangles, dtype=np.int64)
    normals = np.zeros_like(vertices)
    if triangles.size:
        a = vertices[triangles[:, 0]]
        b = vertices[triangles[:, 1]]
        c = vertices[triangles[:, 2]]
        face = np.cross(b - a, c - a)  # magnitude = 2x area, gives the weighting
        for k in range(3):
            np.add.at(normals, triangles[:, k], face)
    lengths = np.linalg.norm(normals, axis=1)
    zero = lengths < 1e-12
    normals[zero] = (0.0, 0.0, 1.0)
    lengths[zero] = 1.0
    return normals / lengths[:, None]


def drop_degenerate_triangles(triangles: np.ndarray) -> np.ndarray:
    t = np.asarray(triangles).reshape(-1, 3)
    keep = (t[:, 0] != t[:, 1]) & (t[:, 1] != t[:, 2]) & (t[:, 0] != t[:, 2])
    return t[keep]


def merge_meshes(meshes: list[Mesh]) -> Mesh:
    """Concatenate meshes into one (uvs/colors kept only if present on all)."""
    if not meshes:
        return Mesh(np.zeros((0, 3)), np.zeros((0, 3)), np.zeros((0, 3), dtype=np.int32))
    verts, norms, tris = [], [], []
    uvs = [] if all(m.uvs is not None for m in meshes) else None
    cols = [] if all(m.colors is not None for m in meshes) else None
    offset = 0
    for m in meshes:
        verts.append(m.vertices)
        norms.append(m.normals)
        tris.append(m.triangles + offset)
        if uvs is not None:
            uvs.append(m.uvs)
        if cols is not None:
            cols.append(m.colors)
        offset += m.num_vertices
    return Mesh(
        np.concatenate(verts),
        np.concatenate(norms),
        np.concatenate(tris),
        uvs=np.concatenate(uvs) if uvs is not None else None,
        colors=np.concatenate(cols) if cols is not None else None,
    )
