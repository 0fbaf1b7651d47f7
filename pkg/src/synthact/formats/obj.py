"""Wavefront OBJ parsing (ASCII, v/vn/vt/f records, polygonal faces)."""

from __future__ import annotations

import numpy as np

from .errors import ParseError, StructuralError
from .mesh import Mesh, compute_vertex_normals, drop_degenerate_triangles


def _resolve_index(raw: int, count: int, lineno: int, what: str) -> int:
    # OBJ indices are 1-based; negative values are relative to the end.
    if raw > 0:
        idx = raw - 1
    elif raw < 0:
        idx = count + raw
    else:
        raise ParseError(f"line {lineno}: zero {what} index")
    if not 0 <= idx < count:
        raise StructuralError(f"line {lineno}: {what} index {raw} out of range (count {count})")
    return idx


def parse_obj(data: bytes, mtl: bytes | None = None) -> Mesh:
    """Parse ASCII OBJ bytes into a triangulated Mesh.

    Polygonal faces are fan-triangulated. Missing normals are computed
    per-face and area-weighted per vertex. Texture coordinates are
    wrapped into [0, 1]^2. ``mtl``, if given, contributes only a
    ``map_Kd`` texture path (stored as ``texture_id``).
    """
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as e:
        raise ParseError(f"OBJ is not valid text: {e}") from e

    positions: list[list[float]] = []
    texcoords: list[list[float]] = []
    normals_in: list[list[float]] = []
    # faces as lists of (v, vt or -1, vn or -1)
    faces: list[tuple[int, list[tuple[int, int, int]]]] = []

    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        tag = parts[0]
        try:
            if tag == "v":
                if len(parts) < 4:
                    raise ParseError(f"line {lineno}: vertex needs 3 coordinates")
                positions.append([float(x) for x in parts[1:4]])
            elif tag == "vt":
                if len(parts) < 3:
                    raise ParseError(f"line {lineno}: texture coordinate needs 2 values")
                texcoords.append([float(parts[1]), float(parts[2])])
            elif tag == "vn":
                if len(parts) < 4:
                    raise ParseError(f"line {lineno}: normal needs 3 components")
                normals_in.append([float(x) for x in parts[1:4]])
            elif tag == "f":
                if len(parts) < 4:
                    raise ParseError(f"line {lineno}: face needs at least 3 vertices")
                corners = []
                for token in parts[1:]:
                    fields = token.split("/")
                    if len(fields) > 3 or not fields[0]:
                        raise ParseError(f"line {lineno}: malformed face token {token!r}")
                    v = _resolve_index(int(fields[0]), len(positions), lineno, "vertex")
                    vt = -1
                    vn = -1
                    if len(fields) >= 2 and fields[1]:
                        vt = _resolve_index(int(fields[1]), len(texcoords), lineno, "texcoord")
                    if len(fields) == 3 and fields[2]:
                        vn = _resolve_index(int(fields[2]), len(normals_in), lineno, "normal")
                    corners.append((v, vt, vn))
                faces.append((lineno, corners))
            # mtllib/usemtl/o/g/s and anything else: no geometric meaning here
        except ValueError as e:
            if isinstance(e, (ParseError, StructuralError)):
                raise
            raise ParseError(f"line {lineno}: {e}") from e

    # Rebuild a single index space: one output vertex per distinct (v, vt, vn).
    combo_index: dict[tuple[int, int, int], int] = {}
    out_pos: list[list[float]] = []
    out_uv: list[list[float]] = []
    out_nrm: list[list[float] | None] = []
    triangles: list[list[int]] = []
    any_uv = bool(texcoords)

    def emit(corner: tuple[int, int, int]) -> int:
        idx = combo_index.get(corner)
        if idx is None:
            idx = len(out_pos)
            combo_index[corner] = idx
            v, vt, vn = corner
            out_pos.append(positions[v])
            out_uv.append(texcoords[vt] if vt >= 0 else [0.0, 0.0])
            out_nrm.append(normals_in[vn] if vn >= 0 else None)
        return idx

    for _lineno, corners in faces:
        first = emit(corners[0])
        prev = emit(corners[1])
        for corner in corners[2:]:
            cur = emit(corner)
            triangles.append([first, prev, cur])
            prev = cur

    vertices = np.asarray(out_pos, dtype=np.float64).reshape(-1, 3)
    tri = drop_degenerate_triangles(
        np.asarray(triangles, dtype=np.int32).reshape(-1, 3)
    )

    computed = compute_vertex_normals(vertices, tri)
    normals = np.empty_like(vertices)
    for i, n in enumerate(out_nrm):
        normals[i] = computed[i] if n is None else n
    if len(out_nrm):
        lengths = np.linalg.norm(normals, axis=1)
        bad = lengths < 1e-12
        normals[bad] = computed[bad] if vertices.size else normals[bad]
        lengths[bad] = 1.0
        normals = normals / np.maximum(np.linalg.norm(normals, axis=1, keepdims=True), 1e-12)

    uvs = None
    if any_uv:
        uvs = np.asarray(out_uv, dtype=np.float64).reshape(-1, 2) % 1.0

    texture_id = _mtl_texture_path(mtl) if mtl is not None else None
    return Mesh(vertices, normals, tri, uvs=uvs, texture_id=texture_id)


def _mtl_texture_path(mtl: bytes) -> str | None:
    try:
        text = mtl.decode("utf-8")
    except UnicodeDecodeError as e:
        raise ParseError(f"MTL is not valid text: {e}") from e
    for line in text.splitlines():
        parts = line.strip().split(None, 1)
        if len(parts) == 2 and parts[0] == "map_Kd":
            return parts[1].strip()
    return None
