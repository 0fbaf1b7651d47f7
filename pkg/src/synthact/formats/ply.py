"""PLY reading and writing (binary little-endian and ASCII).

Vertex positions and normals are stored as doubles so that a
write -> parse round trip reproduces the vertex buffer bit-exactly.
Optional per-vertex colors are stored as uchar RGB, uvs as doubles.
"""

from __future__ import annotations

import numpy as np

from .errors import ParseError, StructuralError, TruncationError
from .mesh import Mesh, compute_vertex_normals, drop_degenerate_triangles

_DTYPES = {
    "char": "i1", "int8": "i1",
    "uchar": "u1", "uint8": "u1",
    "short": "i2", "int16": "i2",
    "ushort": "u2", "uint16": "u2",
    "int": "i4", "int32": "i4",
    "uint": "u4", "uint32": "u4",
    "float": "f4", "float32": "f4",
    "double": "f8", "float64": "f8",
}


def write_ply(mesh: Mesh, binary: bool = True) -> bytes:
    """Serialize a mesh to PLY bytes."""
    n, t = mesh.num_vertices, mesh.num_triangles
    has_uv = mesh.uvs is not None
    has_color = mesh.colors is not None

    header = ["ply"]
    header.append("format binary_little_endian 1.0" if binary else "format ascii 1.0")
    header.append(f"element vertex {n}")
    for prop in ("x", "y", "z", "nx", "ny", "nz"):
        header.append(f"property double {prop}")
    if has_uv:
        header.append("property double s")
        header.append("property double t")
    if has_color:
        for prop in ("red", "green", "blue"):
            header.append(f"property uchar {prop}")
    header.append(f"element face {t}")
    header.append("property list uchar int vertex_indices")
    header.append("end_header")
    out = bytearray(("\n".join(header) + "\n").encode("ascii"))

    cols = [mesh.vertices, mesh.normals]
    if has_uv:
        cols.append(mesh.uvs)
    color_u8 = None
    if has_color:
        color_u8 = np.clip(np.round(mesh.colors * 255.0), 0, 255).astype(np.uint8)

    if binary:
        fields = [("v", "f8", 3), ("n", "f8", 3)]
        if has_uv:
            fields.append(("uv", "f8", 2))
        if has_color:
            fields.append(("c", "u1", 3))
        rec = np.zeros(n, dtype=[(name, f"<{dt}", (k,)) for name, dt, k in fields])
        rec["v"], rec["n"] = mesh.vertices, mesh.normals
        if has_uv:
            rec["uv"] = mesh.uvs
        if has_color:
            rec["c"] = color_u8
        out += rec.tobytes()
        face = np.zeros(t, dtype=[("k", "u1"), ("idx", "<i4", (3,))])
        face["k"] = 3
        face["idx"] = mesh.triangles
        out += face.tobytes()
    else:
        for i in range(n):
            row = list(mesh.vertices[i]) + list(mesh.normals[i])
            if has_uv:
                row += list(mesh.uvs[i])
            text = " ".join(repr(float(x)) for x in row)
            if has_color:
                text += " " + " ".join(str(int(c)) for c in color_u8[i])
            out += (text + "\n").encode("ascii")
        for i in range(t):
            out += f"3 {mesh.triangles[i, 0]} {mesh.triangles[i, 1]} {mesh.triangles[i, 2]}\n".encode("ascii")
    return bytes(out)


def _parse_header(data: bytes):
    end = data.find(b"end_header")
    if not data.startswith(b"ply") or end < 0:
        raise ParseError("not a PLY file (missing magic or end_header)")
    newline = data.find(b"\n", end)
    if newline < 0:
        raise TruncationError("header not terminated")
    body_start = newline + 1
    lines = data[:end].decode("ascii", errors="replace").splitlines()

    fmt = None
    elements = []  # (name, count, [(prop_name, dtype) or ("list", count_dt, item_dt, prop_name)])
    for line in lines[1:]:
        parts = line.strip().split()
        if not parts or parts[0] == "comment":
            continue
        if parts[0] == "format":
            if len(parts) < 2 or parts[1] not in ("ascii", "binary_little_endian"):
                raise ParseError(f"unsupported PLY format {parts[1:]!r}")
            fmt = parts[1]
        elif parts[0] == "element":
            if len(parts) != 3:
                raise ParseError(f"malformed element line: {line!r}")
            try:
                elements.append([parts[1], int(parts[2]), []])
            except ValueError as e:
                raise ParseError(f"bad element count in {line!r}") from e
        elif parts[0] == "property":
            if not elements:
                raise ParseError("property before any element")
            if parts[1] == "list":
                if len(parts) != 5:
                    raise ParseError(f"malformed list property: {line!r}")
                cdt, idt = _DTYPES.get(parts[2]), _DTYPES.get(parts[3])
                if cdt is None or idt is None:
                    raise ParseError(f"unknown list property types in {line!r}")
                elements[-1][2].append(("list", cdt, idt, parts[4]))
            else:
                dt = _DTYPES.get(parts[1])
                if dt is None:
                    raise ParseError(f"unknown property type {parts[1]!r}")
                elements[-1][2].append((parts[2], dt))
    if fmt is None:
        raise ParseError("PLY header missing format line")
    return fmt, elements, body_start


def parse_ply(data: bytes) -> Mesh:
    """Parse PLY bytes (binary-LE or ASCII) into a Mesh."""
    fmt, elements, offset = _parse_header(data)
    names = [e[0] for e in elements]
    if "vertex" not in names:
        raise ParseError("PLY missing required vertex element")

    vertex_data: dict[str, np.ndarray] = {}
    face_rows: list[list[int]] = []

    if fmt == "binary_little_endian":
        for name, count, props in elements:
            if any(p[0] == "list" for p in props):
                if not all(p[0] == "list" for p in props) or len(props) != 1:
                    raise ParseError("mixed list/scalar properties are not supported")
                _, cdt, idt, _pname = props[0]
                csize = np.dtype(cdt).itemsize
                isize = np.dtype(idt).itemsize
                for _ in range(count):
                    if offset + csize > len(data):
                        raise TruncationError(f"{name} element truncated")
                    k = int(np.frombuffer(data, dtype=f"<{cdt}", count=1, offset=offset)[0])
                    offset += csize
                    if offset + k * isize > len(data):
                        raise TruncationError(f"{name} element truncated")
                    idx = np.frombuffer(data, dtype=f"<{idt}", count=k, offset=offset)
                    offset += k * isize
                    if name == "face":
                        face_rows.append([int(i) for i in idx])
            else:
                dtype = np.dtype([(p, f"<{dt}") for p, dt in props])
                need = dtype.itemsize * count
                if offset + need > len(data):
                    raise TruncationError(f"{name} element truncated")
                rec = np.frombuffer(data, dtype=dtype, count=count, offset=offset)
                offset += need
                if name == "vertex":
                    for p, _dt in props:
                        vertex_data[p] = rec[p].astype(np.float64)
    else:
        text_rows = data[offset:].decode("ascii", errors="replace").split("\n")
        row = 0
        for name, count, props in elements:
            is_list = any(p[0] == "list" for p in props)
            store = {p[0]: [] for p in props} if not is_list else None
            for _ in range(count):
                while row < len(text_rows) and not text_rows[row].strip():
                    row += 1
                if row >= len(text_rows):
                    raise TruncationError(f"{name} element truncated")
                tokens = text_rows[row].split()
                row += 1
                if is_list:
                    k = int(tokens[0])
                    if len(tokens) < 1 + k:
                        raise TruncationError(f"{name} list row truncated")
                    if name == "face":
                        face_rows.append([int(x) for x in tokens[1 : 1 + k]])
                else:
                    if len(tokens) < len(props):
                        raise TruncationError(f"{name} row truncated")
                    for (p, _dt), tok in zip(props, tokens):
                        store[p].append(float(tok))
            if name == "vertex" and store is not None:
                for p, vals in store.items():
                    vertex_data[p] = np.asarray(vals, dtype=np.float64)

    for axis in ("x", "y", "z"):
        if axis not in vertex_data:
            raise ParseError(f"vertex element missing property {axis!r}")
    vertices = np.stack([vertex_data["x"], vertex_data["y"], vertex_data["z"]], axis=1)

    triangles: list[list[int]] = []
    for face in face_rows:
        if len(face) < 3:
            raise StructuralError("face with fewer than 3 indices")
        for i in range(1, len(face) - 1):
            triangles.append([face[0], face[i], face[i + 1]])
    tri = drop_degenerate_triangles(np.asarray(triangles, dtype=np.int64).reshape(-1, 3))
    if tri.size and (tri.min() < 0 or tri.max() >= len(vertices)):
        raise StructuralError("face index out of range")
    tri = tri.astype(np.int32)

    if all(k in vertex_data for k in ("nx", "ny", "nz")):
        normals = np.stack([vertex_data["nx"], vertex_data["ny"], vertex_data["nz"]], axis=1)
        lengths = np.linalg.norm(normals, axis=1)
        if np.any(lengths < 1e-12):
            normals = compute_vertex_normals(vertices, tri)
    else:
        normals = compute_vertex_normals(vertices, tri)

    uvs = None
    if "s" in vertex_data and "t" in vertex_data:
        uvs = np.stack([vertex_data["s"], vertex_data["t"]], axis=1)
    colors = None
    if all(k in vertex_data for k in ("red", "green", "blue")):
        colors = np.stack(
            [vertex_data["red"], vertex_data["green"], vertex_data["blue"]], axis=1
        ) / 255.0

    return Mesh(vertices, normals, tri, uvs=uvs, colors=colors)
