"""Binary glTF (GLB) parsing.

Supports the subset needed to import static scenes: triangle primitives
with POSITION/NORMAL/TEXCOORD_0 accessors, the node TRS/matrix
hierarchy, and baseColor textures embedded as PNG or JPEG. glTF
animations, skins, sparse accessors and extensions are ignored (with a
warning for declared extensions).
"""

from __future__ import annotations

import io
import json
import struct
import warnings

import numpy as np

from .errors import (
    FormatError,
    StructuralError,
    TruncationError,
    UnsupportedFeatureError,
)
from .mesh import Mesh, Texture, compute_vertex_normals, drop_degenerate_triangles

_COMPONENT_DTYPES = {
    5120: "i1",
    5121: "u1",
    5122: "i2",
    5123: "u2",
    5125: "u4",
    5126: "f4",
}
_TYPE_COUNTS = {"SCALAR": 1, "VEC2": 2, "VEC3": 3, "VEC4": 4, "MAT4": 16}

_JSON_CHUNK = 0x4E4F534A
_BIN_CHUNK = 0x004E4942


def _read_chunks(data: bytes):
    if len(data) < 12:
        raise TruncationError("GLB shorter than its 12-byte header")
    magic, version, length = struct.unpack_from("<4sII", data, 0)
    if magic != b"glTF":
        raise FormatError(f"bad GLB magic {magic!r}")
    if version != 2:
        raise FormatError(f"unsupported GLB version {version}")
    if length > len(data):
        raise TruncationError("GLB declared length exceeds available bytes")
    offset = 12
    chunks = {}
    while offset + 8 <= length:
        clen, ctype = struct.unpack_from("<II", data, offset)
        offset += 8
        if offset + clen > length:
            raise TruncationError("GLB chunk truncated")
        chunks.setdefault(ctype, data[offset : offset + clen])
        offset += clen + (-clen % 4) * 0  # chunks are already 4-byte aligned by spec
    if _JSON_CHUNK not in chunks:
        raise FormatError("GLB missing JSON chunk")
    return chunks


def _node_local_transform(node: dict) -> np.ndarray:
    if "matrix" in node:
        return np.asarray(node["matrix"], dtype=np.float64).reshape(4, 4).T
    m = np.eye(4)
    if "scale" in node:
        m[:3, :3] = np.diag(node["scale"])
    if "rotation" in node:
        x, y, z, w = node["rotation"]
        rot = np.array(
            [
                [1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)],
                [2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)],
                [2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)],
            ]
        )
        m[:3, :3] = rot @ m[:3, :3]
    if "translation" in node:
        m[:3, 3] = node["translation"]
    return m


class _Accessors:
    def __init__(self, gltf: dict, binary: bytes):
        self.gltf = gltf
        self.binary = binary

    def read(self, index: int) -> np.ndarray:
        accessors = self.gltf.get("accessors", [])
        if not 0 <= index < len(accessors):
            raise StructuralError(f"accessor index {index} out of range")
        acc = accessors[index]
        if "sparse" in acc:
            raise UnsupportedFeatureError("sparse accessors are not supported")
        ctype = acc.get("componentType")
        if ctype not in _COMPONENT_DTYPES:
            raise UnsupportedFeatureError(f"unsupported component type {ctype}")
        ncomp = _TYPE_COUNTS.get(acc.get("type"))
        if ncomp is None:
            raise UnsupportedFeatureError(f"unsupported accessor type {acc.get('type')!r}")
        count = int(acc.get("count", 0))
        dtype = np.dtype("<" + _COMPONENT_DTYPES[ctype])

        if "bufferView" not in acc:
            return np.zeros((count, ncomp), dtype=dtype)
        views = self.gltf.get("bufferViews", [])
        if not 0 <= acc["bufferView"] < len(views):
            raise StructuralError("accessor references missing bufferView")
        view = views[acc["bufferView"]]
        base = int(view.get("byteOffset", 0)) + int(acc.get("byteOffset", 0))
        stride = view.get("byteStride")
        item = dtype.itemsize * ncomp
        if stride is None or stride == item:
            end = base + item * count
            if end > len(self.binary):
                raise StructuralError("accessor range exceeds binary chunk")
            out = np.frombuffer(self.binary, dtype=dtype, count=count * ncomp, offset=base)
            return out.reshape(count, ncomp)
        if base + stride * (count - 1) + item > len(self.binary):
            raise StructuralError("strided accessor range exceeds binary chunk")
        rows = np.empty((count, ncomp), dtype=dtype)
        for i in range(count):
            rows[i] = np.frombuffer(self.binary, dtype=dtype, count=ncomp, offset=base + i * stride)
        return rows

    def read_image(self, image_index: int) -> Texture:
        from PIL import Image

        images = self.gltf.get("images", [])
        if not 0 <= image_index < len(images):
            raise StructuralError(f"image index {image_index} out of range")
        img = images[image_index]
        if "bufferView" not in img:
            raise UnsupportedFeatureError("external image URIs are not supported")
        views = self.gltf.get("bufferViews", [])
        view = views[img["bufferView"]]
        base = int(view.get("byteOffset", 0))
        length = int(view.get("byteLength", 0))
        if base + length > len(self.binary):
            raise StructuralError("image bufferView exceeds binary chunk")
        raw = self.binary[base : base + length]
        try:
            pil = Image.open(io.BytesIO(raw)).convert("RGB")
        except Exception as e:
            raise FormatError(f"embedded image could not be decoded: {e}") from e
        return Texture.from_array(np.asarray(pil, dtype=np.uint8))


def parse_glb(data: bytes) -> tuple[list[Mesh], list[Texture], list[np.ndarray]]:
    """Parse a GLB container.

    Returns one Mesh per (node, primitive) instance, the decoded
    textures, and the flattened world transform of each mesh entry
    (aligned with the meshes list).
    """
    chunks = _read_chunks(data)
    try:
        gltf = json.loads(chunks[_JSON_CHUNK].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise FormatError(f"GLB JSON chunk is invalid: {e}") from e
    binary = chunks.get(_BIN_CHUNK, b"")
    acc = _Accessors(gltf, binary)

    for ext in gltf.get("extensionsRequired", []) or gltf.get("extensionsUsed", []):
        warnings.warn(f"ignoring glTF extension {ext!r}", stacklevel=2)

    # texture index in the glTF sense -> index into our decoded list
    textures: list[Texture] = []
    texture_map: dict[int, int] = {}

    def texture_for_material(mat_index) -> int | None:
        if mat_index is None:
            return None
        materials = gltf.get("materials", [])
        if not 0 <= mat_index < len(materials):
            return None
        pbr = materials[mat_index].get("pbrMetallicRoughness", {})
        tex_info = pbr.get("baseColorTexture")
        if not tex_info:
            return None
        tex_index = tex_info.get("index")
        gltf_textures = gltf.get("textures", [])
        if tex_index is None or not 0 <= tex_index < len(gltf_textures):
            return None
        source = gltf_textures[tex_index].get("source")
        if source is None:
            return None
        if source not in texture_map:
            texture_map[source] = len(textures)
            textures.append(acc.read_image(source))
        return texture_map[source]

    nodes = gltf.get("nodes", [])
    scenes = gltf.get("scenes", [])
    if scenes:
        roots = scenes[gltf.get("scene", 0)].get("nodes", [])
    else:
        roots = list(range(len(nodes)))

    world: dict[int, np.ndarray] = {}

    def visit(index: int, parent: np.ndarray):
        if not 0 <= index < len(nodes):
            raise StructuralError(f"node index {index} out of range")
        node = nodes[index]
        m = parent @ _node_local_transform(node)
        world[index] = m
        for child in node.get("children", []):
            visit(child, m)

    for root in roots:
        visit(root, np.eye(4))

    meshes: list[Mesh] = []
    transforms: list[np.ndarray] = []
    gltf_meshes = gltf.get("meshes", [])

    for index, node in enumerate(nodes):
        if index not in world or "mesh" not in node:
            continue
        mesh_index = node["mesh"]
        if not 0 <= mesh_index < len(gltf_meshes):
            raise StructuralError(f"node references missing mesh {mesh_index}")
        for prim in gltf_meshes[mesh_index].get("primitives", []):
            if prim.get("mode", 4) != 4:
                warnings.warn("skipping non-triangle primitive", stacklevel=2)
                continue
            attrs = prim.get("attributes", {})
            if "POSITION" not in attrs:
                raise StructuralError("primitive has no POSITION attribute")
            positions = acc.read(attrs["POSITION"]).astype(np.float64)
            if "indices" in prim:
                idx = acc.read(prim["indices"]).reshape(-1).astype(np.int64)
                if idx.size % 3:
                    raise StructuralError("index count is not a multiple of 3")
                if idx.size and idx.max() >= len(positions):
                    raise StructuralError("primitive index out of range")
                tri = idx.reshape(-1, 3)
            else:
                tri = np.arange(len(positions), dtype=np.int64).reshape(-1, 3)
            tri = drop_degenerate_triangles(tri).astype(np.int32)

            if "NORMAL" in attrs:
                normals = acc.read(attrs["NORMAL"]).astype(np.float64)
                normals = normals / np.maximum(
                    np.linalg.norm(normals, axis=1, keepdims=True), 1e-12
                )
            else:
                normals = compute_vertex_normals(positions, tri)
            uvs = None
            if "TEXCOORD_0" in attrs:
                uvs = acc.read(attrs["TEXCOORD_0"]).astype(np.float64)

            meshes.append(
                Mesh(
                    positions,
                    normals,
                    tri,
                    uvs=uvs,
                    texture_id=texture_for_material(prim.get("material")),
                )
            )
            transforms.append(world[index])

    return meshes, textures, transforms
