"""Parsers and writers for every external asset and dataset format."""

from .clip import (
    ClipContainer,
    ClipInfo,
    FlowSequence,
    read_clip,
    read_clip_header,
    read_flow_header,
    read_flow_sequence,
    write_clip,
    write_flow_sequence,
)
from .errors import (
    FormatError,
    ParseError,
    StructuralError,
    TruncationError,
    UnsupportedFeatureError,
    ValidationError,
)
from .glb import parse_glb
from .manifest import (
    DEFAULT_WEIGHTS,
    EXTERNAL_REAL,
    METHODS,
    Manifest,
    ManifestEntry,
    load_manifest,
    save_manifest,
)
from .mesh import Mesh, Texture, compute_vertex_normals, merge_meshes
from .motion import (
    ACTIONS,
    MotionTake,
    PoseFrame,
    parse_motion_take,
    parse_rig,
    write_motion_take,
    write_rig,
)
from .obj import parse_obj
from .ply import parse_ply, write_ply
from .png import export_png_frames, load_png, save_png

__all__ = [
    "ACTIONS",
    "DEFAULT_WEIGHTS",
    "EXTERNAL_REAL",
    "METHODS",
    "ClipContainer",
    "ClipInfo",
    "FlowSequence",
    "FormatError",
    "Manifest",
    "ManifestEntry",
    "Mesh",
    "MotionTake",
    "ParseError",
    "PoseFrame",
    "StructuralError",
    "Texture",
    "TruncationError",
    "UnsupportedFeatureError",
    "ValidationError",
    "compute_vertex_normals",
    "export_png_frames",
    "load_manifest",
    "load_png",
    "merge_meshes",
    "parse_glb",
    "parse_motion_take",
    "parse_obj",
    "parse_ply",
    "parse_rig",
    "read_clip",
    "read_clip_header",
    "read_flow_header",
    "read_flow_sequence",
    "save_manifest",
    "save_png",
    "write_clip",
    "write_flow_sequence",
    "write_motion_take",
    "write_ply",
    "write_rig",
]
