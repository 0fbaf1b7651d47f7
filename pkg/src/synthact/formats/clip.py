"""Clip and flow containers.

Clip container byte layout (all integers u32 little-endian):

    magic "SACT" | version | width | height | fps | frame_count
    | label_len | label utf-8 | prov_len | provenance JSON utf-8
    | frames: frame_count * height * width * 3 bytes of raw RGB8

Flow container byte layout:

    magic "SFLO" | version | width | height | field_count | normalized
    | per field: u-plane then v-plane, row-major float32 little-endian

Both headers are readable without touching the payload, so metadata
scans of a dataset stay cheap.
"""

from __future__ import annotations

import io
import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import FormatError, StructuralError, TruncationError

CLIP_MAGIC = b"SACT"
FLOW_MAGIC = b"SFLO"
_VERSION = 1


@dataclass
class ClipContainer:
    width: int
    height: int
    fps: int
    label: str
    frames: np.ndarray  # (N, H, W, 3) uint8
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        self.frames = np.ascontiguousarray(self.frames, dtype=np.uint8)
        if self.frames.ndim != 4 or self.frames.shape[1:] != (self.height, self.width, 3):
            raise StructuralError(
                f"frame array shape {self.frames.shape} does not match "
                f"(N, {self.height}, {self.width}, 3)"
            )

    @property
    def frame_count(self) -> int:
        return self.frames.shape[0]

    def validate_generated(self) -> "ClipContainer":
        """Invariants for clips produced by the generator."""
        if self.fps != 25 or self.width != 224 or self.height != 224:
            raise StructuralError(
                f"generated clips must be 25 fps 224x224, got {self.fps} fps "
                f"{self.width}x{self.height}"
            )
        return self


@dataclass
class ClipInfo:
    width: int
    height: int
    fps: int
    frame_count: int
    label: str
    provenance: dict


def _open_sink(sink):
    if isinstance(sink, (str, Path)):
        return open(sink, "wb"), True
    return sink, False


def _open_source(source):
    if isinstance(source, (str, Path)):
        return open(source, "rb"), True
    if isinstance(source, (bytes, bytearray)):
        return io.BytesIO(source), True
    return source, False


def write_clip(container: ClipContainer, sink) -> None:
    f, owned = _open_sink(sink)
    try:
        label = container.label.encode("utf-8")
        prov = json.dumps(container.provenance, sort_keys=True, separators=(",", ":")).encode("utf-8")
        f.write(CLIP_MAGIC)
        f.write(
            struct.pack(
                "<5I",
                _VERSION,
                container.width,
                container.height,
                container.fps,
                container.frame_count,
            )
        )
        f.write(struct.pack("<I", len(label)) + label)
        f.write(struct.pack("<I", len(prov)) + prov)
        f.write(container.frames.tobytes())
    finally:
        if owned:
            f.close()


def _read_exact(f, n: int, what: str) -> bytes:
    data = f.read(n)
    if len(data) != n:
        raise TruncationError(f"{what}: expected {n} bytes, got {len(data)}")
    return data


def _read_clip_header(f) -> ClipInfo:
    magic = _read_exact(f, 4, "clip magic")
    if magic != CLIP_MAGIC:
        raise FormatError(f"bad clip magic {magic!r}")
    version, width, height, fps, count = struct.unpack("<5I", _read_exact(f, 20, "clip header"))
    if version != _VERSION:
        raise FormatError(f"unsupported clip version {version}")
    (label_len,) = struct.unpack("<I", _read_exact(f, 4, "label length"))
    label = _read_exact(f, label_len, "label").decode("utf-8")
    (prov_len,) = struct.unpack("<I", _read_exact(f, 4, "provenance length"))
    prov = json.loads(_read_exact(f, prov_len, "provenance").decode("utf-8")) if prov_len else {}
    return ClipInfo(width, height, fps, count, label, prov)


def read_clip_header(source) -> ClipInfo:
    """Read clip metadata without decoding any frames."""
    f, owned = _open_source(source)
    try:
        return _read_clip_header(f)
    finally:
        if owned:
            f.close()


def read_clip(source) -> ClipContainer:
    f, owned = _open_source(source)
    try:
        info = _read_clip_header(f)
        nbytes = info.frame_count * info.height * info.width * 3
        raw = _read_exact(f, nbytes, "frame payload")
        frames = np.frombuffer(raw, dtype=np.uint8).reshape(
            info.frame_count, info.height, info.width, 3
        )
        return ClipContainer(
            info.width, info.height, info.fps, info.label, frames.copy(), info.provenance
        )
    finally:
        if owned:
            f.close()


@dataclass
class FlowSequence:
    """Per frame-pair dense flow fields; (N-1, H, W, 2) float32 (u, v)."""

    fields: np.ndarray
    normalized: bool

    def __post_init__(self):
        self.fields = np.ascontiguousarray(self.fields, dtype=np.float32)
        if self.fields.ndim != 4 or self.fields.shape[3] != 2:
            raise StructuralError(f"flow array shape {self.fields.shape} is not (N, H, W, 2)")

    @property
    def count(self) -> int:
        return self.fields.shape[0]


def write_flow_sequence(seq: FlowSequence, sink) -> None:
    f, owned = _open_sink(sink)
    try:
        n, h, w, _ = seq.fields.shape
        f.write(FLOW_MAGIC)
        f.write(struct.pack("<5I", _VERSION, w, h, n, 1 if seq.normalized else 0))
        for i in range(n):
            f.write(np.ascontiguousarray(seq.fields[i, :, :, 0], dtype="<f4").tobytes())
            f.write(np.ascontiguousarray(seq.fields[i, :, :, 1], dtype="<f4").tobytes())
    finally:
        if owned:
            f.close()


def read_flow_header(source) -> tuple[int, int, int, bool]:
    """(width, height, count, normalized) without reading the planes."""
    f, owned = _open_source(source)
    try:
        magic = _read_exact(f, 4, "flow magic")
        if magic != FLOW_MAGIC:
            raise FormatError(f"bad flow magic {magic!r}")
        version, w, h, n, norm = struct.unpack("<5I", _read_exact(f, 20, "flow header"))
        if version != _VERSION:
            raise FormatError(f"unsupported flow version {version}")
        return w, h, n, bool(norm)
    finally:
        if owned:
            f.close()


def read_flow_sequence(source) -> FlowSequence:
    f, owned = _open_source(source)
    try:
        w, h, n, norm = read_flow_header(f)
        fields = np.empty((n, h, w, 2), dtype=np.float32)
        plane = h * w * 4
        for i in range(n):
            u = np.frombuffer(_read_exact(f, plane, "u plane"), dtype="<f4").reshape(h, w)
            v = np.frombuffer(_read_exact(f, plane, "v plane"), dtype="<f4").reshape(h, w)
            fields[i, :, :, 0] = u
            fields[i, :, :, 1] = v
        return FlowSequence(fields, norm)
    finally:
        if owned:
            f.close()
