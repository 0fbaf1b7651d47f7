"""PNG helpers and lossless frame export."""

from __future__ import annotations

import io
from pathlib import Path

import numpy as np
from PIL import Image

from .clip import ClipContainer


def save_png(array: np.ndarray, path) -> None:
    arr = np.asarray(array)
    if arr.dtype == np.uint16:
        Image.fromarray(arr, mode="I;16").save(path)
    else:
        Image.fromarray(arr.astype(np.uint8)).save(path)


def load_png(source) -> np.ndarray:
    if isinstance(source, (bytes, bytearray)):
        img = Image.open(io.BytesIO(source))
    else:
        img = Image.open(source)
    if img.mode in ("I;16", "I"):
        return np.asarray(img, dtype=np.uint16)
    return np.asarray(img.convert("RGB"), dtype=np.uint8)


def export_png_frames(container: ClipContainer, directory) -> list[Path]:
    """Write one lossless PNG per frame, named 000000.png, 000001.png, ..."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for i in range(container.frame_count):
        path = directory / f"{i:06d}.png"
        save_png(container.frames[i], path)
        paths.append(path)
    return paths
