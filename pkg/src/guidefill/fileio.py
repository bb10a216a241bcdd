"""PNG image and PGM label-mask I/O.

Images travel as 8-bit PNG (RGB or RGBA); float conversion uses
round-half-away-from-zero so 0.5/255 boundaries are stable.  Label masks
travel as binary PGM with the fixed encoding 0=Readable, 128=Bystander,
255=Inpaint, written and read bit-exactly.
"""

from __future__ import annotations

import numpy as np
from PIL import Image

from . import grid

_PNG_MODES = {1: "L", 2: "LA", 3: "RGB", 4: "RGBA"}


def to_uint8(values: np.ndarray) -> np.ndarray:
    """Convert [0, 1] floats to uint8 with round-half-away-from-zero."""
    return np.floor(np.clip(values, 0.0, 1.0) * 255.0 + 0.5).astype(np.uint8)


def load_image(path) -> np.ndarray:
    """Load a PNG as an (H, W, C) float64 array in [0, 1] (C = 3 or 4)."""
    with Image.open(path) as img:
        if img.mode != "RGBA":
            img = img.convert("RGB")
        arr = np.asarray(img, dtype=np.float64) / 255.0
    if arr.ndim == 2:
        arr = arr[:, :, None]
    return arr


def save_image(path, image: np.ndarray) -> None:
    grid.validate_image(image)
    mode = _PNG_MODES[image.shape[2]]
    data = to_uint8(image)
    if data.shape[2] == 1:
        data = data[:, :, 0]
    Image.fromarray(data, mode=mode).save(path, format="PNG")


def load_labels(path) -> np.ndarray:
    """Read a P2/P5 PGM label mask and validate its values."""
    with open(path, "rb") as fh:
        return parse_labels(fh.read())


def parse_labels(data: bytes) -> np.ndarray:
    magic, rest = _token(data)
    if magic not in (b"P2", b"P5"):
        raise ValueError(f"not a PGM file: magic {magic!r}")
    width_b, rest = _token(rest)
    height_b, rest = _token(rest)
    maxval_b, rest = _token(rest)
    width, height, maxval = int(width_b), int(height_b), int(maxval_b)
    if maxval != 255:
        raise ValueError(f"PGM maxval must be 255, got {maxval}")
    if magic == b"P5":
        # exactly one whitespace byte separates the header from the raster
        raster = rest[1:1 + width * height]
        if len(raster) < width * height:
            raise ValueError("PGM raster truncated")
        labels = np.frombuffer(raster, dtype=np.uint8).reshape(height, width).copy()
    else:
        flat = np.array(rest.split()[:width * height], dtype=np.uint8)
        if flat.size < width * height:
            raise ValueError("PGM raster truncated")
        labels = flat.reshape(height, width)
    grid.validate_labels(labels)
    return labels


def save_labels(path, labels: np.ndarray) -> None:
    grid.validate_labels(labels)
    H, W = labels.shape
    header = f"P5\n{W} {H}\n255\n".encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(labels, dtype=np.uint8).tobytes())


def _token(data: bytes):
    """Pop one whitespace-delimited token, skipping # comments."""
    i = 0
    while True:
        while i < len(data) and data[i:i + 1].isspace():
            i += 1
        if i < len(data) and data[i:i + 1] == b"#":
            while i < len(data) and data[i:i + 1] != b"\n":
                i += 1
            continue
        break
    start = i
    while i < len(data) and not data[i:i + 1].isspace():
        i += 1
    if start == i:
        raise ValueError("truncated PGM header")
    return data[start:i], data[i:]
