"""Load, validate, and serve the m x n grid of sub-aperture views.

A light field is stored as a single contiguous uint8 array of shape
``(rows_m, cols_n, view_h, view_w, 3)`` with view (0, 0) at the top-left of
the capture grid, rows increasing downward and columns rightward. The array
is made read-only after construction so the grid can be shared freely across
threads; all views are loaded eagerly so the render loop never touches disk.

Supported codecs: PNG (via Pillow) and binary PPM/P6. Sources with more than
8 bits per channel are truncated to the high byte; grayscale is replicated to
RGB and alpha is dropped.
"""

from __future__ import annotations

import string
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    DecodeError,
    DimensionMismatchError,
    IndivisibleAtlasError,
    MissingViewError,
)

__all__ = [
    "LightFieldGrid",
    "load_from_directory",
    "load_from_atlas",
    "tile_atlas",
    "read_image",
    "read_ppm",
    "write_ppm",
]


# --------------------------------------------------------------------------
# Image IO
# --------------------------------------------------------------------------

def _to_rgb8(arr: np.ndarray) -> np.ndarray:
    """Normalize a decoded array to (H, W, 3) uint8."""
    if arr.dtype == np.uint16:
        arr = (arr >> 8).astype(np.uint8)
    elif arr.dtype == np.int32:  # Pillow mode "I" for 16-bit grayscale
        arr = (np.clip(arr, 0, 65535).astype(np.uint16) >> 8).astype(np.uint8)
    elif arr.dtype != np.uint8:
        arr = np.clip(arr, 0, 255).astype(np.uint8)
    if arr.ndim == 2:
        arr = np.stack([arr] * 3, axis=-1)
    elif arr.shape[2] == 4:
        arr = arr[:, :, :3]
    elif arr.shape[2] != 3:
        raise ValueError(f"unsupported channel count {arr.shape[2]}")
    return np.ascontiguousarray(arr)


def read_ppm(path) -> np.ndarray:
    """Read a binary PPM (P6). Maxval > 255 is truncated to the high byte."""
    path = Path(path)
    with open(path, "rb") as f:
        data = f.read()

    pos = 0

    def token():
        nonlocal pos
        # skip whitespace and '#' comments between header fields
        while pos < len(data):
            c = data[pos : pos + 1]
            if c == b"#":
                while pos < len(data) and data[pos : pos + 1] != b"\n":
                    pos += 1
            elif c.isspace():
                pos += 1
            else:
                break
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        return data[start:pos]

    try:
        if token() != b"P6":
            raise ValueError("not a P6 PPM")
        width = int(token())
        height = int(token())
        maxval = int(token())
        pos += 1  # single whitespace byte after maxval
        if width < 1 or height < 1 or not (0 < maxval < 65536):
            raise ValueError("bad PPM header")
        bytes_per_sample = 1 if maxval < 256 else 2
        n = width * height * 3 * bytes_per_sample
        raw = data[pos : pos + n]
        if len(raw) != n:
            raise ValueError("truncated pixel data")
        if bytes_per_sample == 1:
            arr = np.frombuffer(raw, dtype=np.uint8).reshape(height, width, 3)
        else:
            # big-endian two-byte samples: the high byte comes first
            arr = np.frombuffer(raw, dtype=np.uint8).reshape(height, width, 3, 2)[..., 0]
        return np.ascontiguousarray(arr)
    except DecodeError:
        raise
    except Exception as exc:
        raise DecodeError(path, str(exc)) from exc


def write_ppm(path_or_file, image: np.ndarray) -> None:
    """Write an (H, W, 3) uint8 array as a binary PPM (P6, maxval 255)."""
    if image.ndim != 3 or image.shape[2] != 3 or image.dtype != np.uint8:
        raise ValueError("write_ppm expects an (H, W, 3) uint8 array")
    header = b"P6\n%d %d\n255\n" % (image.shape[1], image.shape[0])
    if hasattr(path_or_file, "write"):
        path_or_file.write(header)
        path_or_file.write(np.ascontiguousarray(image).data)
    else:
        with open(path_or_file, "wb") as f:
            f.write(header)
            f.write(np.ascontiguousarray(image).data)


def read_image(path) -> np.ndarray:
    """Decode a PNG or PPM file to an (H, W, 3) uint8 array."""
    path = Path(path)
    if path.suffix.lower() in (".ppm", ".pnm"):
        return read_ppm(path)
    try:
        from PIL import Image

        with Image.open(path) as img:
            arr = np.asarray(img)
        return _to_rgb8(arr)
    except DecodeError:
        raise
    except Exception as exc:
        raise DecodeError(path, str(exc)) from exc


# --------------------------------------------------------------------------
# The grid
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class LightFieldGrid:
    """An m x n grid of equally sized RGB8 sub-aperture views.

    ``views`` has shape (rows_m, cols_n, view_height, view_width, 3) and is
    read-only; ``get_view`` returns zero-copy slices of it.
    """

    rows_m: int
    cols_n: int
    views: np.ndarray = field(repr=False)
    view_width: int
    view_height: int
    source_id: str = ""

    def __post_init__(self):
        if self.rows_m < 1 or self.cols_n < 1:
            raise ValueError("grid must be at least 1x1")
        expected = (self.rows_m, self.cols_n, self.view_height, self.view_width, 3)
        if self.views.shape != expected or self.views.dtype != np.uint8:
            raise ValueError(f"views array must be uint8 with shape {expected}")
        self.views.setflags(write=False)

    @classmethod
    def from_view_array(cls, views: np.ndarray, source_id: str = "") -> "LightFieldGrid":
        views = np.ascontiguousarray(views, dtype=np.uint8)
        m, n, h, w, _ = views.shape
        return cls(rows_m=m, cols_n=n, views=views, view_width=w, view_height=h,
                   source_id=source_id)

    def get_view(self, row: int, col: int) -> np.ndarray:
        """Constant-time access to one view; the result must not be mutated."""
        if not (0 <= row < self.rows_m and 0 <= col < self.cols_n):
            raise IndexError(
                f"view index ({row}, {col}) outside {self.rows_m}x{self.cols_n} grid"
            )
        return self.views[row, col]


# --------------------------------------------------------------------------
# Loaders
# --------------------------------------------------------------------------

def _pattern_fields(pattern: str) -> set:
    try:
        return {name for _, name, _, _ in string.Formatter().parse(pattern) if name}
    except ValueError as exc:
        raise ValueError(f"invalid filename template {pattern!r}: {exc}") from exc


def _validate_pattern(pattern: str) -> None:
    fields = _pattern_fields(pattern)
    if not fields <= {"row", "col", "index"}:
        raise ValueError(
            f"filename template may only use {{row}}, {{col}}, {{index}}; got {pattern!r}"
        )
    if not ({"row", "col"} <= fields or "index" in fields):
        raise ValueError(
            f"filename template needs {{row}} and {{col}}, or {{index}}: {pattern!r}"
        )


def load_from_directory(path, pattern: str, rows_m: int, cols_n: int) -> LightFieldGrid:
    """Load an m x n grid from per-view image files named by ``pattern``.

    ``pattern`` uses ``{row}``/``{col}`` or a row-major ``{index}``
    (index = row * cols_n + col), zero-based, with optional zero padding such
    as ``{index:03}``. Example: the HCI benchmark scenes ship 81 views named
    ``input_Cam000.png`` .. ``input_Cam080.png`` -> ``input_Cam{index:03}.png``
    with a 9x9 layout.
    """
    base = Path(path)
    _validate_pattern(pattern)

    views = None
    for r in range(rows_m):
        for c in range(cols_n):
            name = pattern.format(row=r, col=c, index=r * cols_n + c)
            fp = base / name
            if not fp.is_file():
                raise MissingViewError(r, c, fp)
            img = read_image(fp)
            if views is None:
                h, w = img.shape[:2]
                views = np.empty((rows_m, cols_n, h, w, 3), dtype=np.uint8)
            elif img.shape[:2] != (views.shape[2], views.shape[3]):
                raise DimensionMismatchError(
                    f"view ({r}, {c}) is {img.shape[1]}x{img.shape[0]}, "
                    f"expected {views.shape[3]}x{views.shape[2]}"
                )
            views[r, c] = img
    return LightFieldGrid.from_view_array(views, source_id=f"{base}:{pattern}")


def load_from_atlas(path, rows_m: int, cols_n: int) -> LightFieldGrid:
    """Slice a single atlas image into m x n equal tiles, row-major."""
    atlas = read_image(path)
    h, w = atlas.shape[:2]
    if h % rows_m or w % cols_n:
        raise IndivisibleAtlasError(
            f"atlas {w}x{h} not divisible into {rows_m}x{cols_n} tiles"
        )
    th, tw = h // rows_m, w // cols_n
    views = atlas.reshape(rows_m, th, cols_n, tw, 3).transpose(0, 2, 1, 3, 4)
    return LightFieldGrid.from_view_array(views, source_id=str(path))


def tile_atlas(grid: LightFieldGrid) -> np.ndarray:
    """Re-tile the grid's views into one atlas; inverse of ``load_from_atlas``."""
    m, n, h, w, _ = grid.views.shape
    return np.ascontiguousarray(
        grid.views.transpose(0, 2, 1, 3, 4).reshape(m * h, n * w, 3)
    )
