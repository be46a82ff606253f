"""Map smoothed per-eye camera-frame positions onto grid view indices.

The virtual grid is overlaid on the camera frame: grid point (r, c) sits at

    ( cx + sx * (c - (cols_n - 1) / 2) * alpha,
      cy + sy * (r - (rows_m - 1) / 2) * alpha )

where sx is -1 when ``mirror_x`` (webcam images are mirror-reversed relative
to the viewer, so rightward head motion must select rightward viewpoints) and
sy is -1 when ``invert_y`` (image y grows downward, capture rows grow upward).
Each eye maps independently to the Euclidean-nearest grid point; equidistant
ties resolve to the smaller row, then the smaller column. Positions beyond
the outermost grid points clamp to the edge views by construction.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import NamedTuple

__all__ = [
    "EyeSample",
    "SmoothingFilter",
    "GridConfig",
    "ViewSelection",
    "map_eye_to_view",
    "select_views",
    "clamp_to_frame",
]


def clamp_to_frame(x: float, y: float, frame_w: int, frame_h: int) -> tuple:
    """Clamp a pixel position into [0, frame_w-1] x [0, frame_h-1]."""
    return (min(max(x, 0.0), frame_w - 1.0), min(max(y, 0.0), frame_h - 1.0))


@dataclass(frozen=True)
class EyeSample:
    """Timestamped left/right eye pixel positions in the camera frame.

    Coordinates are expected to satisfy 0 <= x < frame_w, 0 <= y < frame_h;
    ingestion clamps before constructing samples.
    """

    t_us: int
    lx: float
    ly: float
    rx: float
    ry: float
    frame_w: int
    frame_h: int
    conf: float = 1.0

    @property
    def left(self) -> tuple:
        return (self.lx, self.ly)

    @property
    def right(self) -> tuple:
        return (self.rx, self.ry)


class SmoothingFilter:
    """Per-coordinate moving average over the last ``k`` frames.

    The window starts empty and averages over however many samples exist
    (min(count, k)), so there is no startup jump from zero-initialization.
    """

    def __init__(self, k: int = 5):
        if k < 1:
            raise ValueError("window length k must be >= 1")
        self.k = k
        self._windows = tuple(deque(maxlen=k) for _ in range(4))

    def smooth(self, sample: EyeSample) -> EyeSample:
        """Advance the filter by one frame and return the averaged sample."""
        coords = (sample.lx, sample.ly, sample.rx, sample.ry)
        means = []
        for window, value in zip(self._windows, coords):
            window.append(value)
            means.append(sum(window) / len(window))
        return EyeSample(
            t_us=sample.t_us,
            lx=means[0], ly=means[1], rx=means[2], ry=means[3],
            frame_w=sample.frame_w, frame_h=sample.frame_h,
            conf=sample.conf,
        )

    def __len__(self) -> int:
        return len(self._windows[0])


@dataclass(frozen=True)
class GridConfig:
    """Virtual grid overlay: layout, spacing and orientation on the camera frame.

    ``alpha`` is the spacing between adjacent grid points in camera-frame
    pixels. ``center`` defaults to the frame center.
    """

    rows_m: int
    cols_n: int
    alpha: float
    frame_w: int
    frame_h: int
    center: tuple = None
    mirror_x: bool = True
    invert_y: bool = True

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValueError("alpha must be > 0")
        if self.rows_m < 1 or self.cols_n < 1:
            raise ValueError("grid must be at least 1x1")
        if self.center is None:
            object.__setattr__(self, "center", (self.frame_w / 2.0, self.frame_h / 2.0))

    @property
    def sx(self) -> float:
        return -1.0 if self.mirror_x else 1.0

    @property
    def sy(self) -> float:
        return -1.0 if self.invert_y else 1.0

    def grid_point(self, row: int, col: int) -> tuple:
        """Pixel position of grid point (row, col) on the camera frame."""
        cx, cy = self.center
        return (
            cx + self.sx * (col - (self.cols_n - 1) / 2.0) * self.alpha,
            cy + self.sy * (row - (self.rows_m - 1) / 2.0) * self.alpha,
        )


class ViewSelection(NamedTuple):
    left: tuple   # (row, col)
    right: tuple  # (row, col)


def _nearest_index(value: float, center: float, sign: float, alpha: float, count: int) -> int:
    # Nearest integer to the continuous grid coordinate; an exact half-way tie
    # lands on ceil(t - 0.5) == t - 0.5, which is the smaller index.
    t = (value - center) / (sign * alpha) + (count - 1) / 2.0
    idx = math.ceil(t - 0.5)
    if idx < 0:
        return 0
    if idx >= count:
        return count - 1
    return idx


def map_eye_to_view(pos: tuple, cfg: GridConfig) -> tuple:
    """Return the (row, col) of the grid point nearest to ``pos``.

    Because grid-point x depends only on the column and y only on the row,
    the 2D nearest neighbor factors into two 1D problems; ties resolve to
    the smaller row, then the smaller column. The result is always inside
    [0, rows_m) x [0, cols_n) for any input position.
    """
    x, y = pos
    cx, cy = cfg.center
    col = _nearest_index(x, cx, cfg.sx, cfg.alpha, cfg.cols_n)
    row = _nearest_index(y, cy, cfg.sy, cfg.alpha, cfg.rows_m)
    return (row, col)


def select_views(sample: EyeSample, cfg: GridConfig) -> ViewSelection:
    """Map both eyes independently to their nearest views.

    No minimum disparity is enforced: close eye positions (relative to the
    grid spacing) may legitimately collapse to the same view.
    """
    return ViewSelection(
        left=map_eye_to_view(sample.left, cfg),
        right=map_eye_to_view(sample.right, cfg),
    )
