"""Red-cyan anaglyph compositing of the selected stereo view pair.

Plain color-anaglyph channel routing: the output takes its red channel from
the left view and green/blue from the right view, per 8-bit channel with no
gamma handling. Both operations are pure and byte-deterministic.
"""

from __future__ import annotations

import numpy as np

from . import _kernels
from .errors import DimensionMismatchError

__all__ = ["compose", "compose_into"]


def _check_pair(left: np.ndarray, right: np.ndarray) -> None:
    if left.shape != right.shape:
        raise DimensionMismatchError(
            f"left view {left.shape} and right view {right.shape} differ"
        )
    if left.ndim != 3 or left.shape[2] != 3 or left.dtype != np.uint8:
        raise ValueError("views must be (H, W, 3) uint8 arrays")


def compose(left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """Composite a stereo pair into a new anaglyph frame."""
    _check_pair(left, right)
    out = np.empty_like(left)
    return _kernels.compose_rgb(left, right, out)


def compose_into(left: np.ndarray, right: np.ndarray, out: np.ndarray) -> np.ndarray:
    """Composite into a caller-owned buffer; allocation-free when sized right.

    The caller must hold exclusive access to ``out`` for the duration of the
    call; this is the 30 FPS hot path.
    """
    _check_pair(left, right)
    if out.shape != left.shape or out.dtype != np.uint8:
        raise DimensionMismatchError(
            f"output buffer {out.shape} does not match views {left.shape}"
        )
    return _kernels.compose_rgb(left, right, out)
