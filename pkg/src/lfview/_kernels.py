"""Hot-path pixel kernels, in numba and pure-numpy flavors.

The render loop spends nearly all of its per-frame budget in these two
operations: merging the stereo pair's color channels and (in batch contexts)
mapping pixel positions to grid indices. Both exist in two implementations
that must agree bit-for-bit:

* ``*_numpy`` -- vectorized numpy, always available, the reference.
* ``*_numba`` -- ``@njit`` compiled loops, ``None`` when numba is missing.

The active backend is chosen once at import time from the ``LFVIEW_BACKEND``
environment variable (``numba`` or ``numpy``); unset means numba when
importable, numpy otherwise. ``lfview-bench`` times both side by side.
"""

from __future__ import annotations

import math
import os

import numpy as np

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAS_NUMBA = False

ENV_FLAG = "LFVIEW_BACKEND"


def _pick_backend() -> str:
    choice = os.environ.get(ENV_FLAG, "").strip().lower()
    if choice == "numpy":
        return "numpy"
    if choice == "numba":
        if not HAS_NUMBA:
            raise RuntimeError(f"{ENV_FLAG}=numba requested but numba is not importable")
        return "numba"
    if choice:
        raise RuntimeError(f"{ENV_FLAG} must be 'numba' or 'numpy', got {choice!r}")
    return "numba" if HAS_NUMBA else "numpy"


BACKEND = _pick_backend()


# --------------------------------------------------------------------------
# Anaglyph channel merge: out.R = left.R, out.G = right.G, out.B = right.B
# --------------------------------------------------------------------------

def compose_rgb_numpy(left: np.ndarray, right: np.ndarray, out: np.ndarray) -> np.ndarray:
    out[:, :, 0] = left[:, :, 0]
    out[:, :, 1] = right[:, :, 1]
    out[:, :, 2] = right[:, :, 2]
    return out


if HAS_NUMBA:

    @njit(cache=True)
    def _compose_rgb_jit(left, right, out):
        h, w = left.shape[0], left.shape[1]
        for y in range(h):
            for x in range(w):
                out[y, x, 0] = left[y, x, 0]
                out[y, x, 1] = right[y, x, 1]
                out[y, x, 2] = right[y, x, 2]
        return out

    def compose_rgb_numba(left: np.ndarray, right: np.ndarray, out: np.ndarray) -> np.ndarray:
        return _compose_rgb_jit(left, right, out)

else:  # pragma: no cover
    compose_rgb_numba = None


# --------------------------------------------------------------------------
# Batch nearest-grid-index mapping (closed form, ties to the smaller index).
#
# Grid point pixel positions along one axis: center + sign*(i - (count-1)/2)*alpha.
# The nearest index to a position v is the integer nearest to
#   t = (v - center) / (sign*alpha) + (count-1)/2
# with exact half-way ties resolved downward, i.e. ceil(t - 0.5), then clamped.
# --------------------------------------------------------------------------

def nearest_indices_numpy(
    values: np.ndarray, center: float, sign: float, alpha: float, count: int
) -> np.ndarray:
    t = (values - center) / (sign * alpha) + (count - 1) / 2.0
    idx = np.ceil(t - 0.5)
    return np.clip(idx, 0, count - 1).astype(np.int64)


if HAS_NUMBA:

    @njit(cache=True)
    def _nearest_indices_jit(values, center, sign, alpha, count, out):
        half = (count - 1) / 2.0
        scale = sign * alpha
        for i in range(values.shape[0]):
            t = (values[i] - center) / scale + half
            idx = int(math.ceil(t - 0.5))
            if idx < 0:
                idx = 0
            elif idx >= count:
                idx = count - 1
            out[i] = idx
        return out

    def nearest_indices_numba(
        values: np.ndarray, center: float, sign: float, alpha: float, count: int
    ) -> np.ndarray:
        out = np.empty(values.shape[0], dtype=np.int64)
        return _nearest_indices_jit(
            np.ascontiguousarray(values, dtype=np.float64),
            float(center), float(sign), float(alpha), count, out,
        )

else:  # pragma: no cover
    nearest_indices_numba = None


# Active implementations used by the pipeline.
if BACKEND == "numba":
    compose_rgb = compose_rgb_numba
    nearest_indices = nearest_indices_numba
else:
    compose_rgb = compose_rgb_numpy
    nearest_indices = nearest_indices_numpy


def warmup(height: int, width: int) -> None:
    """Trigger JIT compilation for the signatures used by the render loop.

    No-op on the numpy backend. Called once at viewer startup so compilation
    cost never lands inside a timed frame. Inputs are read-only arrays because
    the grid serves read-only views and numba types those distinctly.
    """
    if BACKEND != "numba":
        return
    dummy = np.zeros((height, width, 3), dtype=np.uint8)
    dummy.setflags(write=False)
    compose_rgb(dummy, dummy, np.empty((height, width, 3), dtype=np.uint8))
    xs = np.zeros(4)
    xs.setflags(write=False)
    nearest_indices(xs, 0.0, 1.0, 1.0, 2)
