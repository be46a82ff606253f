import numpy as np
import pytest

from lfview.lightfield import write_ppm


def oracle_map(pos, cfg):
    """Exhaustive nearest-neighbor over all grid points, ties to smaller (row, col).

    Independent of the production mapping: it enumerates grid-point pixel
    positions and compares squared distances directly.
    """
    sx = -1.0 if cfg.mirror_x else 1.0
    sy = -1.0 if cfg.invert_y else 1.0
    cx, cy = cfg.center
    best_d, best = None, None
    for r in range(cfg.rows_m):
        for c in range(cfg.cols_n):
            px = cx + sx * (c - (cfg.cols_n - 1) / 2.0) * cfg.alpha
            py = cy + sy * (r - (cfg.rows_m - 1) / 2.0) * cfg.alpha
            d = (pos[0] - px) ** 2 + (pos[1] - py) ** 2
            if best_d is None or d < best_d:
                best_d, best = d, (r, c)
    return best


def oracle_map_batch(xs, ys, cfg):
    """Vectorized exhaustive search; row-major argmin implements the tie-break."""
    sx = -1.0 if cfg.mirror_x else 1.0
    sy = -1.0 if cfg.invert_y else 1.0
    gx = cfg.center[0] + sx * (np.arange(cfg.cols_n) - (cfg.cols_n - 1) / 2.0) * cfg.alpha
    gy = cfg.center[1] + sy * (np.arange(cfg.rows_m) - (cfg.rows_m - 1) / 2.0) * cfg.alpha
    d2 = (xs[:, None, None] - gx[None, None, :]) ** 2 + (ys[:, None, None] - gy[None, :, None]) ** 2
    flat_idx = np.argmin(d2.reshape(len(xs), -1), axis=1)
    return flat_idx // cfg.cols_n, flat_idx % cfg.cols_n


def random_rgb(rng, height, width):
    return rng.integers(0, 256, (height, width, 3), dtype=np.uint8)


def make_view_stack(rng, rows_m, cols_n, height, width):
    return rng.integers(0, 256, (rows_m, cols_n, height, width, 3), dtype=np.uint8)


def tagged_view_stack(rows_m, cols_n, height, width):
    """Views whose solid color encodes (row, col), so frame bytes identify views."""
    views = np.zeros((rows_m, cols_n, height, width, 3), dtype=np.uint8)
    for r in range(rows_m):
        for c in range(cols_n):
            views[r, c] = (10 + r * 20, 10 + c * 20, 100 + r + c)
    return views


def views_to_atlas(views):
    m, n, h, w, _ = views.shape
    return np.ascontiguousarray(views.transpose(0, 2, 1, 3, 4).reshape(m * h, n * w, 3))


@pytest.fixture
def rng():
    return np.random.default_rng(42)


@pytest.fixture
def atlas_grid_9x9(tmp_path):
    """A 9x9 atlas of 16x12 tagged views, written as PPM; returns its path."""
    atlas = views_to_atlas(tagged_view_stack(9, 9, 12, 16))
    path = tmp_path / "atlas9.ppm"
    write_ppm(path, atlas)
    return path
