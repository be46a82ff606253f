import math

import numpy as np
import pytest

from lfview.gaze import (
    EyeSample,
    GridConfig,
    SmoothingFilter,
    map_eye_to_view,
    select_views,
)

from conftest import oracle_map, oracle_map_batch


def sample_at(lx, ly, rx, ry, w=640, h=480):
    return EyeSample(t_us=0, lx=lx, ly=ly, rx=rx, ry=ry, frame_w=w, frame_h=h)


CFG99 = dict(rows_m=9, cols_n=9, frame_w=640, frame_h=480)


# ------------------------------------------------------------------ smoothing

def test_smooth_k1_is_identity():
    f = SmoothingFilter(k=1)
    s = sample_at(123.4, 56.7, 200.1, 58.2)
    assert f.smooth(s) == s


def test_smooth_k3_growing_then_sliding_window():
    f = SmoothingFilter(k=3)
    outs = []
    for x in (0, 10, 20, 30):
        outs.append(f.smooth(sample_at(x, 0, 0, 0)).lx)
    assert outs == [0, 5, 10, 20]


def test_smooth_constant_input_passes_through():
    f = SmoothingFilter(k=5)
    for _ in range(10):
        out = f.smooth(sample_at(320, 240, 320, 240))
        assert (out.lx, out.ly) == (320, 240)


def test_smooth_matches_resummation_oracle(rng):
    for k in (1, 3, 5, 30):
        f = SmoothingFilter(k=k)
        history = []
        for _ in range(100):
            vals = rng.uniform(0, 640, 4)
            history.append(vals)
            out = f.smooth(sample_at(*vals))
            window = history[-k:]
            for got, idx in zip((out.lx, out.ly, out.rx, out.ry), range(4)):
                expected = sum(v[idx] for v in window) / len(window)
                assert abs(got - expected) <= 1e-9


def test_smooth_exact_after_k_identical_samples():
    f = SmoothingFilter(k=4)
    s = sample_at(101.25, 202.5, 303.75, 50.0)
    for _ in range(4):
        out = f.smooth(s)
    assert (out.lx, out.ly, out.rx, out.ry) == (101.25, 202.5, 303.75, 50.0)


def test_smooth_preserves_timestamp_and_dims():
    f = SmoothingFilter(k=2)
    s = EyeSample(t_us=777, lx=1, ly=2, rx=3, ry=4, frame_w=100, frame_h=50, conf=0.7)
    out = f.smooth(s)
    assert (out.t_us, out.frame_w, out.frame_h, out.conf) == (777, 100, 50, 0.7)


def test_filter_rejects_bad_k():
    with pytest.raises(ValueError):
        SmoothingFilter(k=0)


# -------------------------------------------------------------------- mapping

def test_map_center_pixel_hits_center_view():
    for alpha in (5, 40, 200):
        for mx in (True, False):
            for iy in (True, False):
                cfg = GridConfig(alpha=alpha, mirror_x=mx, invert_y=iy, **CFG99)
                assert map_eye_to_view((320, 240), cfg) == (4, 4)


def test_map_four_steps_right_of_center():
    cfg = GridConfig(alpha=40, mirror_x=False, invert_y=False, **CFG99)
    # x offset 160 px = 4 grid steps right of the center column
    assert map_eye_to_view((480, 240), cfg) == (4, 8)
    assert map_eye_to_view((480, 240), cfg) == oracle_map((480, 240), cfg)


def test_map_frame_corner_dense_grid_clamps_to_corner_view():
    # Dense grid: the footprint sits inside the frame, so the frame corner is
    # beyond the outermost grid point and clamps to the corner view.
    cfg = GridConfig(alpha=20, mirror_x=False, invert_y=False, **CFG99)
    assert oracle_map((0, 0), cfg) == (0, 0)
    assert map_eye_to_view((0, 0), cfg) == (0, 0)


def test_map_frame_corner_sparse_grid_follows_oracle():
    # With alpha=200 the grid extends past the frame; the corner pixel is then
    # nearest an interior grid point, per exhaustive search.
    cfg = GridConfig(alpha=200, mirror_x=False, invert_y=False, **CFG99)
    expected = oracle_map((0, 0), cfg)
    assert expected == (3, 2)
    assert map_eye_to_view((0, 0), cfg) == expected


def test_map_tie_breaks_to_smaller_index():
    cfg = GridConfig(alpha=40, mirror_x=False, invert_y=False, **CFG99)
    # x=340 is exactly halfway between the col-4 (320) and col-5 (360) points
    assert map_eye_to_view((340, 240), cfg) == (4, 4)
    assert oracle_map((340, 240), cfg) == (4, 4)
    # same midpoint in y between rows 4 and 5
    assert map_eye_to_view((320, 260), cfg) == (4, 4)
    cfg_m = GridConfig(alpha=40, mirror_x=True, invert_y=False, **CFG99)
    # mirrored: x=340 halfway between col 3 (360) and col 4 (320) -> smaller col
    assert map_eye_to_view((340, 240), cfg_m) == (4, 3)
    assert oracle_map((340, 240), cfg_m) == (4, 3)


def test_map_oracle_equivalence_randomized(rng):
    for alpha in (20, 40, 120):
        for mx in (True, False):
            for iy in (True, False):
                cfg = GridConfig(alpha=alpha, mirror_x=mx, invert_y=iy, **CFG99)
                xs = rng.uniform(-200, 840, 2000)
                ys = rng.uniform(-200, 680, 2000)
                rows, cols = oracle_map_batch(xs, ys, cfg)
                for x, y, r, c in zip(xs, ys, rows, cols):
                    assert map_eye_to_view((x, y), cfg) == (r, c)


def test_map_oracle_equivalence_every_pixel_one_config():
    cfg = GridConfig(alpha=40, mirror_x=True, invert_y=True, **CFG99)
    xs, ys = np.meshgrid(np.arange(640, dtype=float), np.arange(480, dtype=float))
    xs, ys = xs.ravel(), ys.ravel()
    got = np.empty((len(xs), 2), dtype=np.int64)
    for i in range(len(xs)):
        got[i] = map_eye_to_view((xs[i], ys[i]), cfg)
    for start in range(0, len(xs), 40_000):
        sl = slice(start, start + 40_000)
        rows, cols = oracle_map_batch(xs[sl], ys[sl], cfg)
        assert np.array_equal(got[sl, 0], rows)
        assert np.array_equal(got[sl, 1], cols)


def test_map_bounds_for_wild_positions(rng):
    cfg = GridConfig(alpha=33.7, mirror_x=True, invert_y=True, rows_m=5, cols_n=7,
                     frame_w=640, frame_h=480)
    for _ in range(500):
        pos = (rng.uniform(-1e6, 1e6), rng.uniform(-1e6, 1e6))
        r, c = map_eye_to_view(pos, cfg)
        assert 0 <= r < 5 and 0 <= c < 7


def test_map_step_property():
    cfg = GridConfig(alpha=40, mirror_x=False, invert_y=False, **CFG99)
    # along the grid's horizontal axis, +alpha in x = +1 column (away from clamp)
    for x in np.linspace(180, 420, 25):
        r0, c0 = map_eye_to_view((x, 240), cfg)
        r1, c1 = map_eye_to_view((x + 40, 240), cfg)
        assert r1 == r0 and c1 == c0 + 1


def test_map_transitions_at_midpoints_spacing_alpha():
    alpha = 40
    cfg = GridConfig(alpha=alpha, mirror_x=False, invert_y=False, **CFG99)
    xs = np.arange(0.0, 640.0, 0.25)
    cols = np.array([map_eye_to_view((x, 240), cfg)[1] for x in xs])
    changes = np.nonzero(np.diff(cols))[0]
    transition_xs = xs[changes + 1]  # first x holding the new column
    assert len(transition_xs) == 8
    # consecutive transitions exactly alpha apart
    assert np.allclose(np.diff(transition_xs), alpha)
    # each transition sits just past the midpoint between adjacent grid columns
    midpoints = 320 + (np.arange(8) - 3.5) * alpha
    assert np.all(transition_xs > midpoints)
    assert np.all(transition_xs - midpoints <= 0.25 + 1e-12)


def test_map_translation_invariance(rng):
    base = GridConfig(alpha=25, mirror_x=True, invert_y=False, **CFG99)
    for _ in range(200):
        pos = (rng.uniform(0, 640), rng.uniform(0, 480))
        shift = (rng.uniform(-300, 300), rng.uniform(-300, 300))
        moved = GridConfig(alpha=25, mirror_x=True, invert_y=False,
                           rows_m=9, cols_n=9, frame_w=640, frame_h=480,
                           center=(base.center[0] + shift[0], base.center[1] + shift[1]))
        assert map_eye_to_view(pos, base) == map_eye_to_view(
            (pos[0] + shift[0], pos[1] + shift[1]), moved)


# ---------------------------------------------------------------- select_views

def test_select_views_mirror_flips_direction():
    cfg = GridConfig(alpha=40, mirror_x=True, invert_y=True, **CFG99)
    # with mirroring, the eye at smaller camera x selects the larger column
    sel = select_views(sample_at(295, 240, 335, 240), cfg)
    assert sel.left == (4, 5)
    assert sel.right == (4, 4)
    assert sel.left == oracle_map((295, 240), cfg)
    assert sel.right == oracle_map((335, 240), cfg)


def test_select_views_midpoint_ties_resolve_to_smaller_column():
    cfg = GridConfig(alpha=40, mirror_x=True, invert_y=True, **CFG99)
    # 300 and 340 sit exactly on mirrored-grid midpoints; ties -> smaller col
    sel = select_views(sample_at(300, 240, 340, 240), cfg)
    assert sel.left == oracle_map((300, 240), cfg) == (4, 4)
    assert sel.right == oracle_map((340, 240), cfg) == (4, 3)


def test_select_views_identical_eyes_collapse():
    cfg = GridConfig(alpha=40, **CFG99)
    sel = select_views(sample_at(320, 240, 320, 240), cfg)
    assert sel.left == sel.right == (4, 4)


def test_select_views_small_separation_sparse_grid_same_column():
    cfg = GridConfig(alpha=200, mirror_x=False, invert_y=False, **CFG99)
    sel = select_views(sample_at(320 + 32.5, 240, 320 - 32.5, 240), cfg)
    assert sel.left[1] == sel.right[1] == 4
    assert sel.left == oracle_map((352.5, 240), cfg)
    assert sel.right == oracle_map((287.5, 240), cfg)


def test_stereo_baseline_disparity_bounds(rng):
    cfg = GridConfig(alpha=40, mirror_x=False, invert_y=False, **CFG99)
    for d in (30, 65, 130):
        for _ in range(300):
            # keep both eyes away from clamping so the step math is exact
            mid = rng.uniform(320 - 120, 320 + 120)
            sel = select_views(sample_at(mid + d / 2, 240, mid - d / 2, 240), cfg)
            disparity = abs(sel.left[1] - sel.right[1])
            assert disparity in (math.floor(d / 40), math.ceil(d / 40))


# ------------------------------------------------------------------- configs

def test_grid_config_validation():
    with pytest.raises(ValueError):
        GridConfig(alpha=0, **CFG99)
    with pytest.raises(ValueError):
        GridConfig(alpha=-3, **CFG99)
    with pytest.raises(ValueError):
        GridConfig(rows_m=0, cols_n=9, alpha=40, frame_w=640, frame_h=480)


def test_grid_config_default_center():
    cfg = GridConfig(alpha=40, **CFG99)
    assert cfg.center == (320.0, 240.0)


def test_grid_point_positions():
    cfg = GridConfig(alpha=40, mirror_x=False, invert_y=False, **CFG99)
    assert cfg.grid_point(4, 4) == (320.0, 240.0)
    assert cfg.grid_point(4, 8) == (480.0, 240.0)
    mirrored = GridConfig(alpha=40, mirror_x=True, invert_y=True, **CFG99)
    assert mirrored.grid_point(4, 8) == (160.0, 240.0)
    assert mirrored.grid_point(0, 4) == (320.0, 400.0)
