"""Per-stage frame timings, rolling FPS, and the viewer's JSON report."""

from __future__ import annotations

import json
from collections import deque

import numpy as np

__all__ = ["STAGES", "FPS_WINDOW_FRAMES", "FrameMetrics", "report_metrics"]

STAGES = ("ingest", "smooth", "map", "compose", "present")

# 120 frames = a 4 s window at the 30 Hz camera rate: long enough to be
# stable, short enough not to hide drift.
FPS_WINDOW_FRAMES = 120


class FrameMetrics:
    """Accumulates per-frame stage durations, view transitions and FPS.

    Rolling FPS is frames-per-wall-time over the last ``window`` frame
    intervals; stage means and p99s cover the whole run.
    """

    def __init__(self, window: int = FPS_WINDOW_FRAMES):
        self._stamps = deque(maxlen=window + 1)
        self._stage_us = {name: [] for name in STAGES}
        self.frames = 0
        self.transitions = {"left": 0, "right": 0}
        self._last_selection = None

    def record_frame(self, stage_us: dict, selection, stamp: float) -> None:
        """Record one rendered frame.

        ``stage_us`` maps stage name -> duration in microseconds;
        ``selection`` is the frame's ViewSelection; ``stamp`` is the
        monotonic completion time in seconds.
        """
        for name, value in stage_us.items():
            self._stage_us[name].append(value)
        self._stamps.append(stamp)
        self.frames += 1
        if self._last_selection is not None:
            if selection.left != self._last_selection.left:
                self.transitions["left"] += 1
            if selection.right != self._last_selection.right:
                self.transitions["right"] += 1
        self._last_selection = selection

    def rolling_fps(self) -> float:
        if len(self._stamps) < 2:
            return 0.0
        span = self._stamps[-1] - self._stamps[0]
        if span <= 0:
            return 0.0
        return (len(self._stamps) - 1) / span

    def stage_stats(self) -> dict:
        stats = {}
        for name in STAGES:
            samples = self._stage_us[name]
            if samples:
                arr = np.asarray(samples)
                stats[name] = {
                    "mean_us": float(arr.mean()),
                    "p99_us": float(np.percentile(arr, 99)),
                }
            else:
                stats[name] = {"mean_us": 0.0, "p99_us": 0.0}
        return stats


def report_metrics(metrics: FrameMetrics, extra: dict = None) -> dict:
    """Build the stable-schema report for a run of at least one frame."""
    if metrics.frames < 1:
        raise ValueError("metrics report requires at least one rendered frame")
    report = {
        "fps": metrics.rolling_fps(),
        "frames": metrics.frames,
        "stages": metrics.stage_stats(),
        "transitions": dict(metrics.transitions),
    }
    if extra:
        report.update(extra)
    return report


def write_metrics(report: dict, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(report, f, indent=2)
        f.write("\n")
