"""Application shell: render loop, display/headless sinks, metrics reporter.

The loop is sample-driven: a frame is composed only when a tracker sample
arrives, so the camera (or the synthetic/replay schedule standing in for it)
pins the frame rate. Two wiring modes:

* lockstep -- synth and replay sources are iterated directly by the render
  loop, one frame per sample, which makes headless runs exactly reproducible;
  paced sources still sleep to their schedule so reported FPS is meaningful.
* threaded -- udp/stdin sources run in an ingestion thread writing the
  latest-value mailbox; the render loop waits for fresh samples and holds the
  last pose on dropouts. The loop never consumes a stale backlog.

All image buffers are allocated before the loop starts and reused; a debug
counter tracks frame-buffer allocations so tests can pin the steady state.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import _kernels
from .anaglyph import compose_into
from .gaze import EyeSample, GridConfig, SmoothingFilter, select_views
from .lightfield import LightFieldGrid, load_from_atlas, load_from_directory
from .metrics import FrameMetrics, report_metrics, write_metrics
from .protocol import (
    DEFAULT_UDP_PORT,
    Mailbox,
    ReplaySource,
    StdinSource,
    SynthSource,
    TrajectorySpec,
    UdpSource,
    sleep_until,
    source_run,
)

__all__ = ["ViewerConfig", "run", "build_source", "HeadlessSink", "WindowSink"]

# Samples below this confidence hold the last smoothed pose instead of
# advancing the filter, so momentary dropouts never snap the view.
CONF_HOLD_THRESHOLD = 0.5

_frame_buffer_allocs = 0


def _new_frame_buffer(height: int, width: int) -> np.ndarray:
    global _frame_buffer_allocs
    _frame_buffer_allocs += 1
    return np.empty((height, width, 3), dtype=np.uint8)


def frame_buffer_allocs() -> int:
    """Debug counter: how many frame buffers have ever been allocated."""
    return _frame_buffer_allocs


@dataclass
class ViewerConfig:
    lightfield: str
    layout: str = "auto"            # "atlas" | "pattern:TEMPLATE" | "auto"
    rows_m: int = 9
    cols_n: int = 9
    alpha: float = 40.0
    mirror_x: bool = True
    invert_y: bool = True
    center: Optional[tuple] = None
    smooth_k: int = 5
    tracker: str = f"udp:{DEFAULT_UDP_PORT}"
    display: str = "headless"       # "headless" | "windowed" | "fullscreen"
    out_dir: Optional[str] = None
    frame_cap: Optional[int] = None
    metrics_path: Optional[str] = None


# --------------------------------------------------------------------------
# Construction helpers
# --------------------------------------------------------------------------

def load_grid(cfg: ViewerConfig) -> LightFieldGrid:
    path = Path(cfg.lightfield)
    layout = cfg.layout
    if layout == "auto":
        if path.is_file():
            layout = "atlas"
        else:
            raise ValueError(
                f"--layout auto needs an atlas file; {path} is a directory, "
                "pass --layout pattern:TEMPLATE"
            )
    if layout == "atlas":
        return load_from_atlas(path, cfg.rows_m, cfg.cols_n)
    if layout.startswith("pattern:"):
        return load_from_directory(path, layout[len("pattern:"):], cfg.rows_m, cfg.cols_n)
    raise ValueError(f"unknown layout {cfg.layout!r}")


def build_source(tracker: str):
    """Build a sample source from its CLI spec string.

    Formats: ``udp:PORT``, ``stdin``, ``replay:PATH[,realtime]``,
    ``synth:KIND,AMPLITUDE,PERIOD,EYE_SEP,RATE,DURATION``.
    """
    kind, _, rest = tracker.partition(":")
    if kind == "udp":
        return UdpSource(int(rest) if rest else DEFAULT_UDP_PORT)
    if kind == "stdin":
        return StdinSource()
    if kind == "replay":
        path, _, opt = rest.partition(",")
        if not path:
            raise ValueError("replay source needs a file path")
        realtime = opt.strip().lower() == "realtime"
        return ReplaySource(path, realtime=realtime)
    if kind == "synth":
        parts = rest.split(",")
        if len(parts) != 6:
            raise ValueError(
                "synth source needs KIND,AMPLITUDE,PERIOD,EYE_SEP,RATE,DURATION"
            )
        spec = TrajectorySpec(
            kind=parts[0].strip(),
            amplitude=float(parts[1]),
            period=float(parts[2]),
            eye_separation=float(parts[3]),
            rate=float(parts[4]),
            duration=float(parts[5]),
        )
        return SynthSource(spec)
    raise ValueError(f"unknown tracker source {tracker!r}")


class HeadlessSink:
    """Writes each frame as frame_{index:06}.ppm under ``out_dir``."""

    def __init__(self, out_dir):
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self._header = None

    def present(self, frame: np.ndarray, index: int) -> None:
        if self._header is None:
            self._header = b"P6\n%d %d\n255\n" % (frame.shape[1], frame.shape[0])
        with open(self.out_dir / f"frame_{index:06}.ppm", "wb") as f:
            f.write(self._header)
            f.write(frame.data)

    def close(self) -> None:
        pass


class WindowSink:
    """OpenCV window presentation, nearest-neighbor scaled by the OS."""

    def __init__(self, fullscreen: bool = False):
        try:
            import cv2
        except ImportError as exc:
            raise RuntimeError(
                "windowed display requires OpenCV (pip install opencv-python); "
                "use --headless otherwise"
            ) from exc
        self._cv2 = cv2
        self._bgr = None
        try:
            cv2.namedWindow("lfview", cv2.WINDOW_NORMAL)
            if fullscreen:
                cv2.setWindowProperty(
                    "lfview", cv2.WND_PROP_FULLSCREEN, cv2.WINDOW_FULLSCREEN
                )
        except cv2.error as exc:
            raise RuntimeError(
                "no display surface available (headless OpenCV build or no "
                "display server); use --headless"
            ) from exc

    def present(self, frame: np.ndarray, index: int) -> None:
        cv2 = self._cv2
        if self._bgr is None:
            self._bgr = _new_frame_buffer(frame.shape[0], frame.shape[1])
        cv2.cvtColor(frame, cv2.COLOR_RGB2BGR, dst=self._bgr)
        cv2.imshow("lfview", self._bgr)
        cv2.waitKey(1)

    def close(self) -> None:
        self._cv2.destroyAllWindows()


# --------------------------------------------------------------------------
# Render pipeline
# --------------------------------------------------------------------------

class _Pipeline:
    """Per-frame smooth -> map -> compose -> present, with stage timing."""

    def __init__(self, grid: LightFieldGrid, cfg: ViewerConfig, sink, metrics: FrameMetrics):
        self.grid = grid
        self.cfg = cfg
        self.sink = sink
        self.metrics = metrics
        self.filter = SmoothingFilter(cfg.smooth_k)
        self.frame_buf = _new_frame_buffer(grid.view_height, grid.view_width)
        self._gcfg: Optional[GridConfig] = None
        self._held: Optional[EyeSample] = None

    def _grid_config(self, sample: EyeSample) -> GridConfig:
        gcfg = self._gcfg
        if gcfg is None or (gcfg.frame_w, gcfg.frame_h) != (sample.frame_w, sample.frame_h):
            gcfg = GridConfig(
                rows_m=self.grid.rows_m,
                cols_n=self.grid.cols_n,
                alpha=self.cfg.alpha,
                frame_w=sample.frame_w,
                frame_h=sample.frame_h,
                center=self.cfg.center,
                mirror_x=self.cfg.mirror_x,
                invert_y=self.cfg.invert_y,
            )
            self._gcfg = gcfg
        return gcfg

    def process(self, sample: EyeSample, ingest_us: float) -> None:
        perf = time.perf_counter
        gcfg = self._grid_config(sample)

        t0 = perf()
        if sample.conf >= CONF_HOLD_THRESHOLD or self._held is None:
            smoothed = self.filter.smooth(sample)
            self._held = smoothed
        else:
            smoothed = self._held  # tracking loss: hold, do not reset the filter
        t1 = perf()
        selection = select_views(smoothed, gcfg)
        t2 = perf()
        compose_into(
            self.grid.get_view(*selection.left),
            self.grid.get_view(*selection.right),
            self.frame_buf,
        )
        t3 = perf()
        self.sink.present(self.frame_buf, self.metrics.frames)
        t4 = perf()

        self.metrics.record_frame(
            {
                "ingest": ingest_us,
                "smooth": (t1 - t0) * 1e6,
                "map": (t2 - t1) * 1e6,
                "compose": (t3 - t2) * 1e6,
                "present": (t4 - t3) * 1e6,
            },
            selection,
            stamp=t4,
        )


# --------------------------------------------------------------------------
# The run loop
# --------------------------------------------------------------------------

def _run_lockstep(source, pipeline: _Pipeline, cap: Optional[int], stop: threading.Event):
    perf = time.perf_counter
    events = source.events(stop)
    try:
        while not stop.is_set():
            t0 = perf()
            item = next(events, None)
            t1 = perf()
            if item is None:
                break
            due, sample = item
            if due is not None:
                sleep_until(due)
            pipeline.process(sample, (t1 - t0) * 1e6)
            if cap is not None and pipeline.metrics.frames >= cap:
                break
    finally:
        source.close()


def _run_threaded(source, pipeline: _Pipeline, cap: Optional[int], stop: threading.Event):
    perf = time.perf_counter
    mailbox = Mailbox()
    thread = threading.Thread(
        target=source_run, args=(source, mailbox, stop), daemon=True
    )
    thread.start()
    last_seq = 0
    try:
        while not stop.is_set():
            if mailbox.wait_next(last_seq, timeout=0.1) is None:
                if not thread.is_alive() and mailbox.latest()[0] == last_seq:
                    break  # source finished and everything was consumed
                continue
            t0 = perf()
            last_seq, sample = mailbox.latest()
            t1 = perf()
            pipeline.process(sample, (t1 - t0) * 1e6)
            if cap is not None and pipeline.metrics.frames >= cap:
                break
    finally:
        stop.set()
        thread.join(timeout=2.0)


def run(cfg: ViewerConfig, stop: Optional[threading.Event] = None) -> dict:
    """Run the viewer to completion and return the exit report.

    Startup failures (light field, tracker source, display surface) raise;
    runtime tracking loss is not an error. On exit the metrics JSON is
    written to ``cfg.metrics_path`` (default: ``out_dir/metrics.json`` for
    headless runs).
    """
    grid = load_grid(cfg)
    if grid.cols_n < 2:
        raise ValueError("stereo viewing requires a grid with cols_n >= 2")

    if cfg.display == "headless":
        if not cfg.out_dir:
            raise ValueError("headless mode requires an output directory")
        sink = HeadlessSink(cfg.out_dir)
    elif cfg.display in ("windowed", "fullscreen"):
        sink = WindowSink(fullscreen=(cfg.display == "fullscreen"))
    else:
        raise ValueError(f"unknown display mode {cfg.display!r}")

    source = build_source(cfg.tracker)
    _kernels.warmup(grid.view_height, grid.view_width)

    metrics = FrameMetrics()
    pipeline = _Pipeline(grid, cfg, sink, metrics)
    stop = stop if stop is not None else threading.Event()

    started = time.perf_counter()
    try:
        if source.lockstep:
            _run_lockstep(source, pipeline, cfg.frame_cap, stop)
        else:
            _run_threaded(source, pipeline, cfg.frame_cap, stop)
    finally:
        sink.close()
    wall_s = time.perf_counter() - started

    extra = {
        "source": source.report.as_dict(),
        "wall_time_s": wall_s,
        "sample_fps": source.report.accepted / wall_s if wall_s > 0 else 0.0,
        "backend": _kernels.BACKEND,
    }
    if metrics.frames > 0:
        report = report_metrics(metrics, extra=extra)
    else:
        report = {
            "fps": 0.0,
            "frames": 0,
            "stages": metrics.stage_stats(),
            "transitions": dict(metrics.transitions),
            **extra,
        }
    metrics_path = cfg.metrics_path
    if metrics_path is None and cfg.display == "headless":
        metrics_path = str(Path(cfg.out_dir) / "metrics.json")
    if metrics_path:
        write_metrics(report, metrics_path)
        report["metrics_path"] = metrics_path
    return report
