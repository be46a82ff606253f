"""Command-line entry point for the viewer.

Every flag's default can be overridden by an environment variable with the
``PFORGE_`` prefix (``PFORGE_ALPHA=120`` etc.); explicit flags win over the
environment. The exit report is printed as JSON on stdout.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import threading

from .viewer import ViewerConfig, run

ENV_PREFIX = "PFORGE_"


def _env_default(name: str, fallback):
    return os.environ.get(ENV_PREFIX + name, fallback)


def _parse_bool(text) -> bool:
    if isinstance(text, bool):
        return text
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {text!r}")


def _parse_center(text):
    if text in (None, "", "auto"):
        return None
    try:
        x, y = text.split(",")
        return (float(x), float(y))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected X,Y, got {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="lfview",
        description="Head-coupled light-field viewer with red-cyan anaglyph output.",
    )
    p.add_argument("--lightfield", required=_env_default("LIGHTFIELD", None) is None,
                   default=_env_default("LIGHTFIELD", None),
                   help="atlas image file or directory of per-view images")
    p.add_argument("--layout", default=_env_default("LAYOUT", "auto"),
                   help="'atlas', 'pattern:TEMPLATE' with {row}/{col} or {index}, "
                        "or 'auto' (default)")
    p.add_argument("--rows", type=int, default=int(_env_default("ROWS", 9)),
                   help="vertical angular resolution m (default 9)")
    p.add_argument("--cols", type=int, default=int(_env_default("COLS", 9)),
                   help="horizontal angular resolution n (default 9)")
    p.add_argument("--alpha", type=float, default=float(_env_default("ALPHA", 40.0)),
                   help="grid spacing in camera-frame pixels (default 40)")
    p.add_argument("--smooth-k", type=int, default=int(_env_default("SMOOTH_K", 5)),
                   help="moving-average window in frames (default 5)")
    p.add_argument("--mirror-x", type=_parse_bool,
                   default=_parse_bool(_env_default("MIRROR_X", True)),
                   help="mirror horizontal mapping for webcam frames (default true)")
    p.add_argument("--invert-y", type=_parse_bool,
                   default=_parse_bool(_env_default("INVERT_Y", True)),
                   help="invert vertical mapping (default true)")
    p.add_argument("--center", type=_parse_center,
                   default=_parse_center(_env_default("CENTER", None)),
                   help="grid center X,Y in pixels (default: frame center)")
    p.add_argument("--tracker", default=_env_default("TRACKER", "udp:9870"),
                   help="udp:PORT | stdin | replay:PATH[,realtime] | "
                        "synth:KIND,AMP,PERIOD,SEP,RATE,DURATION (default udp:9870)")
    p.add_argument("--headless", metavar="OUT_DIR",
                   default=_env_default("HEADLESS", None),
                   help="write frames as PPM files to OUT_DIR instead of a window")
    p.add_argument("--frames", type=int,
                   default=(lambda v: int(v) if v is not None else None)(
                       _env_default("FRAMES", None)),
                   help="stop after N frames")
    p.add_argument("--metrics", default=_env_default("METRICS", None),
                   help="metrics JSON path (default: OUT_DIR/metrics.json when headless)")
    p.add_argument("--fullscreen", action="store_true",
                   default=_parse_bool(_env_default("FULLSCREEN", False)),
                   help="fullscreen window")
    return p


def config_from_args(args: argparse.Namespace) -> ViewerConfig:
    if args.headless and args.fullscreen:
        raise ValueError("choose exactly one display mode: --headless or --fullscreen")
    display = "headless" if args.headless else ("fullscreen" if args.fullscreen else "windowed")
    return ViewerConfig(
        lightfield=args.lightfield,
        layout=args.layout,
        rows_m=args.rows,
        cols_n=args.cols,
        alpha=args.alpha,
        mirror_x=args.mirror_x,
        invert_y=args.invert_y,
        center=args.center,
        smooth_k=args.smooth_k,
        tracker=args.tracker,
        display=display,
        out_dir=args.headless,
        frame_cap=args.frames,
        metrics_path=args.metrics,
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    stop = threading.Event()
    try:
        cfg = config_from_args(args)
        report = run(cfg, stop=stop)
    except KeyboardInterrupt:
        stop.set()
        print("interrupted", file=sys.stderr)
        return 130
    except Exception as exc:
        print(f"lfview: {exc}", file=sys.stderr)
        return 2
    print(json.dumps(report, indent=2))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
