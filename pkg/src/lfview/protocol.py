"""Wire format for eye samples and the interchangeable sample sources.

One message is one UTF-8 JSON object on a single LF-terminated line with
exactly the keys ``t_us, lx, ly, rx, ry, w, h, conf`` in that order and no
whitespace (canonical form). The same line travels as one UDP datagram, one
stdin line, or one replay-file line.

Delivery is mailbox-style: a single writer overwrites a latest-value slot and
readers always see the newest complete sample, never a torn one. The render
loop must never drain a backlog of stale poses.
"""

from __future__ import annotations

import json
import math
import socket
import sys
import threading
import time
from dataclasses import dataclass
from typing import Iterator, Optional

from .errors import MalformedMessage, StaleMessage
from .gaze import EyeSample, clamp_to_frame

__all__ = [
    "WIRE_KEYS",
    "encode",
    "decode_message",
    "WireDecoder",
    "TrajectorySpec",
    "synth_next",
    "Mailbox",
    "SessionReport",
    "SynthSource",
    "ReplaySource",
    "StdinSource",
    "UdpSource",
    "source_run",
    "sleep_until",
    "DEFAULT_UDP_PORT",
]

WIRE_KEYS = ("t_us", "lx", "ly", "rx", "ry", "w", "h", "conf")
DEFAULT_UDP_PORT = 9870


# --------------------------------------------------------------------------
# Encode / decode
# --------------------------------------------------------------------------

def _wire_num(value: float):
    # Canonical form renders integral values without a trailing ".0".
    f = float(value)
    return int(f) if f.is_integer() else f


def encode(sample: EyeSample) -> bytes:
    """Serialize a sample to its canonical single-line wire form."""
    payload = {
        "t_us": int(sample.t_us),
        "lx": _wire_num(sample.lx),
        "ly": _wire_num(sample.ly),
        "rx": _wire_num(sample.rx),
        "ry": _wire_num(sample.ry),
        "w": int(sample.frame_w),
        "h": int(sample.frame_h),
        "conf": _wire_num(sample.conf),
    }
    return (json.dumps(payload, separators=(",", ":")) + "\n").encode("utf-8")


def decode_message(data) -> EyeSample:
    """Parse one line/datagram into a sample, clamping coordinates into frame.

    Raises MalformedMessage for anything structurally invalid: bad JSON,
    missing keys, non-numeric values, or non-positive frame dimensions.
    Staleness is session state and lives in ``WireDecoder``.
    """
    if isinstance(data, (bytes, bytearray)):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedMessage(f"not UTF-8: {exc}") from exc
    try:
        obj = json.loads(data)
    except (json.JSONDecodeError, TypeError) as exc:
        raise MalformedMessage(f"bad JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise MalformedMessage("message is not a JSON object")

    values = {}
    for key in WIRE_KEYS:
        if key not in obj:
            raise MalformedMessage(f"missing key {key!r}")
        v = obj[key]
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            raise MalformedMessage(f"key {key!r} is not a finite number")
        values[key] = v

    w, h = values["w"], values["h"]
    if w != int(w) or h != int(h) or w <= 0 or h <= 0:
        raise MalformedMessage("frame dimensions must be positive integers")
    w, h = int(w), int(h)

    lx, ly = clamp_to_frame(values["lx"], values["ly"], w, h)
    rx, ry = clamp_to_frame(values["rx"], values["ry"], w, h)
    conf = min(max(float(values["conf"]), 0.0), 1.0)
    return EyeSample(
        t_us=int(values["t_us"]),
        lx=lx, ly=ly, rx=rx, ry=ry,
        frame_w=w, frame_h=h, conf=conf,
    )


class WireDecoder:
    """Stateful decoder enforcing strictly increasing timestamps per session."""

    def __init__(self):
        self.last_t_us: Optional[int] = None

    def decode(self, data) -> EyeSample:
        sample = decode_message(data)
        if self.last_t_us is not None and sample.t_us <= self.last_t_us:
            raise StaleMessage(
                f"t_us {sample.t_us} <= last accepted {self.last_t_us}"
            )
        self.last_t_us = sample.t_us
        return sample


# --------------------------------------------------------------------------
# Synthetic trajectories
# --------------------------------------------------------------------------

TRAJECTORY_KINDS = ("sweep-x", "sweep-y", "circle", "hold")


@dataclass(frozen=True)
class TrajectorySpec:
    """Deterministic closed-form head trajectory for tests and benchmarks.

    ``rate`` is the sample rate in Hz; 0 means free-running (no pacing, a
    virtual 30 Hz clock stamps t_us, and the consumer must cap frames).
    """

    kind: str
    amplitude: float = 100.0
    period: float = 4.0
    center: tuple = (320.0, 240.0)
    eye_separation: float = 60.0
    rate: float = 30.0
    duration: float = 2.0
    frame_w: int = 640
    frame_h: int = 480

    def __post_init__(self):
        if self.kind not in TRAJECTORY_KINDS:
            raise ValueError(f"kind must be one of {TRAJECTORY_KINDS}, got {self.kind!r}")
        if self.rate < 0 or self.amplitude < 0 or self.eye_separation < 0:
            raise ValueError("rate, amplitude and eye_separation must be >= 0")
        if self.kind != "hold" and self.period <= 0:
            raise ValueError("period must be > 0")


def synth_next(spec: TrajectorySpec, t: float) -> EyeSample:
    """Sample the trajectory at time ``t`` seconds.

    The eye midpoint follows the trajectory; the left eye sits at midpoint
    + separation/2 in x (the viewer's left eye appears at larger x in a
    mirrored camera frame) and the right at midpoint - separation/2.
    """
    cx, cy = spec.center
    if spec.kind == "hold":
        mx, my = cx, cy
    else:
        phase = 2.0 * math.pi * t / spec.period
        if spec.kind == "sweep-x":
            mx, my = cx + spec.amplitude * math.sin(phase), cy
        elif spec.kind == "sweep-y":
            mx, my = cx, cy + spec.amplitude * math.sin(phase)
        else:  # circle
            mx = cx + spec.amplitude * math.cos(phase)
            my = cy + spec.amplitude * math.sin(phase)

    half = spec.eye_separation / 2.0
    lx, ly = clamp_to_frame(mx + half, my, spec.frame_w, spec.frame_h)
    rx, ry = clamp_to_frame(mx - half, my, spec.frame_w, spec.frame_h)
    return EyeSample(
        t_us=round(t * 1e6),
        lx=lx, ly=ly, rx=rx, ry=ry,
        frame_w=spec.frame_w, frame_h=spec.frame_h, conf=1.0,
    )


# --------------------------------------------------------------------------
# Latest-value mailbox
# --------------------------------------------------------------------------

class Mailbox:
    """Single-slot channel: one writer overwrites, readers see the newest.

    Samples are immutable, so swapping the slot reference under the lock
    guarantees readers never observe a torn message. ``wait_next`` blocks
    until the sequence number moves past ``last_seq`` or the timeout expires.
    """

    def __init__(self):
        self._cond = threading.Condition()
        self._sample: Optional[EyeSample] = None
        self._seq = 0

    def put(self, sample: EyeSample) -> int:
        with self._cond:
            self._sample = sample
            self._seq += 1
            self._cond.notify_all()
            return self._seq

    def latest(self) -> tuple:
        """Return (seq, sample); seq is 0 and sample None before any put."""
        with self._cond:
            return (self._seq, self._sample)

    def wait_next(self, last_seq: int, timeout: Optional[float] = None) -> Optional[tuple]:
        """Block until a sample newer than ``last_seq`` arrives, else None."""
        with self._cond:
            if not self._cond.wait_for(lambda: self._seq > last_seq, timeout):
                return None
            return (self._seq, self._sample)


# --------------------------------------------------------------------------
# Sources
# --------------------------------------------------------------------------

@dataclass
class SessionReport:
    accepted: int = 0
    malformed: int = 0
    stale: int = 0

    def as_dict(self) -> dict:
        return {"accepted": self.accepted, "malformed": self.malformed, "stale": self.stale}


def sleep_until(deadline: float) -> None:
    """Sleep until ``time.perf_counter()`` reaches ``deadline``."""
    while True:
        remaining = deadline - time.perf_counter()
        if remaining <= 0:
            return
        time.sleep(remaining)


class SynthSource:
    """Generates samples from a trajectory spec; paced when rate > 0."""

    FREE_RUN_VIRTUAL_HZ = 30.0

    def __init__(self, spec: TrajectorySpec):
        self.spec = spec
        self.report = SessionReport()

    @property
    def lockstep(self) -> bool:
        return True

    def events(self, stop: Optional[threading.Event] = None) -> Iterator[tuple]:
        spec = self.spec
        if spec.rate > 0:
            count = round(spec.rate * spec.duration)
            start = time.perf_counter()
            for i in range(count):
                if stop is not None and stop.is_set():
                    return
                t = i / spec.rate
                self.report.accepted += 1
                yield (start + t, synth_next(spec, t))
        else:
            # Free-running: no deadline, virtual clock, caller caps frames.
            i = 0
            while stop is None or not stop.is_set():
                t = i / self.FREE_RUN_VIRTUAL_HZ
                i += 1
                self.report.accepted += 1
                yield (None, synth_next(spec, t))

    def close(self) -> None:
        pass


class ReplaySource:
    """Replays an LF-delimited wire-message file, optionally in real time.

    Malformed and stale lines are counted and skipped, never fatal. Realtime
    pacing follows the recorded t_us deltas from the first accepted message.
    """

    def __init__(self, path, realtime: bool = False):
        self.path = path
        self.realtime = realtime
        self.report = SessionReport()
        # Fail at construction so startup errors surface before the loop.
        with open(path, "rb"):
            pass

    @property
    def lockstep(self) -> bool:
        return True

    def events(self, stop: Optional[threading.Event] = None) -> Iterator[tuple]:
        decoder = WireDecoder()
        start = None
        first_t_us = None
        with open(self.path, "rb") as f:
            for line in f:
                if stop is not None and stop.is_set():
                    return
                if not line.strip():
                    continue
                try:
                    sample = decoder.decode(line)
                except MalformedMessage:
                    self.report.malformed += 1
                    continue
                except StaleMessage:
                    self.report.stale += 1
                    continue
                self.report.accepted += 1
                if self.realtime:
                    if start is None:
                        start = time.perf_counter()
                        first_t_us = sample.t_us
                    yield (start + (sample.t_us - first_t_us) / 1e6, sample)
                else:
                    yield (None, sample)

    def close(self) -> None:
        pass


class StdinSource:
    """Reads LF-delimited wire messages from a byte stream (default stdin)."""

    def __init__(self, stream=None):
        self.stream = stream if stream is not None else sys.stdin.buffer
        self.report = SessionReport()

    @property
    def lockstep(self) -> bool:
        return False

    def events(self, stop: Optional[threading.Event] = None) -> Iterator[tuple]:
        decoder = WireDecoder()
        for line in self.stream:
            if stop is not None and stop.is_set():
                return
            if not line.strip():
                continue
            try:
                sample = decoder.decode(line)
            except MalformedMessage:
                self.report.malformed += 1
                continue
            except StaleMessage:
                self.report.stale += 1
                continue
            self.report.accepted += 1
            yield (None, sample)

    def close(self) -> None:
        pass


class UdpSource:
    """Receives one wire message per UDP datagram on localhost.

    Binds at construction so an unavailable port fails fast at startup.
    ``events`` polls with a short timeout so a stop flag is honored even
    while idle.
    """

    POLL_S = 0.1

    def __init__(self, port: int = DEFAULT_UDP_PORT, host: str = "127.0.0.1"):
        self.report = SessionReport()
        self._sock = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
        try:
            self._sock.bind((host, port))
        except OSError as exc:
            self._sock.close()
            raise OSError(f"cannot bind UDP {host}:{port}: {exc}") from exc
        self._sock.settimeout(self.POLL_S)
        self.host = host
        self.port = self._sock.getsockname()[1]

    @property
    def lockstep(self) -> bool:
        return False

    def events(self, stop: Optional[threading.Event] = None) -> Iterator[tuple]:
        decoder = WireDecoder()
        while stop is None or not stop.is_set():
            try:
                datagram, _ = self._sock.recvfrom(65536)
            except socket.timeout:
                continue
            except OSError:
                return  # socket closed during shutdown
            try:
                sample = decoder.decode(datagram)
            except MalformedMessage:
                self.report.malformed += 1
                continue
            except StaleMessage:
                self.report.stale += 1
                continue
            self.report.accepted += 1
            yield (None, sample)

    def close(self) -> None:
        self._sock.close()


def source_run(source, mailbox: Mailbox, stop: Optional[threading.Event] = None) -> SessionReport:
    """Drive a source to completion, pushing every sample into the mailbox.

    Paced sources carry per-sample deadlines; delivery sleeps until each
    deadline so downstream consumers observe the source's real cadence.
    """
    try:
        for due, sample in source.events(stop):
            if due is not None:
                sleep_until(due)
            mailbox.put(sample)
            if stop is not None and stop.is_set():
                break
    finally:
        source.close()
    return source.report
