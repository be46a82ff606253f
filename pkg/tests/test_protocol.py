import io
import socket
import threading
import time

import pytest

from lfview.errors import MalformedMessage, StaleMessage
from lfview.gaze import EyeSample
from lfview.protocol import (
    Mailbox,
    ReplaySource,
    SessionReport,
    StdinSource,
    SynthSource,
    TrajectorySpec,
    UdpSource,
    WireDecoder,
    decode_message,
    encode,
    source_run,
    synth_next,
)


def sample(t_us=1000, lx=300.0, ly=240.0, rx=340.0, ry=240.0, w=640, h=480, conf=1.0):
    return EyeSample(t_us=t_us, lx=lx, ly=ly, rx=rx, ry=ry,
                     frame_w=w, frame_h=h, conf=conf)


# --------------------------------------------------------------- encode/decode

def test_encode_canonical_line():
    line = encode(sample())
    assert line == (b'{"t_us":1000,"lx":300,"ly":240,"rx":340,"ry":240,'
                    b'"w":640,"h":480,"conf":1}\n')


def test_encode_decode_roundtrip():
    s = sample()
    assert decode_message(encode(s)) == s


def test_fractional_pixels_roundtrip_exactly():
    s = sample(lx=300.25, ly=17.125, rx=301.1, ry=239.999)
    out = decode_message(encode(s))
    assert (out.lx, out.ly, out.rx, out.ry) == (300.25, 17.125, 301.1, 239.999)


def test_roundtrip_randomized(rng):
    for _ in range(500):
        s = sample(
            t_us=int(rng.integers(0, 10**12)),
            lx=float(rng.uniform(0, 639)), ly=float(rng.uniform(0, 479)),
            rx=float(rng.uniform(0, 639)), ry=float(rng.uniform(0, 479)),
            conf=float(rng.uniform(0, 1)),
        )
        assert decode_message(encode(s)) == s


@pytest.mark.parametrize("raw", [
    b'{"t_us":5}',
    b"not json",
    b"[1,2,3]",
    b'{"t_us":1,"lx":1,"ly":1,"rx":1,"ry":1,"w":640,"h":480,"conf":"high"}',
    b'{"t_us":1,"lx":true,"ly":1,"rx":1,"ry":1,"w":640,"h":480,"conf":1}',
    b'{"t_us":1,"lx":1,"ly":1,"rx":1,"ry":1,"w":0,"h":480,"conf":1}',
    b'{"t_us":1,"lx":1,"ly":1,"rx":1,"ry":1,"w":-640,"h":480,"conf":1}',
    b'{"t_us":1,"lx":NaN,"ly":1,"rx":1,"ry":1,"w":640,"h":480,"conf":1}',
    b"\xff\xfe",
])
def test_malformed_messages(raw):
    with pytest.raises(MalformedMessage):
        decode_message(raw)


def test_decode_clamps_coordinates_and_conf():
    raw = b'{"t_us":1,"lx":-50,"ly":900,"rx":2000,"ry":-1,"w":640,"h":480,"conf":3}'
    s = decode_message(raw)
    assert (s.lx, s.ly, s.rx, s.ry) == (0.0, 479.0, 639.0, 0.0)
    assert s.conf == 1.0


def test_stale_messages_dropped():
    dec = WireDecoder()
    dec.decode(encode(sample(t_us=2000)))
    with pytest.raises(StaleMessage):
        dec.decode(encode(sample(t_us=1500)))
    with pytest.raises(StaleMessage):
        dec.decode(encode(sample(t_us=2000)))
    assert dec.decode(encode(sample(t_us=2001))).t_us == 2001


# ----------------------------------------------------------------------- synth

def test_synth_sweep_x_at_zero():
    spec = TrajectorySpec(kind="sweep-x", amplitude=100, period=4,
                          eye_separation=60)
    s = synth_next(spec, 0.0)
    assert (s.lx, s.rx) == (350.0, 290.0)
    assert s.ly == s.ry == 240.0
    assert s.conf == 1.0


def test_synth_sweep_x_quarter_period():
    spec = TrajectorySpec(kind="sweep-x", amplitude=100, period=4, eye_separation=0)
    s = synth_next(spec, 1.0)
    assert s.lx == pytest.approx(420.0)


def test_synth_hold_is_constant():
    spec = TrajectorySpec(kind="hold", eye_separation=60)
    samples = [synth_next(spec, t) for t in (0.0, 0.4, 1.7, 99.0)]
    assert all((s.lx, s.ly, s.rx, s.ry) == (samples[0].lx, samples[0].ly,
                                            samples[0].rx, samples[0].ry)
               for s in samples)


def test_synth_clamps_to_frame():
    spec = TrajectorySpec(kind="sweep-x", amplitude=5000, period=4, eye_separation=0)
    s = synth_next(spec, 1.0)
    assert 0 <= s.lx <= 639


def test_synth_source_sample_count():
    spec = TrajectorySpec(kind="sweep-x", rate=30, duration=2)
    src = SynthSource(spec)
    events = [e for e in src.events()]
    assert len(events) == 60
    assert src.report.accepted == 60
    # strictly increasing timestamps
    ts = [s.t_us for _, s in events]
    assert all(b > a for a, b in zip(ts, ts[1:]))


def test_trajectory_validation():
    with pytest.raises(ValueError):
        TrajectorySpec(kind="wiggle")
    with pytest.raises(ValueError):
        TrajectorySpec(kind="sweep-x", rate=-1)
    with pytest.raises(ValueError):
        TrajectorySpec(kind="sweep-x", period=0)


# --------------------------------------------------------------------- mailbox

def test_mailbox_holds_latest():
    box = Mailbox()
    assert box.latest() == (0, None)
    for t in range(1, 51):
        box.put(sample(t_us=t))
    seq, s = box.latest()
    assert seq == 50 and s.t_us == 50


def test_mailbox_wait_next_times_out():
    box = Mailbox()
    assert box.wait_next(0, timeout=0.05) is None


def test_mailbox_wait_next_wakes_on_put():
    box = Mailbox()
    result = {}

    def reader():
        result["got"] = box.wait_next(0, timeout=2.0)

    t = threading.Thread(target=reader)
    t.start()
    time.sleep(0.05)
    box.put(sample(t_us=7))
    t.join()
    assert result["got"][1].t_us == 7


def test_mailbox_readers_never_see_torn_samples():
    # every written sample satisfies lx == t_us % 640 and ly == (t_us * 3) % 480;
    # a torn read would break the relation
    box = Mailbox()
    stop = threading.Event()
    errors = []

    def writer():
        t = 0
        while not stop.is_set():
            t += 1
            box.put(sample(t_us=t, lx=float(t % 640), ly=float((t * 3) % 480)))

    def reader():
        while not stop.is_set():
            _, s = box.latest()
            if s is None:
                continue
            if s.lx != s.t_us % 640 or s.ly != (s.t_us * 3) % 480:
                errors.append(s)
                return

    threads = [threading.Thread(target=writer)] + [
        threading.Thread(target=reader) for _ in range(3)
    ]
    for t in threads:
        t.start()
    time.sleep(0.3)
    stop.set()
    for t in threads:
        t.join()
    assert errors == []


# ------------------------------------------------------------------ source_run

def write_replay(path, samples):
    with open(path, "wb") as f:
        for s in samples:
            f.write(encode(s))


def test_source_run_replay_counts(tmp_path):
    path = tmp_path / "session.jsonl"
    write_replay(path, [sample(t_us=1000 + i) for i in range(300)])
    box = Mailbox()
    report = source_run(ReplaySource(path), box)
    assert report.accepted == 300
    assert report.malformed == 0
    assert box.latest()[1].t_us == 1299


def test_source_run_tolerates_garbage_lines(tmp_path):
    path = tmp_path / "dirty.jsonl"
    lines = [encode(sample(t_us=1000 + i)) for i in range(10)]
    lines.insert(5, b"this is not a message\n")
    path.write_bytes(b"".join(lines))
    report = source_run(ReplaySource(path), Mailbox())
    assert (report.accepted, report.malformed) == (10, 1)


def test_replay_drops_stale_lines(tmp_path):
    path = tmp_path / "stale.jsonl"
    write_replay(path, [sample(t_us=t) for t in (2000, 1500, 2001)])
    report = source_run(ReplaySource(path), Mailbox())
    assert (report.accepted, report.stale) == (2, 1)


def test_replay_missing_file():
    with pytest.raises(FileNotFoundError):
        ReplaySource("/nonexistent/path.jsonl")


def test_replay_determinism_at_the_slot(tmp_path):
    path = tmp_path / "det.jsonl"
    write_replay(path, [sample(t_us=1000 + i, lx=float(i % 640)) for i in range(100)])

    class RecordingMailbox(Mailbox):
        def __init__(self):
            super().__init__()
            self.seen = []

        def put(self, s):
            self.seen.append(s)
            return super().put(s)

    runs = []
    for _ in range(2):
        box = RecordingMailbox()
        source_run(ReplaySource(path), box)
        runs.append(box.seen)
    assert runs[0] == runs[1]


def test_synth_source_through_mailbox():
    spec = TrajectorySpec(kind="hold", rate=0)  # free-running
    src = SynthSource(spec)
    box = Mailbox()
    stop = threading.Event()
    t = threading.Thread(target=source_run, args=(src, box, stop))
    t.start()
    deadline = time.monotonic() + 2.0
    while box.latest()[0] < 100 and time.monotonic() < deadline:
        time.sleep(0.01)
    stop.set()
    t.join(timeout=2.0)
    assert box.latest()[0] >= 100


def test_stdin_source_reads_stream():
    lines = b"".join(encode(sample(t_us=1000 + i)) for i in range(5))
    src = StdinSource(stream=io.BytesIO(lines + b"\n\ngarbage\n"))
    report = source_run(src, Mailbox())
    assert (report.accepted, report.malformed) == (5, 1)


# ------------------------------------------------------------------------- UDP

def test_udp_source_receives_datagrams():
    src = UdpSource(port=0)
    box = Mailbox()
    stop = threading.Event()
    t = threading.Thread(target=source_run, args=(src, box, stop))
    t.start()

    out = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
    try:
        for i in range(20):
            out.sendto(encode(sample(t_us=1000 + i)), ("127.0.0.1", src.port))
            time.sleep(0.002)
        out.sendto(b"junk datagram", ("127.0.0.1", src.port))
        deadline = time.monotonic() + 2.0
        while src.report.malformed < 1 and time.monotonic() < deadline:
            time.sleep(0.01)
    finally:
        out.close()
        stop.set()
        t.join(timeout=2.0)

    assert src.report.accepted == 20
    assert src.report.malformed == 1
    assert box.latest()[1].t_us == 1019


def test_udp_bind_failure():
    holder = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
    holder.bind(("127.0.0.1", 0))
    port = holder.getsockname()[1]
    try:
        with pytest.raises(OSError, match="cannot bind"):
            UdpSource(port=port)
    finally:
        holder.close()


def test_session_report_dict():
    assert SessionReport(3, 2, 1).as_dict() == {
        "accepted": 3, "malformed": 2, "stale": 1}
