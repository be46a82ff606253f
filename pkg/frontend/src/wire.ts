/**
 * Canonical wire format shared with the viewer: one UTF-8 JSON object per
 * line/datagram, exactly these keys in this order, no whitespace, LF-ended.
 * JSON.stringify prints integral numbers without a decimal point, which is
 * what the canonical form requires.
 */

export interface WireMessage {
  t_us: number;
  lx: number;
  ly: number;
  rx: number;
  ry: number;
  w: number;
  h: number;
  conf: number;
}

export function encodeWire(m: WireMessage): string {
  const payload = {
    t_us: Math.trunc(m.t_us),
    lx: m.lx,
    ly: m.ly,
    rx: m.rx,
    ry: m.ry,
    w: Math.trunc(m.w),
    h: Math.trunc(m.h),
    conf: m.conf,
  };
  return JSON.stringify(payload) + "\n";
}

export function clampToFrame(v: number, limit: number): number {
  return Math.min(Math.max(v, 0), limit - 1);
}

/** Strictly increasing microsecond timestamps from the monotonic clock. */
export class MonotonicMicros {
  private last = 0;

  now(): number {
    let t = Math.round(performance.now() * 1000);
    if (t <= this.last) {
      t = this.last + 1;
    }
    this.last = t;
    return t;
  }
}

export function sleepMs(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, Math.max(ms, 0)));
}
