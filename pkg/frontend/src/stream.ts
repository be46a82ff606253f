/**
 * The capture -> detect -> emit loop: for each frame with a detected face,
 * compute the per-eye centers and send one wire message with a strictly
 * increasing timestamp. Frames without a face emit nothing; the viewer
 * holds its last pose. Single-threaded by design.
 */

import { eyeCenters, NoFaceError, type PeriocularIndices } from "./landmarks.js";
import type { LandmarkSource } from "./sources.js";
import type { Emitter } from "./udp.js";
import { clampToFrame, encodeWire, MonotonicMicros, sleepMs } from "./wire.js";

export interface StreamOptions {
  frameW: number;
  frameH: number;
  fpsCap: number;
  indices?: PeriocularIndices;
  maxFrames?: number;
  onFrame?: (line: string | null) => void;
  /** checked once per frame; return true to end the session early */
  shouldStop?: () => boolean;
}

export interface SessionReport {
  frames: number;
  detections: number;
  sent: number;
}

export async function streamToViewer(
  source: LandmarkSource,
  emitter: Emitter,
  opts: StreamOptions,
): Promise<SessionReport> {
  const report: SessionReport = { frames: 0, detections: 0, sent: 0 };
  const clock = new MonotonicMicros();
  const tickMs = opts.fpsCap > 0 ? 1000 / opts.fpsCap : 0;
  let nextDue = performance.now();

  for await (const frame of source.frames()) {
    report.frames++;
    let line: string | null = null;
    try {
      const centers = eyeCenters(frame.landmarks, opts.frameW, opts.frameH, opts.indices);
      report.detections++;
      line = encodeWire({
        t_us: clock.now(),
        lx: clampToFrame(centers.left.x, opts.frameW),
        ly: clampToFrame(centers.left.y, opts.frameH),
        rx: clampToFrame(centers.right.x, opts.frameW),
        ry: clampToFrame(centers.right.y, opts.frameH),
        w: opts.frameW,
        h: opts.frameH,
        conf: frame.conf,
      });
      emitter.send(line);
      report.sent++;
    } catch (err) {
      if (!(err instanceof NoFaceError)) {
        throw err;
      }
      // no face: suppress the message, the stream keeps running
    }
    opts.onFrame?.(line);
    if (opts.maxFrames !== undefined && report.frames >= opts.maxFrames) {
      break;
    }
    if (opts.shouldStop?.()) {
      break;
    }
    if (tickMs > 0) {
      nextDue += tickMs;
      await sleepMs(nextDue - performance.now());
    }
  }
  return report;
}
