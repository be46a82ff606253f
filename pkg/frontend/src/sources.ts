/**
 * Landmark frame sources. The live camera source lives in mediapipe.ts;
 * these two are deterministic stand-ins for tests, recorded sessions, and
 * hosts without a camera.
 */

import { readFileSync } from "node:fs";

import type { Landmark } from "./landmarks.js";

/** One camera frame's detection result; null landmarks = no face. */
export interface LandmarkFrame {
  landmarks: Landmark[] | null;
  conf: number;
}

export interface LandmarkSource {
  frames(): AsyncGenerator<LandmarkFrame>;
  close?(): void;
}

export interface SyntheticOptions {
  kind: "sweep-x" | "hold";
  amplitudePx: number;
  periodFrames: number;
  eyeSeparationPx: number;
  frameW: number;
  frameH: number;
  frames: number;
  /** indices of frames reported as face-absent, for dropout testing */
  dropFrames?: Set<number>;
}

/**
 * Generates a minimal 478-landmark array where only the periocular points
 * are meaningful: each iris is a 5-point cross and each eye contour a ring,
 * all centered on the moving eye position. Every other landmark sits at the
 * face midpoint. The subject's left eye tracks the larger x, as it does in
 * an unmirrored camera frame.
 */
export class SyntheticLandmarkSource implements LandmarkSource {
  constructor(private opts: SyntheticOptions) {}

  eyeCentersAt(i: number): { left: { x: number; y: number }; right: { x: number; y: number } } {
    const { kind, amplitudePx, periodFrames, eyeSeparationPx, frameW, frameH } = this.opts;
    const cx = frameW / 2;
    const cy = frameH / 2;
    const mid =
      kind === "hold"
        ? cx
        : cx + amplitudePx * Math.sin((2 * Math.PI * i) / periodFrames);
    return {
      left: { x: mid + eyeSeparationPx / 2, y: cy },
      right: { x: mid - eyeSeparationPx / 2, y: cy },
    };
  }

  landmarksAt(i: number): Landmark[] {
    const { frameW, frameH } = this.opts;
    const { left, right } = this.eyeCentersAt(i);
    const norm = (p: { x: number; y: number }): Landmark => ({
      x: p.x / frameW,
      y: p.y / frameH,
    });
    const landmarks: Landmark[] = new Array(478).fill(null).map(() =>
      norm({ x: frameW / 2, y: frameH / 2 }),
    );
    // symmetric 5-point crosses: their mean is exactly the eye center
    const cross = (c: { x: number; y: number }) => [
      c,
      { x: c.x - 2, y: c.y },
      { x: c.x + 2, y: c.y },
      { x: c.x, y: c.y - 2 },
      { x: c.x, y: c.y + 2 },
    ];
    const rightIris = [468, 469, 470, 471, 472];
    const leftIris = [473, 474, 475, 476, 477];
    cross(right).forEach((p, k) => (landmarks[rightIris[k]] = norm(p)));
    cross(left).forEach((p, k) => (landmarks[leftIris[k]] = norm(p)));
    return landmarks;
  }

  async *frames(): AsyncGenerator<LandmarkFrame> {
    for (let i = 0; i < this.opts.frames; i++) {
      if (this.opts.dropFrames?.has(i)) {
        yield { landmarks: null, conf: 0 };
      } else {
        yield { landmarks: this.landmarksAt(i), conf: 1 };
      }
    }
  }
}

/**
 * Replays a recorded landmark session: a JSON array of
 * { landmarks: [{x, y}, ...] | null, conf } entries, one per frame.
 */
export class ReplayLandmarkSource implements LandmarkSource {
  private entries: LandmarkFrame[];

  constructor(path: string) {
    const parsed = JSON.parse(readFileSync(path, "utf8"));
    if (!Array.isArray(parsed)) {
      throw new Error(`landmark replay file ${path} must hold a JSON array`);
    }
    this.entries = parsed.map((e) => ({
      landmarks: e?.landmarks ?? null,
      conf: typeof e?.conf === "number" ? e.conf : e?.landmarks ? 1 : 0,
    }));
  }

  async *frames(): AsyncGenerator<LandmarkFrame> {
    for (const entry of this.entries) {
      yield entry;
    }
  }
}
