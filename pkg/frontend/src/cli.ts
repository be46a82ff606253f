#!/usr/bin/env node
/**
 * lfview-tracker: stream per-eye centers to the viewer's UDP port.
 *
 *   lfview-tracker --endpoint udp:127.0.0.1:9870 --fps-cap 30
 *   lfview-tracker --source synthetic --duration 2
 *   lfview-tracker --source replay:session.json --endpoint udp:9870
 */

import { parseArgs } from "node:util";

import { CameraUnavailableError, MediaPipeLandmarkSource } from "./mediapipe.js";
import {
  ReplayLandmarkSource,
  SyntheticLandmarkSource,
  type LandmarkSource,
} from "./sources.js";
import { streamToViewer } from "./stream.js";
import { parseEndpoint, UdpEmitter } from "./udp.js";

function parseBool(v: string): boolean {
  return ["1", "true", "yes", "on"].includes(v.toLowerCase());
}

async function buildSource(
  spec: string,
  cameraId: number,
  frameW: number,
  frameH: number,
  frames: number,
): Promise<LandmarkSource> {
  if (spec === "camera") {
    return MediaPipeLandmarkSource.create({ cameraId, frameW, frameH });
  }
  if (spec === "synthetic") {
    return new SyntheticLandmarkSource({
      kind: "sweep-x",
      amplitudePx: 200,
      periodFrames: 120,
      eyeSeparationPx: 60,
      frameW,
      frameH,
      frames,
    });
  }
  if (spec.startsWith("replay:")) {
    return new ReplayLandmarkSource(spec.slice("replay:".length));
  }
  throw new Error(`unknown source ${spec}; use camera, synthetic, or replay:PATH`);
}

export async function main(argv: string[]): Promise<number> {
  const { values } = parseArgs({
    args: argv,
    options: {
      camera: { type: "string", default: "0" },
      endpoint: { type: "string", default: "udp:127.0.0.1:9870" },
      "fps-cap": { type: "string", default: "30" },
      "show-preview": { type: "string", default: "false" },
      source: { type: "string", default: "camera" },
      duration: { type: "string" },
      width: { type: "string", default: "640" },
      height: { type: "string", default: "480" },
      help: { type: "boolean", default: false },
    },
  });

  if (values.help) {
    console.log(
      "usage: lfview-tracker [--source camera|synthetic|replay:PATH] " +
        "[--camera N] [--endpoint udp:HOST:PORT] [--fps-cap N] " +
        "[--duration S] [--width W] [--height H] [--show-preview BOOL]",
    );
    return 0;
  }

  const frameW = Number(values.width);
  const frameH = Number(values.height);
  const fpsCap = Number(values["fps-cap"]);
  const durationS = values.duration !== undefined ? Number(values.duration) : undefined;
  const maxFrames =
    durationS !== undefined && fpsCap > 0
      ? Math.round(durationS * fpsCap)
      : undefined;

  if (parseBool(values["show-preview"]!) && values.source !== "camera") {
    console.error("note: --show-preview only applies to the live camera source");
  }

  const { host, port } = parseEndpoint(values.endpoint!);
  const emitter = new UdpEmitter(host, port);
  let source: LandmarkSource;
  try {
    source = await buildSource(
      values.source!,
      Number(values.camera),
      frameW,
      frameH,
      maxFrames ?? 600,
    );
  } catch (err) {
    emitter.close();
    if (err instanceof CameraUnavailableError) {
      console.error(`lfview-tracker: ${err.message}`);
      return 2;
    }
    throw err;
  }

  try {
    const report = await streamToViewer(source, emitter, {
      frameW,
      frameH,
      fpsCap,
      maxFrames,
    });
    console.log(JSON.stringify(report));
    return 0;
  } finally {
    source.close?.();
    emitter.close();
  }
}

const isDirectRun =
  process.argv[1] !== undefined &&
  import.meta.url === new URL(`file://${process.argv[1]}`).href;
if (isDirectRun) {
  main(process.argv.slice(2)).then(
    (code) => process.exit(code),
    (err) => {
      console.error(`lfview-tracker: ${err.message}`);
      process.exit(2);
    },
  );
}
