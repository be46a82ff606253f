/**
 * Live camera landmark source backed by the MediaPipe face-landmarker task
 * (478 landmarks with refined iris points). This path needs a browser-like
 * host: getUserMedia for the camera and WASM for inference. On a plain Node
 * host it fails fast with CameraUnavailableError; use the synthetic or
 * replay sources there.
 */

import type { Landmark } from "./landmarks.js";
import type { LandmarkFrame, LandmarkSource } from "./sources.js";

export class CameraUnavailableError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "CameraUnavailableError";
  }
}

export interface LiveOptions {
  cameraId: number;
  frameW: number;
  frameH: number;
  /** draw the calibration grid overlay onto this canvas, when provided */
  previewCanvas?: HTMLCanvasElement;
}

const WASM_BASE =
  "https://cdn.jsdelivr.net/npm/@mediapipe/tasks-vision@latest/wasm";
const MODEL_URL =
  "https://storage.googleapis.com/mediapipe-models/face_landmarker/face_landmarker/float16/1/face_landmarker.task";

export class MediaPipeLandmarkSource implements LandmarkSource {
  private constructor(
    private video: HTMLVideoElement,
    private landmarker: {
      detectForVideo(v: HTMLVideoElement, t: number): {
        faceLandmarks: Landmark[][];
      };
      close(): void;
    },
    private stream: MediaStream,
  ) {}

  static async create(opts: LiveOptions): Promise<MediaPipeLandmarkSource> {
    const nav = (globalThis as { navigator?: Navigator }).navigator;
    if (!nav?.mediaDevices?.getUserMedia || typeof document === "undefined") {
      throw new CameraUnavailableError(
        "live capture needs a browser host with camera access; " +
          "use --source synthetic or --source replay:PATH on this host",
      );
    }

    let vision: typeof import("@mediapipe/tasks-vision");
    try {
      vision = await import("@mediapipe/tasks-vision");
    } catch (err) {
      throw new CameraUnavailableError(
        `@mediapipe/tasks-vision is not installed: ${(err as Error).message}`,
      );
    }

    const devices = (await nav.mediaDevices.enumerateDevices()).filter(
      (d) => d.kind === "videoinput",
    );
    const device = devices[opts.cameraId];
    const stream = await nav.mediaDevices.getUserMedia({
      video: {
        deviceId: device ? { exact: device.deviceId } : undefined,
        width: opts.frameW,
        height: opts.frameH,
      },
    });

    const video = document.createElement("video");
    video.srcObject = stream;
    await video.play();

    const fileset = await vision.FilesetResolver.forVisionTasks(WASM_BASE);
    const landmarker = await vision.FaceLandmarker.createFromOptions(fileset, {
      baseOptions: { modelAssetPath: MODEL_URL },
      runningMode: "VIDEO",
      numFaces: 1,
    });
    return new MediaPipeLandmarkSource(video, landmarker, stream);
  }

  async *frames(): AsyncGenerator<LandmarkFrame> {
    // one detection per rendered video frame
    while (this.video.srcObject) {
      await new Promise<number>((resolve) =>
        this.video.requestVideoFrameCallback((now) => resolve(now)),
      );
      const result = this.landmarker.detectForVideo(this.video, performance.now());
      const face = result.faceLandmarks[0];
      if (face && face.length > 0) {
        yield { landmarks: face, conf: 1 };
      } else {
        yield { landmarks: null, conf: 0 };
      }
    }
  }

  close(): void {
    this.landmarker.close();
    for (const track of this.stream.getTracks()) {
      track.stop();
    }
    this.video.srcObject = null;
  }
}
