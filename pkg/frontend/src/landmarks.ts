/**
 * Periocular landmark subsets of the 468-point face mesh (478 with refined
 * iris points) and the eye-center computation: each eye center is the plain
 * arithmetic mean of its subset's pixel coordinates.
 *
 * "left" throughout means the subject's left eye, which appears at the
 * larger x in an unmirrored camera frame; the viewer's default mirror_x
 * mapping expects exactly these raw-frame coordinates.
 */

export interface Landmark {
  x: number; // normalized [0, 1] across the frame width
  y: number; // normalized [0, 1] across the frame height
}

export interface Point {
  x: number;
  y: number;
}

// Eye contour rings from the face-mesh topology.
export const RIGHT_EYE_CONTOUR: readonly number[] = [
  33, 7, 163, 144, 145, 153, 154, 155, 133, 173, 157, 158, 159, 160, 161, 246,
];
export const LEFT_EYE_CONTOUR: readonly number[] = [
  362, 382, 381, 380, 374, 373, 390, 249, 263, 466, 388, 387, 386, 385, 384, 398,
];

// Refined iris points (present when the model outputs 478 landmarks).
export const RIGHT_IRIS: readonly number[] = [468, 469, 470, 471, 472];
export const LEFT_IRIS: readonly number[] = [473, 474, 475, 476, 477];

export const REFINED_LANDMARK_COUNT = 478;

export interface PeriocularIndices {
  left: readonly number[];
  right: readonly number[];
}

export class NoFaceError extends Error {
  constructor(message = "no face detected this frame") {
    super(message);
    this.name = "NoFaceError";
  }
}

export function validateIndices(indices: PeriocularIndices): PeriocularIndices {
  if (indices.left.length === 0 || indices.right.length === 0) {
    throw new Error("periocular index lists must be nonempty");
  }
  const left = new Set(indices.left);
  if (indices.right.some((i) => left.has(i))) {
    throw new Error("periocular index lists must be disjoint");
  }
  return indices;
}

/**
 * Default subset for a given landmark count: iris points when the refined
 * model is in use, eye contours otherwise.
 */
export function periocularIndices(landmarkCount: number): PeriocularIndices {
  if (landmarkCount >= REFINED_LANDMARK_COUNT) {
    return validateIndices({ left: LEFT_IRIS, right: RIGHT_IRIS });
  }
  return validateIndices({ left: LEFT_EYE_CONTOUR, right: RIGHT_EYE_CONTOUR });
}

function meanOf(
  landmarks: readonly Landmark[],
  indices: readonly number[],
  frameW: number,
  frameH: number,
): Point {
  let sx = 0;
  let sy = 0;
  for (const i of indices) {
    const lm = landmarks[i];
    if (!lm) {
      throw new NoFaceError(`landmark ${i} missing from frame`);
    }
    sx += lm.x * frameW;
    sy += lm.y * frameH;
  }
  return { x: sx / indices.length, y: sy / indices.length };
}

/**
 * Geometric centers of both eyes in pixel coordinates.
 *
 * Throws NoFaceError when the frame has no usable landmark array; callers
 * emit nothing for such frames and the viewer holds its last pose.
 */
export function eyeCenters(
  landmarks: readonly Landmark[] | null | undefined,
  frameW: number,
  frameH: number,
  indices?: PeriocularIndices,
): { left: Point; right: Point } {
  if (!landmarks || landmarks.length === 0) {
    throw new NoFaceError();
  }
  const idx = indices
    ? validateIndices(indices)
    : periocularIndices(landmarks.length);
  return {
    left: meanOf(landmarks, idx.left, frameW, frameH),
    right: meanOf(landmarks, idx.right, frameW, frameH),
  };
}
