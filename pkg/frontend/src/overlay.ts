/**
 * Calibration preview: the virtual view grid overlaid on the camera frame,
 * using the same geometry as the viewer's mapping (point (r, c) at
 * center + sign * (index - (count-1)/2) * alpha per axis).
 */

export interface GridOverlayConfig {
  rows: number;
  cols: number;
  alpha: number;
  frameW: number;
  frameH: number;
  center?: { x: number; y: number };
  mirrorX?: boolean;
  invertY?: boolean;
}

export interface GridPoint {
  row: number;
  col: number;
  x: number;
  y: number;
}

export function gridPoints(cfg: GridOverlayConfig): GridPoint[] {
  const cx = cfg.center?.x ?? cfg.frameW / 2;
  const cy = cfg.center?.y ?? cfg.frameH / 2;
  const sx = (cfg.mirrorX ?? true) ? -1 : 1;
  const sy = (cfg.invertY ?? true) ? -1 : 1;
  const points: GridPoint[] = [];
  for (let r = 0; r < cfg.rows; r++) {
    for (let c = 0; c < cfg.cols; c++) {
      points.push({
        row: r,
        col: c,
        x: cx + sx * (c - (cfg.cols - 1) / 2) * cfg.alpha,
        y: cy + sy * (r - (cfg.rows - 1) / 2) * cfg.alpha,
      });
    }
  }
  return points;
}

/** Minimal 2D context surface so the renderer is testable off-browser. */
export interface OverlayContext {
  strokeStyle: string | CanvasGradient | CanvasPattern;
  fillStyle: string | CanvasGradient | CanvasPattern;
  lineWidth: number;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  stroke(): void;
  fill(): void;
}

/**
 * Draw grid lines and points onto a camera preview, optionally highlighting
 * the points currently selected for each eye.
 */
export function drawGridOverlay(
  ctx: OverlayContext,
  cfg: GridOverlayConfig,
  highlight?: { left?: { row: number; col: number }; right?: { row: number; col: number } },
): void {
  const points = gridPoints(cfg);
  const at = (r: number, c: number) => points[r * cfg.cols + c];

  ctx.strokeStyle = "rgba(0, 255, 128, 0.6)";
  ctx.lineWidth = 1;
  ctx.beginPath();
  for (let r = 0; r < cfg.rows; r++) {
    ctx.moveTo(at(r, 0).x, at(r, 0).y);
    for (let c = 1; c < cfg.cols; c++) {
      ctx.lineTo(at(r, c).x, at(r, c).y);
    }
  }
  for (let c = 0; c < cfg.cols; c++) {
    ctx.moveTo(at(0, c).x, at(0, c).y);
    for (let r = 1; r < cfg.rows; r++) {
      ctx.lineTo(at(r, c).x, at(r, c).y);
    }
  }
  ctx.stroke();

  for (const p of points) {
    const isLeft = highlight?.left?.row === p.row && highlight?.left?.col === p.col;
    const isRight = highlight?.right?.row === p.row && highlight?.right?.col === p.col;
    ctx.fillStyle = isLeft ? "red" : isRight ? "cyan" : "rgba(0, 255, 128, 0.8)";
    ctx.beginPath();
    ctx.arc(p.x, p.y, isLeft || isRight ? 5 : 2, 0, 2 * Math.PI);
    ctx.fill();
  }
}
