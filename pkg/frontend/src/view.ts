/** Pan/zoom mapping between canvas pixels and image pixels.
 *
 * Edits happen in image space, so a drag of d canvas pixels always moves a
 * point by exactly d / scale image pixels regardless of zoom level.
 */

import type { Point } from "./model.js";

export class ViewTransform {
  scale = 1;
  offsetX = 0;
  offsetY = 0;

  worldToCanvas(p: Point): Point {
    return [p[0] * this.scale + this.offsetX, p[1] * this.scale + this.offsetY];
  }

  canvasToWorld(p: Point): Point {
    return [(p[0] - this.offsetX) / this.scale, (p[1] - this.offsetY) / this.scale];
  }

  /** Deltas ignore the offset; division is exact for power-of-two scales. */
  canvasDeltaToWorld(d: Point): Point {
    return [d[0] / this.scale, d[1] / this.scale];
  }

  /** Zoom about a fixed canvas point so it stays put on screen. */
  zoomAt(canvasPoint: Point, factor: number): void {
    const anchor = this.canvasToWorld(canvasPoint);
    this.scale *= factor;
    this.offsetX = canvasPoint[0] - anchor[0] * this.scale;
    this.offsetY = canvasPoint[1] - anchor[1] * this.scale;
  }

  pan(dx: number, dy: number): void {
    this.offsetX += dx;
    this.offsetY += dy;
  }

  /** Fit an image of the given size into a canvas, centered. */
  fit(imageW: number, imageH: number, canvasW: number, canvasH: number): void {
    const s = Math.min(canvasW / imageW, canvasH / imageH);
    this.scale = s;
    this.offsetX = (canvasW - imageW * s) / 2;
    this.offsetY = (canvasH - imageH * s) / 2;
  }
}
