/** Curve evaluation and hit testing, all in image-space pixels. */

import type { Point, Spline } from "./model.js";

export function cubicAt(a: Point, b: Point, c: Point, d: Point, t: number): Point {
  const s = 1 - t;
  const w0 = s * s * s;
  const w1 = 3 * s * s * t;
  const w2 = 3 * s * t * t;
  const w3 = t * t * t;
  return [
    w0 * a[0] + w1 * b[0] + w2 * c[0] + w3 * d[0],
    w0 * a[1] + w1 * b[1] + w2 * c[1] + w3 * d[1],
  ];
}

/** Adaptive midpoint subdivision of one cubic segment. */
function flattenCubic(a: Point, b: Point, c: Point, d: Point, tol: number, out: Point[]): void {
  const chordX = d[0] - a[0];
  const chordY = d[1] - a[1];
  const len = Math.hypot(chordX, chordY);
  let dev: number;
  if (len < 1e-12) {
    dev = Math.max(Math.hypot(b[0] - a[0], b[1] - a[1]), Math.hypot(c[0] - a[0], c[1] - a[1]));
  } else {
    const nx = -chordY / len;
    const ny = chordX / len;
    dev = Math.max(
      Math.abs((b[0] - a[0]) * nx + (b[1] - a[1]) * ny),
      Math.abs((c[0] - a[0]) * nx + (c[1] - a[1]) * ny),
    );
  }
  if (dev <= tol) {
    out.push(d);
    return;
  }
  const mid = (p: Point, q: Point): Point => [(p[0] + q[0]) / 2, (p[1] + q[1]) / 2];
  const ab = mid(a, b);
  const bc = mid(b, c);
  const cd = mid(c, d);
  const abc = mid(ab, bc);
  const bcd = mid(bc, cd);
  const m = mid(abc, bcd);
  flattenCubic(a, ab, abc, m, tol, out);
  flattenCubic(m, bcd, cd, d, tol, out);
}

export const FLATTEN_TOLERANCE = 0.25;

/** Spline as a drawable polyline; bezier control points are flattened. */
export function splinePolyline(sp: Spline, tol: number = FLATTEN_TOLERANCE): Point[] {
  if (sp.kind === "polyline") return sp.points;
  const out: Point[] = [sp.points[0]!];
  for (let k = 0; k + 3 < sp.points.length; k += 3) {
    flattenCubic(sp.points[k]!, sp.points[k + 1]!, sp.points[k + 2]!, sp.points[k + 3]!, tol, out);
  }
  return out;
}

export function segmentDistance(p: Point, a: Point, b: Point): number {
  const vx = b[0] - a[0];
  const vy = b[1] - a[1];
  const wx = p[0] - a[0];
  const wy = p[1] - a[1];
  const vv = vx * vx + vy * vy;
  const t = vv === 0 ? 0 : Math.max(0, Math.min(1, (wx * vx + wy * vy) / vv));
  return Math.hypot(p[0] - (a[0] + t * vx), p[1] - (a[1] + t * vy));
}

export function polylineDistance(p: Point, poly: Point[]): number {
  let best = Infinity;
  for (let k = 1; k < poly.length; k++) {
    best = Math.min(best, segmentDistance(p, poly[k - 1]!, poly[k]!));
  }
  return poly.length === 1 ? Math.hypot(p[0] - poly[0]![0], p[1] - poly[0]![1]) : best;
}

export interface PointHit {
  splineIndex: number;
  pointIndex: number;
}

/** Closest control point within `radius` image pixels, if any. */
export function hitControlPoint(splines: Spline[], p: Point, radius: number): PointHit | null {
  let best: PointHit | null = null;
  let bestDist = radius;
  splines.forEach((sp, si) => {
    sp.points.forEach((q, pi) => {
      const d = Math.hypot(p[0] - q[0], p[1] - q[1]);
      if (d <= bestDist) {
        bestDist = d;
        best = { splineIndex: si, pointIndex: pi };
      }
    });
  });
  return best;
}

/** Closest curve within `radius` image pixels, if any. */
export function hitSpline(splines: Spline[], p: Point, radius: number): number | null {
  let best: number | null = null;
  let bestDist = radius;
  splines.forEach((sp, si) => {
    const d = polylineDistance(p, splinePolyline(sp));
    if (d <= bestDist) {
      bestDist = d;
      best = si;
    }
  });
  return best;
}
