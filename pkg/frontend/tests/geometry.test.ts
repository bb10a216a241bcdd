import { describe, expect, it } from "vitest";

import {
  FLATTEN_TOLERANCE,
  cubicAt,
  hitControlPoint,
  hitSpline,
  polylineDistance,
  segmentDistance,
  splinePolyline,
} from "../src/geometry.js";
import type { Point, Spline } from "../src/model.js";

const CURVED: Spline = {
  id: "b",
  source: "user",
  kind: "bezier",
  direction: [0, 0],
  points: [
    [0, 0],
    [30, 60],
    [70, -60],
    [100, 0],
  ],
};

describe("cubicAt", () => {
  it("hits the endpoints at t=0 and t=1", () => {
    const [a, b, c, d] = CURVED.points as [Point, Point, Point, Point];
    expect(cubicAt(a, b, c, d, 0)).toEqual(a);
    expect(cubicAt(a, b, c, d, 1)).toEqual(d);
  });

  it("reduces to linear interpolation for collinear controls", () => {
    const p = cubicAt([0, 0], [1, 1], [2, 2], [3, 3], 0.5);
    expect(p[0]).toBeCloseTo(1.5, 12);
    expect(p[1]).toBeCloseTo(1.5, 12);
  });
});

describe("splinePolyline", () => {
  it("returns polyline points untouched", () => {
    const sp: Spline = {
      id: "p",
      source: "auto",
      kind: "polyline",
      direction: [0, 0],
      points: [
        [1, 2],
        [3, 4],
      ],
    };
    expect(splinePolyline(sp)).toBe(sp.points);
  });

  it("flattens a curved bezier to within the tolerance", () => {
    const flat = splinePolyline(CURVED);
    expect(flat.length).toBeGreaterThan(3);
    const [a, b, c, d] = CURVED.points as [Point, Point, Point, Point];
    for (let k = 0; k <= 400; k++) {
      const p = cubicAt(a, b, c, d, k / 400);
      expect(polylineDistance(p, flat)).toBeLessThanOrEqual(FLATTEN_TOLERANCE + 0.05);
    }
  });

  it("keeps a straight bezier as its chord", () => {
    const sp: Spline = {
      ...CURVED,
      points: [
        [0, 0],
        [10, 0],
        [20, 0],
        [30, 0],
      ],
    };
    const flat = splinePolyline(sp);
    expect(flat[0]).toEqual([0, 0]);
    expect(flat[flat.length - 1]).toEqual([30, 0]);
    for (const p of flat) expect(Math.abs(p[1])).toBeLessThanOrEqual(1e-12);
  });

  it("flattens every segment of a multi-segment bezier", () => {
    const sp: Spline = {
      ...CURVED,
      points: [
        [0, 0],
        [10, 20],
        [20, 20],
        [30, 0],
        [40, -20],
        [50, -20],
        [60, 0],
      ],
    };
    const flat = splinePolyline(sp);
    expect(flat[0]).toEqual([0, 0]);
    expect(flat[flat.length - 1]).toEqual([60, 0]);
    expect(polylineDistance([30, 0], flat)).toBeLessThanOrEqual(1e-9);
  });
});

describe("distances", () => {
  it("is zero on the segment and clamps past the ends", () => {
    expect(segmentDistance([5, 0], [0, 0], [10, 0])).toBe(0);
    expect(segmentDistance([-3, 4], [0, 0], [10, 0])).toBeCloseTo(5, 12);
    expect(segmentDistance([13, -4], [0, 0], [10, 0])).toBeCloseTo(5, 12);
  });

  it("handles zero-length segments", () => {
    expect(segmentDistance([3, 4], [0, 0], [0, 0])).toBeCloseTo(5, 12);
  });

  it("takes the minimum over polyline segments", () => {
    const poly: Point[] = [
      [0, 0],
      [10, 0],
      [10, 10],
    ];
    expect(polylineDistance([10.5, 5], poly)).toBeCloseTo(0.5, 12);
  });
});

describe("hit testing", () => {
  const splines: Spline[] = [
    CURVED,
    {
      id: "p",
      source: "auto",
      kind: "polyline",
      direction: [0, 0],
      points: [
        [200, 200],
        [300, 200],
      ],
    },
  ];

  it("finds the nearest control point within the radius", () => {
    const hit = hitControlPoint(splines, [31, 59], 5);
    expect(hit).toEqual({ splineIndex: 0, pointIndex: 1 });
    expect(hitControlPoint(splines, [31, 59], 0.5)).toBeNull();
  });

  it("prefers the closer of two candidate points", () => {
    const hit = hitControlPoint(splines, [205, 201], 50);
    expect(hit).toEqual({ splineIndex: 1, pointIndex: 0 });
  });

  it("finds the nearest curve within the radius", () => {
    expect(hitSpline(splines, [250, 202], 5)).toBe(1);
    expect(hitSpline(splines, [250, 230], 5)).toBeNull();
    expect(hitSpline(splines, [50, 2], 6)).toBe(0);
  });
});
