import { describe, expect, it } from "vitest";

import {
  SplineFormatError,
  cloneDoc,
  nextUserId,
  parseSplineDoc,
  validateSpline,
} from "../src/model.js";
import type { Spline } from "../src/model.js";

function spline(overrides: Partial<Spline> = {}): Spline {
  return {
    id: "s1",
    source: "auto",
    kind: "polyline",
    direction: [0.6, -0.8],
    points: [
      [0, 0],
      [10, 5],
    ],
    ...overrides,
  };
}

function docText(entries: unknown[]): string {
  return JSON.stringify({ version: 1, splines: entries });
}

describe("validateSpline", () => {
  it("accepts a well-formed polyline", () => {
    expect(() => validateSpline(spline())).not.toThrow();
  });

  it("rejects an empty id", () => {
    expect(() => validateSpline(spline({ id: "" }))).toThrow(SplineFormatError);
  });

  it("rejects unknown source and kind", () => {
    expect(() => validateSpline(spline({ source: "robot" as never }))).toThrow(/source/);
    expect(() => validateSpline(spline({ kind: "arc" as never }))).toThrow(/kind/);
  });

  it("rejects non-finite or oversized directions", () => {
    expect(() => validateSpline(spline({ direction: [NaN, 0] }))).toThrow(/finite/);
    expect(() => validateSpline(spline({ direction: [1, 1] }))).toThrow(/magnitude/);
  });

  it("allows unit directions up to the slack", () => {
    expect(() => validateSpline(spline({ direction: [1, 0] }))).not.toThrow();
    expect(() => validateSpline(spline({ direction: [0, 0] }))).not.toThrow();
  });

  it("requires at least two finite points", () => {
    expect(() => validateSpline(spline({ points: [[0, 0]] }))).toThrow(/two/);
    expect(() =>
      validateSpline(
        spline({
          points: [
            [0, 0],
            [Infinity, 1],
          ],
        }),
      ),
    ).toThrow(/finite/);
  });

  it("requires 3k+1 control points for beziers", () => {
    const pts: [number, number][] = [
      [0, 0],
      [1, 1],
      [2, 0],
      [3, 1],
      [4, 0],
    ];
    expect(() => validateSpline(spline({ kind: "bezier", points: pts }))).toThrow(/3k\+1/);
    expect(() =>
      validateSpline(spline({ kind: "bezier", points: pts.slice(0, 4) })),
    ).not.toThrow();
  });

  it("rejects coincident consecutive polyline points", () => {
    expect(() =>
      validateSpline(
        spline({
          points: [
            [1, 2],
            [1, 2],
            [3, 4],
          ],
        }),
      ),
    ).toThrow(/distinct/);
  });

  it("allows a bezier to repeat points", () => {
    expect(() =>
      validateSpline(
        spline({
          kind: "bezier",
          points: [
            [0, 0],
            [0, 0],
            [5, 5],
            [5, 5],
          ],
        }),
      ),
    ).not.toThrow();
  });
});

describe("parseSplineDoc", () => {
  it("parses a valid document and defaults kind to polyline", () => {
    const doc = parseSplineDoc(
      docText([{ id: "a", source: "auto", direction: [0, 1], points: [[0, 0], [1, 1]] }]),
    );
    expect(doc.version).toBe(1);
    expect(doc.splines).toHaveLength(1);
    expect(doc.splines[0]!.kind).toBe("polyline");
  });

  it("rejects invalid JSON with a parse error message", () => {
    expect(() => parseSplineDoc("{nope")).toThrow(/invalid JSON/);
  });

  it("rejects non-object roots", () => {
    expect(() => parseSplineDoc("[1, 2]")).toThrow(/JSON object/);
    expect(() => parseSplineDoc("null")).toThrow(/JSON object/);
  });

  it("rejects missing or wrong versions", () => {
    expect(() => parseSplineDoc(JSON.stringify({ splines: [] }))).toThrow(/version/);
    expect(() => parseSplineDoc(JSON.stringify({ version: 2, splines: [] }))).toThrow(/version/);
  });

  it("rejects a missing splines array", () => {
    expect(() => parseSplineDoc(JSON.stringify({ version: 1 }))).toThrow(/'splines' array/);
  });

  it("rejects non-object spline entries", () => {
    expect(() => parseSplineDoc(docText([17]))).toThrow(/JSON object/);
  });

  it("rejects unknown spline fields by name", () => {
    const entry = {
      id: "a",
      source: "auto",
      direction: [0, 1],
      points: [[0, 0], [1, 1]],
      color: "red",
    };
    expect(() => parseSplineDoc(docText([entry]))).toThrow(/unknown spline fields: color/);
  });

  it("rejects duplicate ids", () => {
    const entry = { id: "a", source: "auto", direction: [0, 1], points: [[0, 0], [1, 1]] };
    expect(() => parseSplineDoc(docText([entry, entry]))).toThrow(/duplicate/);
  });

  it("rejects malformed directions and points", () => {
    const base = { id: "a", source: "auto", points: [[0, 0], [1, 1]] };
    expect(() => parseSplineDoc(docText([{ ...base, direction: [0, 1, 2] }]))).toThrow(/2-vector/);
    expect(() =>
      parseSplineDoc(docText([{ ...base, direction: [0, 1], points: [[0], [1, 1]] }])),
    ).toThrow(/finite/);
  });
});

describe("helpers", () => {
  it("cloneDoc produces an independent copy", () => {
    const doc = parseSplineDoc(
      docText([{ id: "a", source: "auto", direction: [0, 1], points: [[0, 0], [1, 1]] }]),
    );
    const copy = cloneDoc(doc);
    copy.splines[0]!.points[0]![0] = 99;
    expect(doc.splines[0]!.points[0]![0]).toBe(0);
  });

  it("nextUserId skips taken ids", () => {
    const doc = parseSplineDoc(
      docText([
        { id: "user-0", source: "user", direction: [0, 0], points: [[0, 0], [1, 1]] },
        { id: "user-2", source: "user", direction: [0, 0], points: [[0, 0], [1, 1]] },
      ]),
    );
    expect(nextUserId(doc)).toBe("user-1");
  });
});
