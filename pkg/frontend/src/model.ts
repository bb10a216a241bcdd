/**
 * Spline document model, mirroring the service wire format.
 *
 * Coordinates are image-space pixels (origin at the top-left pixel
 * center, y growing downward) and are never rounded by the editor;
 * whatever precision arrives in the JSON survives every edit that does
 * not touch that coordinate.
 */

export const FORMAT_VERSION = 1;
export const SOURCES = ["auto", "user"] as const;
export const KINDS = ["polyline", "bezier"] as const;

export type Source = (typeof SOURCES)[number];
export type Kind = (typeof KINDS)[number];
export type Point = [number, number];

export interface Spline {
  id: string;
  source: Source;
  kind: Kind;
  direction: [number, number];
  points: Point[];
}

export interface SplineDoc {
  version: number;
  splines: Spline[];
}

export class SplineFormatError extends Error {
  override name = "SplineFormatError";
}

const DIRECTION_SLACK = 1e-9;

export function validateSpline(sp: Spline): void {
  if (typeof sp.id !== "string" || sp.id.length === 0) {
    throw new SplineFormatError("spline id must be a non-empty string");
  }
  if (!SOURCES.includes(sp.source)) {
    throw new SplineFormatError(`spline source must be one of ${SOURCES.join(", ")}`);
  }
  if (!KINDS.includes(sp.kind)) {
    throw new SplineFormatError(`spline kind must be one of ${KINDS.join(", ")}`);
  }
  const [gx, gy] = sp.direction;
  if (!Number.isFinite(gx) || !Number.isFinite(gy)) {
    throw new SplineFormatError("spline direction must be a finite 2-vector");
  }
  if (Math.hypot(gx, gy) > 1.0 + DIRECTION_SLACK) {
    throw new SplineFormatError("spline direction magnitude must not exceed 1");
  }
  if (sp.points.length < 2) {
    throw new SplineFormatError("spline needs at least two 2-D points");
  }
  for (const p of sp.points) {
    if (p.length !== 2 || !Number.isFinite(p[0]) || !Number.isFinite(p[1])) {
      throw new SplineFormatError("spline points must be finite");
    }
  }
  if (sp.kind === "bezier") {
    if ((sp.points.length - 1) % 3 !== 0) {
      throw new SplineFormatError("bezier splines need 3k+1 control points");
    }
  } else {
    for (let k = 1; k < sp.points.length; k++) {
      const a = sp.points[k - 1]!;
      const b = sp.points[k]!;
      if (a[0] === b[0] && a[1] === b[1]) {
        throw new SplineFormatError("consecutive polyline points must be distinct");
      }
    }
  }
}

const SPLINE_FIELDS = new Set(["id", "source", "kind", "direction", "points"]);

function asSpline(entry: unknown): Spline {
  if (typeof entry !== "object" || entry === null || Array.isArray(entry)) {
    throw new SplineFormatError("each spline must be a JSON object");
  }
  const rec = entry as Record<string, unknown>;
  const unknown = Object.keys(rec).filter((k) => !SPLINE_FIELDS.has(k));
  if (unknown.length > 0) {
    throw new SplineFormatError(`unknown spline fields: ${unknown.sort().join(", ")}`);
  }
  const direction = rec.direction;
  const points = rec.points;
  if (!Array.isArray(direction) || direction.length !== 2) {
    throw new SplineFormatError("spline direction must be a finite 2-vector");
  }
  if (!Array.isArray(points)) {
    throw new SplineFormatError("spline needs at least two 2-D points");
  }
  const sp: Spline = {
    id: rec.id as string,
    source: rec.source as Source,
    kind: (rec.kind ?? "polyline") as Kind,
    direction: [Number(direction[0]), Number(direction[1])],
    points: points.map((p) => {
      if (!Array.isArray(p) || p.length !== 2) {
        throw new SplineFormatError("spline points must be finite");
      }
      return [Number(p[0]), Number(p[1])] as Point;
    }),
  };
  validateSpline(sp);
  return sp;
}

/** Parse and validate a spline document; throws SplineFormatError. */
export function parseSplineDoc(text: string): SplineDoc {
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch (exc) {
    throw new SplineFormatError(`invalid JSON: ${(exc as Error).message}`);
  }
  if (typeof raw !== "object" || raw === null || Array.isArray(raw)) {
    throw new SplineFormatError("spline document must be a JSON object");
  }
  const doc = raw as Record<string, unknown>;
  if (doc.version !== FORMAT_VERSION) {
    throw new SplineFormatError(`unsupported spline document version ${String(doc.version)}`);
  }
  if (!Array.isArray(doc.splines)) {
    throw new SplineFormatError("spline document needs a 'splines' array");
  }
  const splines = doc.splines.map(asSpline);
  const seen = new Set<string>();
  for (const sp of splines) {
    if (seen.has(sp.id)) {
      throw new SplineFormatError(`duplicate spline id ${sp.id}`);
    }
    seen.add(sp.id);
  }
  return { version: FORMAT_VERSION, splines };
}

/** Deep copy so undo snapshots and edits never share point arrays. */
export function cloneSpline(sp: Spline): Spline {
  return {
    id: sp.id,
    source: sp.source,
    kind: sp.kind,
    direction: [sp.direction[0], sp.direction[1]],
    points: sp.points.map((p) => [p[0], p[1]] as Point),
  };
}

export function cloneDoc(doc: SplineDoc): SplineDoc {
  return { version: doc.version, splines: doc.splines.map(cloneSpline) };
}

/** Next free id for hand-drawn splines ("user-0", "user-1", ...). */
export function nextUserId(doc: SplineDoc): string {
  let k = 0;
  const taken = new Set(doc.splines.map((sp) => sp.id));
  while (taken.has(`user-${k}`)) k++;
  return `user-${k}`;
}
