/** Editing model for one project's spline document.
 *
 * All geometry lives in image coordinates; the view layer converts canvas
 * gestures before they reach this class, so a committed drag is a single
 * exact addition and zoom never changes what gets serialized.  Every
 * successful mutation pushes the prior document text onto the undo stack,
 * making undo byte-precise by construction.
 */

import {
  FORMAT_VERSION,
  SplineFormatError,
  cloneSpline,
  nextUserId,
  parseSplineDoc,
  validateSpline,
} from "./model.js";
import type { Point, Spline, SplineDoc } from "./model.js";
import { dumpSplineDoc } from "./pyjson.js";
import { History } from "./undo.js";

export interface Selection {
  spline: number;
  point: number | null;
}

export class EditorSession {
  doc: SplineDoc;
  selection: Selection | null = null;
  private history = new History();
  private savedText: string;

  constructor(text: string) {
    this.doc = parseSplineDoc(text);
    this.savedText = text;
  }

  static empty(): EditorSession {
    return new EditorSession(`{\n "version": 1,\n "splines": []\n}\n`);
  }

  /** Canonical document text, byte-compatible with the server's writer. */
  toText(): string {
    return dumpSplineDoc(this.doc);
  }

  get dirty(): boolean {
    return this.toText() !== this.savedText;
  }

  markSaved(): void {
    this.savedText = this.toText();
  }

  canUndo(): boolean {
    return this.history.canUndo();
  }

  canRedo(): boolean {
    return this.history.canRedo();
  }

  undo(): boolean {
    const prev = this.history.undo(this.toText());
    if (prev === null) return false;
    this.doc = parseSplineDoc(prev);
    this.selection = null;
    return true;
  }

  redo(): boolean {
    const next = this.history.redo(this.toText());
    if (next === null) return false;
    this.doc = parseSplineDoc(next);
    this.selection = null;
    return true;
  }

  /** Apply fn, validate the result, roll back and rethrow when invalid. */
  private mutate<T>(fn: () => T): T {
    const before = this.toText();
    try {
      const out = fn();
      const seen = new Set<string>();
      for (const sp of this.doc.splines) {
        validateSpline(sp);
        if (seen.has(sp.id)) throw new SplineFormatError(`duplicate spline id ${sp.id}`);
        seen.add(sp.id);
      }
      this.history.push(before);
      return out;
    } catch (err) {
      this.doc = parseSplineDoc(before);
      throw err;
    }
  }

  private spline(si: number): Spline {
    const sp = this.doc.splines[si];
    if (sp === undefined) throw new SplineFormatError(`no spline at index ${si}`);
    return sp;
  }

  /** Move one control point by an exact image-space delta. */
  dragPoint(si: number, pi: number, dx: number, dy: number): void {
    this.mutate(() => {
      const sp = this.spline(si);
      const p = sp.points[pi];
      if (p === undefined) throw new SplineFormatError(`no point at index ${pi}`);
      sp.points[pi] = [p[0] + dx, p[1] + dy];
    });
    this.selection = { spline: si, point: pi };
  }

  movePointTo(si: number, pi: number, x: number, y: number): void {
    this.mutate(() => {
      const sp = this.spline(si);
      if (sp.points[pi] === undefined) throw new SplineFormatError(`no point at index ${pi}`);
      sp.points[pi] = [x, y];
    });
    this.selection = { spline: si, point: pi };
  }

  /** Add a user spline; returns its generated id. */
  addSpline(kind: Spline["kind"], points: Point[], direction: Point = [0, 0]): string {
    const id = nextUserId(this.doc);
    this.mutate(() => {
      this.doc.splines.push({
        id,
        source: "user",
        kind,
        direction: [direction[0], direction[1]],
        points: points.map((p) => [p[0], p[1]] as Point),
      });
    });
    this.selection = { spline: this.doc.splines.length - 1, point: null };
    return id;
  }

  deleteSpline(si: number): Spline {
    const removed = this.mutate(() => {
      this.spline(si);
      return this.doc.splines.splice(si, 1)[0]!;
    });
    this.selection = null;
    return cloneSpline(removed);
  }

  setDirection(si: number, gx: number, gy: number): void {
    this.mutate(() => {
      this.spline(si).direction = [gx, gy];
    });
  }

  /** Append a point to a polyline (drawing gesture). */
  appendPoint(si: number, p: Point): void {
    this.mutate(() => {
      const sp = this.spline(si);
      if (sp.kind !== "polyline") {
        throw new SplineFormatError("can only append points to a polyline");
      }
      sp.points.push([p[0], p[1]]);
    });
  }

  get version(): number {
    return FORMAT_VERSION;
  }
}
