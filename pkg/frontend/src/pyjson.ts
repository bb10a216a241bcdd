/**
 * Canonical spline JSON writer, byte-identical to the service's own
 * serializer (json.dumps with indent=1, separators (", ", ": "), fixed
 * key order, trailing newline, shortest round-trip floats).
 *
 * The service stores uploaded documents verbatim, so producing the same
 * bytes the backend would produce keeps save -> load -> save cycles
 * stable and diffs meaningful.
 */

import type { Spline, SplineDoc } from "./model.js";
import { validateSpline } from "./model.js";

/**
 * Format one coordinate the way Python's repr() does.
 *
 * Both runtimes print the shortest decimal that round-trips, but the
 * dressing differs: Python keeps a ".0" on integral floats and switches
 * to exponent notation outside [1e-4, 1e16), zero-padding the exponent
 * to two digits.
 */
export function pyFloat(x: number): string {
  if (!Number.isFinite(x)) {
    throw new Error("coordinates must be finite");
  }
  if (Object.is(x, -0)) return "-0.0";
  const abs = Math.abs(x);
  if (Number.isInteger(x) && abs < 1e16) {
    return x.toFixed(1);
  }
  if (abs >= 1e16 || abs < 1e-4) {
    // exponent style: mantissa keeps shortest digits, no trailing ".0"
    const [mant, exp] = x.toExponential().split("e") as [string, string];
    const sign = exp.startsWith("-") ? "-" : "+";
    const digits = exp.replace(/^[+-]/, "").padStart(2, "0");
    return `${mant}e${sign}${digits}`;
  }
  return String(x);
}

/** JSON string escaping as Python emits it (ensure_ascii=True). */
export function pyString(s: string): string {
  let out = '"';
  for (const ch of s) {
    const code = ch.codePointAt(0)!;
    if (ch === '"') out += '\\"';
    else if (ch === "\\") out += "\\\\";
    else if (ch === "\n") out += "\\n";
    else if (ch === "\r") out += "\\r";
    else if (ch === "\t") out += "\\t";
    else if (ch === "\b") out += "\\b";
    else if (ch === "\f") out += "\\f";
    else if (code < 0x20 || code > 0x7e) {
      if (code > 0xffff) {
        // astral plane: surrogate pair, both halves escaped
        const high = 0xd800 + ((code - 0x10000) >> 10);
        const low = 0xdc00 + ((code - 0x10000) & 0x3ff);
        out += `\\u${high.toString(16).padStart(4, "0")}`;
        out += `\\u${low.toString(16).padStart(4, "0")}`;
      } else {
        out += `\\u${code.toString(16).padStart(4, "0")}`;
      }
    } else {
      out += ch;
    }
  }
  return out + '"';
}

type Json =
  | { int: number }
  | { float: number }
  | { str: string }
  | Json[]
  | Map<string, Json>;

function write(value: Json, level: number): string {
  const pad = " ".repeat(level + 1);
  if (Array.isArray(value)) {
    if (value.length === 0) return "[]";
    const items = value.map((v) => pad + write(v, level + 1));
    return "[\n" + items.join(", \n") + "\n" + " ".repeat(level) + "]";
  }
  if (value instanceof Map) {
    if (value.size === 0) return "{}";
    const items = [...value.entries()].map(
      ([k, v]) => `${pad}${pyString(k)}: ${write(v, level + 1)}`,
    );
    return "{\n" + items.join(", \n") + "\n" + " ".repeat(level) + "}";
  }
  if ("int" in value) return String(value.int);
  if ("float" in value) return pyFloat(value.float);
  return pyString(value.str);
}

function splineJson(sp: Spline): Json {
  validateSpline(sp);
  return new Map<string, Json>([
    ["id", { str: sp.id }],
    ["source", { str: sp.source }],
    ["kind", { str: sp.kind }],
    ["direction", sp.direction.map((v) => ({ float: v }))],
    ["points", sp.points.map((p) => p.map((v) => ({ float: v })) as Json)],
  ]);
}

/** Serialize a document to the canonical wire bytes. */
export function dumpSplineDoc(doc: SplineDoc): string {
  const root = new Map<string, Json>([
    ["version", { int: doc.version }],
    ["splines", doc.splines.map(splineJson)],
  ]);
  return write(root, 0) + "\n";
}
