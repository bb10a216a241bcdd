import { describe, expect, it } from "vitest";

import { BYSTANDER, INPAINT, READABLE, maskTintRgba, parsePgm } from "../src/pgm.js";

function pgmBytes(header: string, pixels: number[]): Uint8Array {
  const head = new TextEncoder().encode(header);
  const out = new Uint8Array(head.length + pixels.length);
  out.set(head, 0);
  out.set(pixels, head.length);
  return out;
}

describe("parsePgm", () => {
  it("reads a binary mask with the three label values", () => {
    const mask = parsePgm(pgmBytes("P5\n3 2\n255\n", [0, 128, 255, 0, 0, 128]));
    expect(mask.width).toBe(3);
    expect(mask.height).toBe(2);
    expect([...mask.data]).toEqual([READABLE, BYSTANDER, INPAINT, 0, 0, 128]);
  });

  it("skips header comments", () => {
    const mask = parsePgm(pgmBytes("P5\n# made by hand\n2 1\n255\n", [0, 255]));
    expect(mask.width).toBe(2);
    expect([...mask.data]).toEqual([0, 255]);
  });

  it("rejects other magics, maxvals, and short payloads", () => {
    expect(() => parsePgm(pgmBytes("P2\n1 1\n255\n", [0]))).toThrow(/magic/);
    expect(() => parsePgm(pgmBytes("P5\n1 1\n65535\n", [0, 0]))).toThrow(/maxval/);
    expect(() => parsePgm(pgmBytes("P5\n4 4\n255\n", [0, 0]))).toThrow(/truncated/);
  });
});

describe("maskTintRgba", () => {
  it("tints the two mask classes differently and readable not at all", () => {
    const rgba = maskTintRgba({ width: 3, height: 1, data: new Uint8Array([0, 128, 255]) });
    expect(rgba[3]).toBe(0); // readable: transparent
    expect(rgba[7]).toBeGreaterThan(0); // bystander: visible
    expect(rgba[11]).toBeGreaterThan(0); // inpaint: visible
    const bystander = [rgba[4], rgba[5], rgba[6]];
    const inpaint = [rgba[8], rgba[9], rgba[10]];
    expect(bystander).not.toEqual(inpaint);
  });
});
