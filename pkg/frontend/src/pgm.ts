/** Binary PGM label masks: 0 readable, 128 bystander, 255 inpaint. */

export const READABLE = 0;
export const BYSTANDER = 128;
export const INPAINT = 255;

export interface LabelMask {
  width: number;
  height: number;
  data: Uint8Array;
}

function isSpace(byte: number): boolean {
  return byte === 0x20 || byte === 0x09 || byte === 0x0a || byte === 0x0d || byte === 0x0c || byte === 0x0b;
}

/** Read one whitespace-delimited header token, skipping # comments. */
function token(bytes: Uint8Array, pos: number): [string, number] {
  while (pos < bytes.length) {
    if (isSpace(bytes[pos]!)) {
      pos++;
    } else if (bytes[pos] === 0x23) {
      while (pos < bytes.length && bytes[pos] !== 0x0a) pos++;
    } else {
      break;
    }
  }
  const start = pos;
  while (pos < bytes.length && !isSpace(bytes[pos]!)) pos++;
  if (start === pos) throw new Error("truncated PGM header");
  let out = "";
  for (let i = start; i < pos; i++) out += String.fromCharCode(bytes[i]!);
  return [out, pos];
}

export function parsePgm(bytes: Uint8Array): LabelMask {
  let pos: number;
  let magic: string;
  [magic, pos] = token(bytes, 0);
  if (magic !== "P5") throw new Error(`unsupported PGM magic ${magic}`);
  let w: string, h: string, maxval: string;
  [w, pos] = token(bytes, pos);
  [h, pos] = token(bytes, pos);
  [maxval, pos] = token(bytes, pos);
  const width = Number(w);
  const height = Number(h);
  if (!Number.isInteger(width) || !Number.isInteger(height) || width < 1 || height < 1) {
    throw new Error("bad PGM dimensions");
  }
  if (maxval !== "255") throw new Error(`PGM maxval must be 255, got ${maxval}`);
  pos++; // single whitespace byte after maxval
  const need = width * height;
  if (bytes.length - pos < need) throw new Error("truncated PGM payload");
  return { width, height, data: bytes.slice(pos, pos + need) };
}

/** RGBA tint layer: inpaint warm, bystander cool, readable transparent. */
export function maskTintRgba(mask: LabelMask): Uint8ClampedArray<ArrayBuffer> {
  const out = new Uint8ClampedArray(mask.width * mask.height * 4);
  for (let i = 0; i < mask.data.length; i++) {
    const v = mask.data[i]!;
    const o = i * 4;
    if (v === INPAINT) {
      out[o] = 255;
      out[o + 1] = 110;
      out[o + 2] = 0;
      out[o + 3] = 90;
    } else if (v === BYSTANDER) {
      out[o] = 30;
      out[o + 1] = 120;
      out[o + 2] = 255;
      out[o + 3] = 90;
    }
  }
  return out;
}
