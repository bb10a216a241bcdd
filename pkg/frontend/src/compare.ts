/** Before/after comparison helpers for the wipe view. */

/** Number of positions where the two buffers differ, length gap included. */
export function byteDiffCount(a: Uint8Array, b: Uint8Array): number {
  const shared = Math.min(a.length, b.length);
  let count = Math.max(a.length, b.length) - shared;
  for (let i = 0; i < shared; i++) {
    if (a[i] !== b[i]) count++;
  }
  return count;
}

/** Draggable wipe divider; position is the fraction showing the new result. */
export class WipeState {
  private pos = 0.5;

  get position(): number {
    return this.pos;
  }

  setPosition(p: number): void {
    this.pos = Math.max(0, Math.min(1, p));
  }
}
