/** Bounded undo/redo over opaque document snapshots. */

export const UNDO_DEPTH = 100;

export class History {
  private past: string[] = [];
  private future: string[] = [];
  private readonly depth: number;

  constructor(depth: number = UNDO_DEPTH) {
    if (depth < 1) throw new Error("history depth must be at least 1");
    this.depth = depth;
  }

  /** Record the state that existed before a mutation. Clears redo. */
  push(snapshot: string): void {
    this.past.push(snapshot);
    if (this.past.length > this.depth) this.past.shift();
    this.future = [];
  }

  canUndo(): boolean {
    return this.past.length > 0;
  }

  canRedo(): boolean {
    return this.future.length > 0;
  }

  /** Swap `current` for the previous snapshot, or null when exhausted. */
  undo(current: string): string | null {
    const prev = this.past.pop();
    if (prev === undefined) return null;
    this.future.push(current);
    return prev;
  }

  redo(current: string): string | null {
    const next = this.future.pop();
    if (next === undefined) return null;
    this.past.push(current);
    return next;
  }

  clear(): void {
    this.past = [];
    this.future = [];
  }
}
