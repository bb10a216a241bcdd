/** Browser entry point: loads a project and wires up the editor. */

import { ApiClient, ApiError } from "./api.js";
import type { GuideGrid } from "./api.js";
import { hitControlPoint, hitSpline } from "./geometry.js";
import { SplineFormatError } from "./model.js";
import type { Point } from "./model.js";
import { maskTintRgba, parsePgm } from "./pgm.js";
import { clear, drawGuideGlyphs, drawImage, drawSplines, drawWipe } from "./render.js";
import { EditorSession } from "./session.js";
import { WipeState, byteDiffCount } from "./compare.js";
import { ViewTransform } from "./view.js";

const HIT_RADIUS_PX = 7;

interface DragState {
  spline: number;
  point: number;
  canvasStart: Point;
}

class Editor {
  private readonly api: ApiClient;
  private readonly pid: string;
  private readonly canvas: HTMLCanvasElement;
  private readonly ctx: CanvasRenderingContext2D;
  private readonly view = new ViewTransform();
  private session: EditorSession | null = null;
  private image: ImageBitmap | null = null;
  private maskTint: HTMLCanvasElement | null = null;
  private guide: GuideGrid | null = null;
  private resultBefore: ImageBitmap | null = null;
  private resultAfter: ImageBitmap | null = null;
  private wipe = new WipeState();
  private drag: DragState | null = null;
  private panStart: Point | null = null;
  private pendingSplineStart: Point | null = null;
  private showMask = true;
  private showGuide = false;
  private compareMode = false;

  constructor(api: ApiClient, pid: string, canvas: HTMLCanvasElement) {
    this.api = api;
    this.pid = pid;
    this.canvas = canvas;
    const ctx = canvas.getContext("2d");
    if (!ctx) throw new Error("2d canvas context unavailable");
    this.ctx = ctx;
  }

  async load(): Promise<void> {
    const [imagePng, maskPgm, splinesText] = await Promise.all([
      this.api.getImageBytes(this.pid),
      this.api.getMaskBytes(this.pid),
      this.api.getSplinesText(this.pid),
    ]);
    this.image = await createImageBitmap(new Blob([imagePng as BlobPart], { type: "image/png" }));
    const mask = parsePgm(maskPgm);
    const tint = document.createElement("canvas");
    tint.width = mask.width;
    tint.height = mask.height;
    tint.getContext("2d")!.putImageData(new ImageData(maskTintRgba(mask), mask.width, mask.height), 0, 0);
    this.maskTint = tint;
    this.session = new EditorSession(splinesText);
    this.view.fit(this.image.width, this.image.height, this.canvas.width, this.canvas.height);
    this.guide = await this.api.getGuideField(this.pid);
    this.bind();
    this.render();
    this.status(`loaded project ${this.pid}: ${this.session.doc.splines.length} splines`);
  }

  private status(msg: string): void {
    const el = document.getElementById("status");
    if (el) el.textContent = msg;
  }

  private hint(msg: string): void {
    const el = document.getElementById("hint");
    if (el) {
      el.textContent = msg;
      el.classList.toggle("visible", msg !== "");
    }
  }

  private canvasPoint(ev: MouseEvent): Point {
    const rect = this.canvas.getBoundingClientRect();
    return [ev.clientX - rect.left, ev.clientY - rect.top];
  }

  private bind(): void {
    this.canvas.addEventListener("pointerdown", (ev) => this.onDown(ev));
    this.canvas.addEventListener("pointermove", (ev) => this.onMove(ev));
    this.canvas.addEventListener("pointerup", (ev) => this.onUp(ev));
    this.canvas.addEventListener("wheel", (ev) => {
      ev.preventDefault();
      this.view.zoomAt(this.canvasPoint(ev), ev.deltaY < 0 ? 1.25 : 0.8);
      this.render();
    }, { passive: false });

    const on = (id: string, fn: () => void) => {
      document.getElementById(id)?.addEventListener("click", () => {
        fn();
        this.render();
      });
    };
    on("btn-save", () => void this.save());
    on("btn-inpaint", () => void this.reinpaint());
    on("btn-undo", () => void this.session?.undo());
    on("btn-redo", () => void this.session?.redo());
    on("btn-delete", () => this.deleteSelected());
    on("btn-add", () => {
      this.pendingSplineStart = null;
      this.hint("click the start point of the new spline");
    });
    on("btn-mask", () => { this.showMask = !this.showMask; });
    on("btn-guide", () => { this.showGuide = !this.showGuide; });
    on("btn-compare", () => { this.compareMode = !this.compareMode; });

    document.addEventListener("keydown", (ev) => {
      if (ev.key === "z" && (ev.ctrlKey || ev.metaKey)) {
        if (ev.shiftKey) this.session?.redo();
        else this.session?.undo();
        this.render();
      } else if (ev.key === "Delete" || ev.key === "Backspace") {
        this.deleteSelected();
        this.render();
      }
    });

    const wipeInput = document.getElementById("wipe") as HTMLInputElement | null;
    wipeInput?.addEventListener("input", () => {
      this.wipe.setPosition(Number(wipeInput.value) / 100);
      this.render();
    });
  }

  private deleteSelected(): void {
    if (!this.session || this.session.selection === null) return;
    this.session.deleteSpline(this.session.selection.spline);
    this.status("spline deleted (undo restores it exactly)");
  }

  private onDown(ev: PointerEvent): void {
    if (!this.session) return;
    this.canvas.setPointerCapture(ev.pointerId);
    const cp = this.canvasPoint(ev);
    const world = this.view.canvasToWorld(cp);

    const addHint = document.getElementById("hint")?.classList.contains("visible") ?? false;
    if (addHint && this.pendingSplineStart === null && ev.button === 0) {
      this.pendingSplineStart = world;
      this.hint("click the end point");
      return;
    }
    if (addHint && this.pendingSplineStart !== null && ev.button === 0) {
      this.finishNewSpline(world);
      return;
    }

    if (ev.button === 1 || ev.shiftKey) {
      this.panStart = cp;
      return;
    }
    const hit = hitControlPoint(this.session.doc.splines, world, HIT_RADIUS_PX / this.view.scale);
    if (hit) {
      this.drag = { spline: hit.splineIndex, point: hit.pointIndex, canvasStart: cp };
      this.session.selection = { spline: hit.splineIndex, point: hit.pointIndex };
      this.render();
      return;
    }
    const si = hitSpline(this.session.doc.splines, world, HIT_RADIUS_PX / this.view.scale);
    this.session.selection = si === null ? null : { spline: si, point: null };
    if (si === null) this.panStart = cp;
    this.render();
  }

  private onMove(ev: PointerEvent): void {
    const cp = this.canvasPoint(ev);
    if (this.panStart) {
      this.view.pan(cp[0] - this.panStart[0], cp[1] - this.panStart[1]);
      this.panStart = cp;
      this.render();
      return;
    }
    if (this.drag && this.session) {
      this.render();
      const sp = this.session.doc.splines[this.drag.spline];
      const p = sp?.points[this.drag.point];
      if (p) {
        const [dx, dy] = this.view.canvasDeltaToWorld([
          cp[0] - this.drag.canvasStart[0],
          cp[1] - this.drag.canvasStart[1],
        ]);
        const [x, y] = this.view.worldToCanvas([p[0] + dx, p[1] + dy]);
        this.ctx.save();
        this.ctx.strokeStyle = "#ffffff";
        this.ctx.beginPath();
        this.ctx.arc(x, y, 6, 0, 2 * Math.PI);
        this.ctx.stroke();
        this.ctx.restore();
      }
    }
  }

  private onUp(ev: PointerEvent): void {
    this.panStart = null;
    if (!this.drag || !this.session) return;
    const cp = this.canvasPoint(ev);
    const [dx, dy] = this.view.canvasDeltaToWorld([
      cp[0] - this.drag.canvasStart[0],
      cp[1] - this.drag.canvasStart[1],
    ]);
    const { spline, point } = this.drag;
    this.drag = null;
    if (dx === 0 && dy === 0) {
      this.render();
      return;
    }
    try {
      this.session.dragPoint(spline, point, dx, dy);
      this.hint("");
    } catch (err) {
      if (err instanceof SplineFormatError) {
        this.hint(`rejected: ${err.message}`);
      } else {
        throw err;
      }
    }
    this.render();
  }

  private finishNewSpline(end: Point): void {
    if (!this.session || this.pendingSplineStart === null) return;
    const a = this.pendingSplineStart;
    this.pendingSplineStart = null;
    this.hint("");
    const third: Point = [a[0] + (end[0] - a[0]) / 3, a[1] + (end[1] - a[1]) / 3];
    const twoThirds: Point = [a[0] + (2 * (end[0] - a[0])) / 3, a[1] + (2 * (end[1] - a[1])) / 3];
    try {
      const id = this.session.addSpline("bezier", [a, third, twoThirds, end]);
      this.status(`added ${id}`);
    } catch (err) {
      if (err instanceof SplineFormatError) this.hint(`rejected: ${err.message}`);
      else throw err;
    }
    this.render();
  }

  private async save(): Promise<void> {
    if (!this.session) return;
    try {
      const count = await this.api.putSplines(this.pid, this.session.toText());
      this.session.markSaved();
      this.guide = await this.api.getGuideField(this.pid);
      this.status(`saved ${count} splines`);
    } catch (err) {
      this.status(err instanceof ApiError ? err.message : String(err));
    }
    this.render();
  }

  private async reinpaint(): Promise<void> {
    if (!this.session) return;
    this.status("inpainting...");
    try {
      await this.api.putSplines(this.pid, this.session.toText());
      this.session.markSaved();
      const prev = this.resultAfter;
      await this.api.inpaint(this.pid);
      const png = await this.api.getResultBytes(this.pid);
      const bitmap = await createImageBitmap(new Blob([png as BlobPart], { type: "image/png" }));
      this.resultBefore = prev ?? bitmap;
      this.resultAfter = bitmap;
      this.compareMode = prev !== null;
      const report = await this.api.getReport(this.pid);
      const filled = report["filled_count"] ?? "?";
      this.status(`inpainted: ${String(filled)} pixels filled`);
    } catch (err) {
      this.status(err instanceof ApiError ? `inpaint failed: ${err.message}` : String(err));
    }
    this.render();
  }

  render(): void {
    clear(this.ctx);
    if (this.compareMode && this.resultBefore && this.resultAfter && this.image) {
      drawWipe(
        this.ctx,
        this.resultBefore,
        this.resultAfter,
        this.image.width,
        this.image.height,
        this.wipe.position,
        this.view,
      );
    } else if (this.resultAfter) {
      drawImage(this.ctx, this.resultAfter, this.view);
    } else if (this.image) {
      drawImage(this.ctx, this.image, this.view);
    }
    if (this.showMask && this.maskTint && !this.compareMode) {
      drawImage(this.ctx, this.maskTint, this.view);
    }
    if (this.showGuide && this.guide) {
      drawGuideGlyphs(this.ctx, this.guide, this.view);
    }
    if (this.session && !this.compareMode) {
      drawSplines(this.ctx, this.session.doc.splines, this.view, this.session.selection);
    }
  }
}

function showBanner(message: string, retry: () => void): void {
  const banner = document.getElementById("banner");
  if (!banner) return;
  banner.textContent = "";
  banner.classList.add("visible");
  const text = document.createElement("span");
  text.textContent = message;
  const btn = document.createElement("button");
  btn.textContent = "Retry";
  btn.addEventListener("click", () => {
    banner.classList.remove("visible");
    retry();
  });
  banner.append(text, btn);
}

async function boot(): Promise<void> {
  const params = new URLSearchParams(window.location.search);
  const pid = params.get("project");
  const base = params.get("base") ?? "";
  const canvas = document.getElementById("editor") as HTMLCanvasElement | null;
  if (!canvas) return;
  if (!pid) {
    showBanner("no ?project=<id> in the URL", () => void boot());
    return;
  }
  const api = new ApiClient(base);
  const editor = new Editor(api, pid, canvas);
  try {
    await editor.load();
  } catch (err) {
    const msg =
      err instanceof ApiError && err.status === 404
        ? `project ${pid} not found (stale id?)`
        : String(err);
    showBanner(msg, () => void boot());
  }
}

if (typeof window !== "undefined") {
  void boot();
}

export { byteDiffCount };
