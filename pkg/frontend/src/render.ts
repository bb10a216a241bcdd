/** Canvas drawing for the editor: image, mask tint, splines, guide glyphs. */

import type { GuideGrid } from "./api.js";
import { splinePolyline } from "./geometry.js";
import type { Spline } from "./model.js";
import type { Selection } from "./session.js";
import type { ViewTransform } from "./view.js";

export const ARROW_SCALE = 30;
const HANDLE_RADIUS = 4;

export function clear(ctx: CanvasRenderingContext2D): void {
  ctx.save();
  ctx.setTransform(1, 0, 0, 1, 0, 0);
  ctx.fillStyle = "#202225";
  ctx.fillRect(0, 0, ctx.canvas.width, ctx.canvas.height);
  ctx.restore();
}

export function drawImage(
  ctx: CanvasRenderingContext2D,
  image: CanvasImageSource,
  view: ViewTransform,
): void {
  ctx.save();
  ctx.imageSmoothingEnabled = view.scale < 1;
  ctx.setTransform(view.scale, 0, 0, view.scale, view.offsetX, view.offsetY);
  ctx.drawImage(image, 0, 0);
  ctx.restore();
}

/** Split view: `after` is revealed left of the wipe divider. */
export function drawWipe(
  ctx: CanvasRenderingContext2D,
  before: CanvasImageSource,
  after: CanvasImageSource,
  imageWidth: number,
  imageHeight: number,
  position: number,
  view: ViewTransform,
): void {
  const split = imageWidth * position;
  ctx.save();
  ctx.setTransform(view.scale, 0, 0, view.scale, view.offsetX, view.offsetY);
  ctx.drawImage(before, 0, 0);
  ctx.beginPath();
  ctx.rect(0, 0, split, imageHeight);
  ctx.clip();
  ctx.drawImage(after, 0, 0);
  ctx.restore();
  const [cx] = view.worldToCanvas([split, 0]);
  ctx.save();
  ctx.strokeStyle = "#ffffff";
  ctx.lineWidth = 1.5;
  ctx.beginPath();
  ctx.moveTo(cx, 0);
  ctx.lineTo(cx, ctx.canvas.height);
  ctx.stroke();
  ctx.restore();
}

function strokePath(ctx: CanvasRenderingContext2D, pts: [number, number][], view: ViewTransform): void {
  ctx.beginPath();
  pts.forEach((p, k) => {
    const [x, y] = view.worldToCanvas(p);
    if (k === 0) ctx.moveTo(x, y);
    else ctx.lineTo(x, y);
  });
  ctx.stroke();
}

export function drawSpline(
  ctx: CanvasRenderingContext2D,
  sp: Spline,
  view: ViewTransform,
  selected: boolean,
): void {
  ctx.save();
  ctx.strokeStyle = sp.source === "user" ? "#27d27f" : "#ffd24a";
  ctx.lineWidth = selected ? 2.5 : 1.5;
  strokePath(ctx, splinePolyline(sp), view);

  if (sp.kind === "bezier") {
    ctx.strokeStyle = "rgba(255,255,255,0.35)";
    ctx.lineWidth = 1;
    for (let k = 0; k + 3 < sp.points.length; k += 3) {
      strokePath(ctx, [sp.points[k]!, sp.points[k + 1]!], view);
      strokePath(ctx, [sp.points[k + 2]!, sp.points[k + 3]!], view);
    }
  }

  sp.points.forEach((p, pi) => {
    const [x, y] = view.worldToCanvas(p);
    const onCurve = sp.kind === "polyline" || pi % 3 === 0;
    ctx.fillStyle = onCurve ? "#ffffff" : "#9ad0ff";
    ctx.beginPath();
    if (onCurve) {
      ctx.rect(x - HANDLE_RADIUS, y - HANDLE_RADIUS, 2 * HANDLE_RADIUS, 2 * HANDLE_RADIUS);
    } else {
      ctx.arc(x, y, HANDLE_RADIUS - 1, 0, 2 * Math.PI);
    }
    ctx.fill();
  });

  drawArrow(ctx, sp, view);
  ctx.restore();
}

/** Direction arrow at the spline head, length proportional to the norm. */
function drawArrow(ctx: CanvasRenderingContext2D, sp: Spline, view: ViewTransform): void {
  const [gx, gy] = sp.direction;
  const norm = Math.hypot(gx, gy);
  if (norm === 0) return;
  const [x0, y0] = view.worldToCanvas(sp.points[0]!);
  const x1 = x0 + gx * ARROW_SCALE;
  const y1 = y0 + gy * ARROW_SCALE;
  ctx.strokeStyle = "#ff6ad5";
  ctx.fillStyle = "#ff6ad5";
  ctx.lineWidth = 1.5;
  ctx.beginPath();
  ctx.moveTo(x0, y0);
  ctx.lineTo(x1, y1);
  ctx.stroke();
  const ang = Math.atan2(y1 - y0, x1 - x0);
  ctx.beginPath();
  ctx.moveTo(x1, y1);
  ctx.lineTo(x1 - 7 * Math.cos(ang - 0.4), y1 - 7 * Math.sin(ang - 0.4));
  ctx.lineTo(x1 - 7 * Math.cos(ang + 0.4), y1 - 7 * Math.sin(ang + 0.4));
  ctx.closePath();
  ctx.fill();
}

export function drawSplines(
  ctx: CanvasRenderingContext2D,
  splines: Spline[],
  view: ViewTransform,
  selection: Selection | null,
): void {
  splines.forEach((sp, si) => drawSpline(ctx, sp, view, selection?.spline === si));
}

export function drawGuideGlyphs(ctx: CanvasRenderingContext2D, grid: GuideGrid, view: ViewTransform): void {
  ctx.save();
  ctx.strokeStyle = "rgba(160,160,255,0.8)";
  ctx.lineWidth = 1;
  for (const v of grid.vectors) {
    const norm = Math.hypot(v.gx, v.gy);
    if (norm < 1e-6) continue;
    const [x, y] = view.worldToCanvas([v.x, v.y]);
    const len = Math.min(norm, 1) * grid.stride * view.scale * 0.8;
    ctx.beginPath();
    ctx.moveTo(x, y);
    ctx.lineTo(x + (v.gx / norm) * len, y + (v.gy / norm) * len);
    ctx.stroke();
  }
  ctx.restore();
}
