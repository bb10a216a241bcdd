/** Thin client for the inpainting service JSON API under /api/v1.
 *
 * The editor never computes fills itself; every result comes back from
 * the server as PNG bytes.  Spline documents travel as raw text so the
 * canonical byte form survives the round trip untouched.
 */

export class ApiError extends Error {
  readonly status: number;

  constructor(status: number, detail: string) {
    super(`HTTP ${status}: ${detail}`);
    this.name = "ApiError";
    this.status = status;
  }
}

export interface ProjectInfo {
  id: string;
  width: number;
  height: number;
  channels: number;
  auto_splines: number;
}

export interface GuideVector {
  x: number;
  y: number;
  gx: number;
  gy: number;
}

export interface GuideGrid {
  width: number;
  height: number;
  stride: number;
  vectors: GuideVector[];
}

export interface InpaintOptions {
  tracked?: boolean;
  params?: Record<string, number | string | boolean>;
}

async function failure(res: Response): Promise<ApiError> {
  let detail = res.statusText;
  try {
    const body = (await res.json()) as { detail?: string };
    if (typeof body.detail === "string") detail = body.detail;
  } catch {
    /* non-JSON error body; keep the status text */
  }
  return new ApiError(res.status, detail);
}

export class ApiClient {
  readonly base: string;

  constructor(base: string) {
    this.base = base.replace(/\/+$/, "");
  }

  private url(path: string): string {
    return `${this.base}/api/v1${path}`;
  }

  async createProject(imagePng: Uint8Array, maskPgm: Uint8Array): Promise<ProjectInfo> {
    const form = new FormData();
    form.append("image", new Blob([imagePng as BlobPart], { type: "image/png" }), "image.png");
    form.append("mask", new Blob([maskPgm as BlobPart], { type: "image/x-portable-graymap" }), "mask.pgm");
    const res = await fetch(this.url("/projects"), { method: "POST", body: form });
    if (res.status !== 201) throw await failure(res);
    return (await res.json()) as ProjectInfo;
  }

  async listProjects(): Promise<string[]> {
    const res = await fetch(this.url("/projects"));
    if (!res.ok) throw await failure(res);
    const body = (await res.json()) as { projects: string[] };
    return body.projects;
  }

  /** Canonical spline document, byte-for-byte as the server stores it. */
  async getSplinesText(pid: string): Promise<string> {
    const res = await fetch(this.url(`/projects/${pid}/splines`));
    if (!res.ok) throw await failure(res);
    return res.text();
  }

  async putSplines(pid: string, text: string): Promise<number> {
    const res = await fetch(this.url(`/projects/${pid}/splines`), {
      method: "PUT",
      headers: { "content-type": "application/json" },
      body: text,
    });
    if (!res.ok) throw await failure(res);
    const body = (await res.json()) as { count: number };
    return body.count;
  }

  /** Run a fill and wait for it; large images answer 202 and are polled. */
  async inpaint(pid: string, opts: InpaintOptions = {}, pollMs = 250): Promise<void> {
    const res = await fetch(this.url(`/projects/${pid}/inpaint`), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(opts),
    });
    if (res.status === 200) {
      await res.json();
      return;
    }
    if (res.status !== 202) throw await failure(res);
    await res.json();
    for (;;) {
      await new Promise((r) => setTimeout(r, pollMs));
      const probe = await fetch(this.url(`/projects/${pid}/result`));
      if (probe.status === 202) {
        await probe.json();
        continue;
      }
      if (!probe.ok) throw await failure(probe);
      await probe.arrayBuffer();
      return;
    }
  }

  async getResultBytes(pid: string): Promise<Uint8Array> {
    const res = await fetch(this.url(`/projects/${pid}/result`));
    if (res.status === 202) throw new ApiError(202, "result still running");
    if (!res.ok) throw await failure(res);
    return new Uint8Array(await res.arrayBuffer());
  }

  async getImageBytes(pid: string): Promise<Uint8Array> {
    const res = await fetch(this.url(`/projects/${pid}/image`));
    if (!res.ok) throw await failure(res);
    return new Uint8Array(await res.arrayBuffer());
  }

  async getMaskBytes(pid: string): Promise<Uint8Array> {
    const res = await fetch(this.url(`/projects/${pid}/mask`));
    if (!res.ok) throw await failure(res);
    return new Uint8Array(await res.arrayBuffer());
  }

  async getReport(pid: string): Promise<Record<string, unknown>> {
    const res = await fetch(this.url(`/projects/${pid}/report`));
    if (!res.ok) throw await failure(res);
    return (await res.json()) as Record<string, unknown>;
  }

  async getGuideField(pid: string, stride = 8): Promise<GuideGrid> {
    const res = await fetch(this.url(`/projects/${pid}/guide-field?stride=${stride}`));
    if (!res.ok) throw await failure(res);
    const body = (await res.json()) as {
      width: number;
      height: number;
      stride: number;
      vectors: [number, number, number, number][];
    };
    return {
      width: body.width,
      height: body.height,
      stride: body.stride,
      vectors: body.vectors.map(([x, y, gx, gy]) => ({ x, y, gx, gy })),
    };
  }
}
