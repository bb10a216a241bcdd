"""Local HTTP service exposing projects, splines, and inpainting.

All endpoints live under /api/v1.  Per-project operations serialize on a
project-level lock; inpainting runs synchronously for images up to the
2 MP limit and in a background thread above it (202 + poll URL).
"""

import threading
from collections import defaultdict

from fastapi import FastAPI, Request, Response, UploadFile
from fastapi.responses import JSONResponse

from . import project as project_store
from .project import (
    DimensionMismatchError,
    SYNC_PIXEL_LIMIT,
    UnknownProjectError,
    params_from_dict,
)

API = "/api/v1"


def create_app(root=None) -> FastAPI:
    """Build the service; root overrides the GUIDEFILL_DATA_DIR root."""
    app = FastAPI(title="guidefill", docs_url=None, redoc_url=None)
    locks: dict = defaultdict(threading.Lock)

    def _open(pid: str):
        return project_store.open_project(pid, root)

    @app.exception_handler(UnknownProjectError)
    async def _unknown(request, exc):
        return JSONResponse({"detail": "unknown project"}, status_code=404)

    @app.post(API + "/projects", status_code=201)
    async def create(image: UploadFile, mask: UploadFile):
        image_bytes = await image.read()
        mask_bytes = await mask.read()
        try:
            proj = project_store.create_project(image_bytes, mask_bytes, root)
        except DimensionMismatchError as exc:
            return JSONResponse({"detail": str(exc)}, status_code=409)
        except ValueError as exc:
            return JSONResponse({"detail": str(exc)}, status_code=400)
        m = proj.manifest()
        return {
            "id": proj.id,
            "width": m["width"],
            "height": m["height"],
            "channels": m["channels"],
            "auto_splines": m["auto_splines"],
        }

    @app.get(API + "/projects")
    async def index():
        return {"projects": project_store.list_projects(root)}

    @app.get(API + "/projects/{pid}/splines")
    async def get_splines(pid: str):
        proj = _open(pid)
        return Response(content=proj.splines_bytes(),
                        media_type="application/json")

    @app.put(API + "/projects/{pid}/splines")
    async def put_splines(pid: str, request: Request):
        proj = _open(pid)
        raw = await request.body()
        with locks[pid]:
            try:
                count = proj.put_splines(raw)
            except (ValueError, UnicodeDecodeError) as exc:
                return JSONResponse({"detail": f"malformed spline document: {exc}"},
                                    status_code=400)
        return {"ok": True, "count": count}

    @app.post(API + "/projects/{pid}/inpaint")
    async def inpaint(pid: str, request: Request):
        proj = _open(pid)
        body = await request.body()
        opts = {}
        if body:
            import json

            try:
                opts = json.loads(body)
            except ValueError as exc:
                return JSONResponse({"detail": f"malformed request body: {exc}"},
                                    status_code=400)
        try:
            params = params_from_dict(opts.get("params") or {})
        except ValueError as exc:
            return JSONResponse({"detail": str(exc)}, status_code=400)
        tracked = bool(opts.get("tracked", True))
        result_url = f"{API}/projects/{pid}/result"

        def run():
            with locks[pid]:
                proj.inpaint(params, tracked=tracked)

        if proj.pixel_count() <= SYNC_PIXEL_LIMIT:
            run()
            return {"status": "done", "result": result_url}
        proj.mark_pending()
        worker = threading.Thread(target=run, daemon=True)
        worker.start()
        return JSONResponse({"status": "running", "poll": result_url},
                            status_code=202)

    @app.get(API + "/projects/{pid}/result")
    async def result(pid: str):
        proj = _open(pid)
        status = proj.status()
        if status == "running":
            return JSONResponse({"status": "running"}, status_code=202)
        if status == "empty":
            return JSONResponse({"detail": "no result"}, status_code=404)
        return Response(content=proj.result_bytes(), media_type="image/png")

    @app.get(API + "/projects/{pid}/report")
    async def report(pid: str):
        proj = _open(pid)
        if proj.status() != "done":
            return JSONResponse({"detail": "no result"}, status_code=404)
        return proj.report()

    @app.get(API + "/projects/{pid}/guide-field")
    async def guide_field(pid: str, stride: int = 8):
        proj = _open(pid)
        if stride < 1:
            return JSONResponse({"detail": "stride must be >= 1"},
                                status_code=400)
        return proj.guide_field_grid(stride)

    @app.get(API + "/projects/{pid}/image")
    async def image(pid: str):
        proj = _open(pid)
        return Response(content=proj.image_bytes(), media_type="image/png")

    @app.get(API + "/projects/{pid}/mask")
    async def mask(pid: str):
        proj = _open(pid)
        return Response(content=(proj.dir / "mask.pgm").read_bytes(),
                        media_type="image/x-portable-graymap")

    return app
