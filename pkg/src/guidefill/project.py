"""Disk-backed projects: one directory per project under a data root.

A project stores its inputs (PNG image, PGM label mask, spline sets) as
the bytes the caller supplied; results are a cache, reproducible from
the inputs and parameters at any time, and are invalidated whenever the
splines change.
"""

import io
import json
import os
import time
import uuid
from pathlib import Path

import numpy as np

from . import engine, fileio, guide, splines as spline_io, tracker
from .grid import INPAINT

DATA_DIR_ENV = "GUIDEFILL_DATA_DIR"
SYNC_PIXEL_LIMIT = 2_000_000

_IMAGE = "image.png"
_MASK = "mask.pgm"
_AUTO = "splines_auto.json"
_USER = "splines_user.json"
_MANIFEST = "manifest.json"
_RESULT = "result.png"
_REPORT = "report.json"
_PENDING = "result.pending"


class UnknownProjectError(KeyError):
    """Raised when a project id has no directory under the data root."""


class DimensionMismatchError(ValueError):
    """Raised when the label mask does not match the image size."""


def data_root(override=None) -> Path:
    """Project storage root: explicit override, else $GUIDEFILL_DATA_DIR."""
    if override is not None:
        return Path(override)
    return Path(os.environ.get(DATA_DIR_ENV, "guidefill_data"))


def params_from_dict(d: dict) -> engine.FillParams:
    """Build FillParams from a JSON dict; inverse of FillParams.to_dict.

    An optional "preset" key selects a configuration constructor; "inf"
    is accepted for mu; unknown keys are rejected.
    """
    d = dict(d or {})
    preset = d.pop("preset", "guidefill")
    ctor = {
        "guidefill": engine.FillParams.guidefill,
        "coherence_transport": engine.FillParams.coherence_transport,
        "telea": engine.FillParams.telea,
    }.get(preset)
    if ctor is None:
        raise ValueError(f"unknown preset {preset!r}")
    if "mu" in d:
        d["mu"] = float(d["mu"])
    if d.get("g_fixed") is not None:
        g = d["g_fixed"]
        if len(g) != 2:
            raise ValueError("g_fixed must be a 2-vector")
        d["g_fixed"] = (float(g[0]), float(g[1]))
    allowed = set(engine.FillParams.__dataclass_fields__)
    unknown = set(d) - allowed
    if unknown:
        raise ValueError(f"unknown parameter(s): {sorted(unknown)}")
    return ctor(**d)


def _decode_image(png_bytes: bytes) -> np.ndarray:
    try:
        return fileio.load_image(io.BytesIO(png_bytes))
    except Exception as exc:
        raise ValueError(f"not a decodable PNG image: {exc}") from exc


def _decode_labels(pgm_bytes: bytes) -> np.ndarray:
    try:
        return fileio.parse_labels(pgm_bytes)
    except Exception as exc:
        raise ValueError(f"not a decodable PGM mask: {exc}") from exc


class Project:
    """Filesystem view of one project directory."""

    def __init__(self, root: Path, pid: str):
        self.dir = Path(root) / pid
        self.id = pid

    # ------------------------------------------------------------- loading

    def _path(self, name: str) -> Path:
        return self.dir / name

    def manifest(self) -> dict:
        with open(self._path(_MANIFEST), "r", encoding="utf-8") as fh:
            return json.load(fh)

    def _write_manifest(self, m: dict):
        tmp = self._path(_MANIFEST + ".tmp")
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump(m, fh, indent=1)
            fh.write("\n")
        tmp.replace(self._path(_MANIFEST))

    def audit(self, event: str, **info):
        m = self.manifest()
        entry = {"event": event, "time": time.time()}
        entry.update(info)
        m.setdefault("audit", []).append(entry)
        self._write_manifest(m)

    def image(self) -> np.ndarray:
        return fileio.load_image(self._path(_IMAGE))

    def labels(self) -> np.ndarray:
        return fileio.load_labels(self._path(_MASK))

    def image_bytes(self) -> bytes:
        return self._path(_IMAGE).read_bytes()

    # ------------------------------------------------------------- splines

    def splines_bytes(self) -> bytes:
        """Current spline document: the user set if present, else auto."""
        user = self._path(_USER)
        if user.exists():
            return user.read_bytes()
        return self._path(_AUTO).read_bytes()

    def splines(self) -> list:
        return spline_io.loads(self.splines_bytes().decode("utf-8"))

    def put_splines(self, raw: bytes) -> int:
        """Replace the user spline set; returns the spline count.

        The bytes are stored verbatim so a GET returns them unchanged;
        ValueError propagates for malformed documents and nothing is
        written in that case.  Cached results are invalidated.
        """
        parsed = spline_io.loads(raw.decode("utf-8"))
        self._path(_USER).write_bytes(raw)
        self.invalidate_result()
        self.audit("splines_put", count=len(parsed))
        return len(parsed)

    # ------------------------------------------------------------- results

    def invalidate_result(self):
        for name in (_RESULT, _REPORT, _PENDING):
            p = self._path(name)
            if p.exists():
                p.unlink()

    def status(self) -> str:
        if self._path(_PENDING).exists():
            return "running"
        if self._path(_RESULT).exists():
            return "done"
        return "empty"

    def mark_pending(self):
        self._path(_PENDING).write_text("running")

    def result_bytes(self) -> bytes:
        return self._path(_RESULT).read_bytes()

    def report(self) -> dict:
        with open(self._path(_REPORT), "r", encoding="utf-8") as fh:
            return json.load(fh)

    def pixel_count(self) -> int:
        m = self.manifest()
        return int(m["width"]) * int(m["height"])

    def inpaint(self, params: engine.FillParams | None = None,
                tracked: bool = True) -> dict:
        """Fill the project and cache the result; returns the report dict."""
        image = self.image()
        labels = self.labels()
        p = params or engine.FillParams()
        field = None
        if p.g_source == "guide_field":
            field = guide.build_guide_field(self.splines(), labels)
        try:
            if tracked:
                u, metrics = tracker.run_tracked(image, labels, field, p)
                report = metrics.report
                extra = {
                    "tracked": True,
                    "threads_max": metrics.threads_max,
                    "work_total": metrics.work_total,
                }
            else:
                u, report = engine.inpaint(image, labels, field, p)
                extra = {"tracked": False}
        except Exception:
            self._path(_PENDING).unlink(missing_ok=True)
            raise
        doc = report.to_dict()
        doc.update(extra)
        doc["params"] = p.to_dict()
        fileio.save_image(self._path(_RESULT), u)
        with open(self._path(_REPORT), "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=1)
            fh.write("\n")
        self._path(_PENDING).unlink(missing_ok=True)
        self.audit("inpaint", unfillable=bool(report.unfillable))
        return doc

    def guide_field_grid(self, stride: int = 8) -> dict:
        """Downsampled guide field over the unknown region, JSON-ready."""
        if stride < 1:
            raise ValueError("stride must be >= 1")
        labels = self.labels()
        field = guide.build_guide_field(self.splines(), labels)
        H, W = labels.shape
        vectors = []
        for j in range(0, H, stride):
            for i in range(0, W, stride):
                if labels[j, i] == INPAINT:
                    gx, gy = field[j, i]
                    vectors.append([i, j, float(gx), float(gy)])
        return {"width": W, "height": H, "stride": int(stride),
                "vectors": vectors}


def create_project(image_png: bytes, mask_pgm: bytes, root=None,
                   detect: bool = True) -> Project:
    """Validate inputs, allocate a project directory, run auto-detection.

    Raises ValueError for undecodable inputs and DimensionMismatchError
    when the mask size differs from the image; nothing is written in
    either case.
    """
    image = _decode_image(image_png)
    labels = _decode_labels(mask_pgm)
    if labels.shape != image.shape[:2]:
        raise DimensionMismatchError(
            f"mask is {labels.shape[1]}x{labels.shape[0]}, "
            f"image is {image.shape[1]}x{image.shape[0]}"
        )
    rootp = data_root(root)
    pid = uuid.uuid4().hex[:12]
    pdir = rootp / pid
    pdir.mkdir(parents=True, exist_ok=False)
    (pdir / _IMAGE).write_bytes(image_png)
    (pdir / _MASK).write_bytes(mask_pgm)

    detected = guide.detect_splines(image, labels) if detect else []
    (pdir / _AUTO).write_text(spline_io.dumps(detected), encoding="utf-8")

    proj = Project(rootp, pid)
    proj._write_manifest({
        "id": pid,
        "width": int(image.shape[1]),
        "height": int(image.shape[0]),
        "channels": int(image.shape[2]),
        "created": time.time(),
        "auto_splines": len(detected),
        "audit": [{"event": "created", "time": time.time()}],
    })
    return proj


def open_project(pid: str, root=None) -> Project:
    rootp = data_root(root)
    proj = Project(rootp, pid)
    if not (proj.dir / _MANIFEST).exists():
        raise UnknownProjectError(pid)
    return proj


def list_projects(root=None) -> list:
    rootp = data_root(root)
    if not rootp.exists():
        return []
    out = []
    for child in sorted(rootp.iterdir()):
        if (child / _MANIFEST).exists():
            out.append(child.name)
    return out
