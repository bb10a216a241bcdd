"""Spline records and their JSON wire format.

A spline is an open curve with an id, a provenance tag, a transport
direction g (|g| <= 1) and control points in pixel coordinates (origin at
the top-left pixel center, y growing downward).  Polyline splines use the
points directly; bezier splines hold composite cubic control points
(3k + 1 of them) and are flattened to a polyline before any distance
query.  Serialization is canonical so that documents survive
load -> save cycles byte-identically.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

FORMAT_VERSION = 1
SOURCES = ("auto", "user")
KINDS = ("polyline", "bezier")
FLATTEN_TOLERANCE = 0.25


class SplineFormatError(ValueError):
    """Raised when a spline document violates the wire format."""


@dataclass
class Spline:
    id: str
    source: str
    direction: tuple[float, float]
    points: np.ndarray
    kind: str = "polyline"

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=np.float64)
        _validate_spline(self)

    def polyline(self, tol: float = FLATTEN_TOLERANCE) -> np.ndarray:
        """Control points as a polyline; bezier splines are flattened."""
        if self.kind == "polyline":
            return self.points
        segments = [self.points[0:1]]
        for k in range(0, len(self.points) - 1, 3):
            ctrl = self.points[k:k + 4]
            segments.append(_flatten_cubic(ctrl, tol)[1:])
        return np.concatenate(segments, axis=0)


def _flatten_cubic(ctrl: np.ndarray, tol: float) -> np.ndarray:
    """Adaptive de Casteljau subdivision of one cubic segment."""
    a, b, c, d = ctrl
    chord = d - a
    L = math.hypot(chord[0], chord[1])
    if L < 1e-12:
        dev = max(np.hypot(*(b - a)), np.hypot(*(c - a)))
    else:
        n = np.array([-chord[1], chord[0]]) / L
        dev = max(abs(float((b - a) @ n)), abs(float((c - a) @ n)))
    if dev <= tol:
        return np.stack([a, d])
    ab = (a + b) / 2
    bc = (b + c) / 2
    cd = (c + d) / 2
    abc = (ab + bc) / 2
    bcd = (bc + cd) / 2
    mid = (abc + bcd) / 2
    left = _flatten_cubic(np.stack([a, ab, abc, mid]), tol)
    right = _flatten_cubic(np.stack([mid, bcd, cd, d]), tol)
    return np.concatenate([left, right[1:]], axis=0)


def _validate_spline(sp: Spline) -> None:
    if not isinstance(sp.id, str) or not sp.id:
        raise SplineFormatError("spline id must be a non-empty string")
    if sp.source not in SOURCES:
        raise SplineFormatError(f"spline source must be one of {SOURCES}")
    if sp.kind not in KINDS:
        raise SplineFormatError(f"spline kind must be one of {KINDS}")
    d = sp.direction
    if len(d) != 2 or not all(math.isfinite(float(v)) for v in d):
        raise SplineFormatError("spline direction must be a finite 2-vector")
    if math.hypot(float(d[0]), float(d[1])) > 1.0 + 1e-9:
        raise SplineFormatError("spline direction magnitude must not exceed 1")
    pts = sp.points
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 2:
        raise SplineFormatError("spline needs at least two 2-D points")
    if not np.isfinite(pts).all():
        raise SplineFormatError("spline points must be finite")
    if sp.kind == "bezier":
        if (len(pts) - 1) % 3 != 0:
            raise SplineFormatError("bezier splines need 3k+1 control points")
    else:
        if (np.abs(np.diff(pts, axis=0)).sum(axis=1) == 0.0).any():
            raise SplineFormatError("consecutive polyline points must be distinct")


def to_document(splines) -> dict:
    return {
        "version": FORMAT_VERSION,
        "splines": [
            {
                "id": sp.id,
                "source": sp.source,
                "kind": sp.kind,
                "direction": [float(sp.direction[0]), float(sp.direction[1])],
                "points": [[float(x), float(y)] for x, y in sp.points],
            }
            for sp in splines
        ],
    }


def from_document(doc) -> list[Spline]:
    if not isinstance(doc, dict):
        raise SplineFormatError("spline document must be a JSON object")
    if doc.get("version") != FORMAT_VERSION:
        raise SplineFormatError(f"unsupported spline document version {doc.get('version')!r}")
    raw = doc.get("splines")
    if not isinstance(raw, list):
        raise SplineFormatError("spline document needs a 'splines' array")
    out = []
    seen = set()
    for entry in raw:
        if not isinstance(entry, dict):
            raise SplineFormatError("each spline must be a JSON object")
        unknown = set(entry) - {"id", "source", "kind", "direction", "points"}
        if unknown:
            raise SplineFormatError(f"unknown spline fields: {sorted(unknown)}")
        try:
            sp = Spline(
                id=entry.get("id"),
                source=entry.get("source"),
                direction=tuple(entry.get("direction", ())),
                points=np.asarray(entry.get("points", []), dtype=np.float64).reshape(-1, 2)
                if entry.get("points") else np.empty((0, 2)),
                kind=entry.get("kind", "polyline"),
            )
        except (TypeError, ValueError) as exc:
            if isinstance(exc, SplineFormatError):
                raise
            raise SplineFormatError(f"malformed spline entry: {exc}") from exc
        if sp.id in seen:
            raise SplineFormatError(f"duplicate spline id {sp.id!r}")
        seen.add(sp.id)
        out.append(sp)
    return out


def dumps(splines) -> str:
    """Canonical serialization: fixed key order, shortest-round-trip floats."""
    return json.dumps(to_document(splines), separators=(", ", ": "), indent=1) + "\n"


def loads(text: str) -> list[Spline]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SplineFormatError(f"invalid JSON: {exc}") from exc
    return from_document(doc)
