"""Synthetic scenes and desk-scale experiments.

Scenes are specified in continuum coordinates (a rectangle Omega with an
inpainting rectangle D strictly inside it) and rasterized by hard
thresholding at pixel centers, so the same problem can be rendered at a
family of resolutions and errors compared in continuum units.
"""

import math
import time
from dataclasses import dataclass, field, replace

import numpy as np

from . import engine, tracker
from .grid import INPAINT, READABLE


class SpecError(ValueError):
    """Raised when a synthetic problem description is inconsistent."""


class DegenerateFitError(ValueError):
    """Raised when a power-law fit has no spread in N."""


@dataclass(frozen=True)
class SyntheticProblem:
    """Two-tone geometry on a rectangle with a rectangular unknown region.

    omega and domain are (x0, x1, y0, y1) rectangles; domain must sit
    strictly inside omega.  geometry "line" paints a band of the given
    perpendicular half-width through the center of omega at theta_deg
    degrees; "step" splits omega along that line instead.  colors gives
    (ink, background) for lines and the two sides for steps; entries may
    be scalars or equal-length channel tuples.
    """

    omega: tuple = (-1.0, 1.0, -0.5, 0.5)
    domain: tuple = (-0.8, 0.8, -0.3, 0.3)
    geometry: str = "line"
    theta_deg: float = 73.0
    half_width: float = 0.05
    colors: tuple = (0.0, 1.0)
    resolution: tuple = (200, 100)

    def with_resolution(self, resolution) -> "SyntheticProblem":
        return replace(self, resolution=(int(resolution[0]), int(resolution[1])))


@dataclass(frozen=True)
class PowerLawFit:
    """value ~ amplitude * N**alpha with RMS residual in log-log space."""

    amplitude: float
    alpha: float
    residual: float


def _validate(spec: SyntheticProblem):
    x0, x1, y0, y1 = spec.omega
    dx0, dx1, dy0, dy1 = spec.domain
    if not (x0 < x1 and y0 < y1):
        raise SpecError("omega rectangle is empty")
    if not (x0 < dx0 < dx1 < x1 and y0 < dy0 < dy1 < y1):
        raise SpecError("domain must lie strictly inside omega")
    if spec.geometry not in ("line", "step"):
        raise SpecError(f"unknown geometry {spec.geometry!r}")
    if spec.geometry == "line" and not (spec.half_width > 0.0):
        raise SpecError("line half_width must be positive")
    W, H = spec.resolution
    if W < 2 or H < 2:
        raise SpecError("resolution must be at least 2x2")
    if len(spec.colors) != 2:
        raise SpecError("colors must give exactly two tones")


def _color_pair(colors) -> np.ndarray:
    a = np.atleast_1d(np.asarray(colors[0], dtype=np.float64))
    b = np.atleast_1d(np.asarray(colors[1], dtype=np.float64))
    if a.shape != b.shape or a.ndim != 1:
        raise SpecError("the two colors must have the same channel count")
    return np.stack([a, b])


def pixel_centers(spec: SyntheticProblem):
    """Continuum coordinates of pixel centers: x (W,) and y (H,).

    Row 0 is the top of the image, so y decreases with the row index.
    """
    x0, x1, y0, y1 = spec.omega
    W, H = spec.resolution
    hx = (x1 - x0) / W
    hy = (y1 - y0) / H
    x = x0 + (np.arange(W) + 0.5) * hx
    y = y1 - (np.arange(H) + 0.5) * hy
    return x, y


def render_problem(spec: SyntheticProblem):
    """Rasterize a problem: returns (image, labels, ground_truth).

    The geometry is hard-thresholded at pixel centers (no anti-aliasing);
    ground truth renders it over all of omega, while image has the
    unknown rectangle blanked to zero and labels mark it INPAINT.
    """
    _validate(spec)
    x, y = pixel_centers(spec)
    X, Y = np.meshgrid(x, y)
    x0, x1, y0, y1 = spec.omega
    cx, cy = (x0 + x1) / 2.0, (y0 + y1) / 2.0
    th = math.radians(spec.theta_deg)
    # signed perpendicular distance to the center line
    d = -(X - cx) * math.sin(th) + (Y - cy) * math.cos(th)
    tones = _color_pair(spec.colors)
    if spec.geometry == "line":
        pick = (np.abs(d) <= spec.half_width).astype(np.intp)
        truth = tones[1 - pick]  # ink inside the band, background outside
    else:
        truth = tones[(d > 0.0).astype(np.intp)]

    dx0, dx1, dy0, dy1 = spec.domain
    inside = (X >= dx0) & (X <= dx1) & (Y >= dy0) & (Y <= dy1)
    labels = np.where(inside, INPAINT, READABLE).astype(np.uint8)
    image = truth.copy()
    image[inside] = 0.0
    return image, labels, truth


def shell_count(spec: SyntheticProblem) -> int:
    """Onion-shell iterations needed for the rendered rectangle."""
    _, labels, _ = render_problem(spec)
    rows = np.flatnonzero((labels == INPAINT).any(axis=1))
    cols = np.flatnonzero((labels == INPAINT).any(axis=0))
    h = int(rows.size)
    w = int(cols.size)
    return (min(h, w) + 1) // 2


def row_profile(u: np.ndarray, spec: SyntheticProblem, y_value: float):
    """Cross-section of channel 0 along the row nearest the given y."""
    x, y = pixel_centers(spec)
    j = int(np.argmin(np.abs(y - y_value)))
    return x, np.asarray(u[j, :, 0], dtype=np.float64)


def rise_width(x, profile, ink: float, bg: float,
               lo_frac: float = 0.1, hi_frac: float = 0.9) -> float:
    """Mean 10-90 transition width of a dark band's two edges.

    Levels are absolute fractions of the rendered ink-to-background range;
    returns inf when the band no longer dips below the low level (fully
    degraded) or a crossing runs off the profile.
    """
    p = np.asarray(profile, dtype=np.float64)
    lo = ink + lo_frac * (bg - ink)
    hi = ink + hi_frac * (bg - ink)
    k0 = int(np.argmin(p))
    if p[k0] >= lo:
        return math.inf

    def edge(step: int) -> float:
        def crossing(level: float, start: int):
            i = start
            while p[i] < level:
                i += step
                if not (0 <= i < p.size):
                    return None, None
            a, b = i - step, i  # p[a] < level <= p[b]
            t = (level - p[a]) / (p[b] - p[a])
            return x[a] + t * (x[b] - x[a]), i

        x_lo, i_lo = crossing(lo, k0)
        if x_lo is None:
            return math.inf
        x_hi, _ = crossing(hi, i_lo)
        if x_hi is None:
            return math.inf
        return abs(x_hi - x_lo)

    return 0.5 * (edge(-1) + edge(+1))


def measure_line_angle(u: np.ndarray, labels: np.ndarray,
                       spec: SyntheticProblem, margin_rows: int = 2,
                       depth_frac: float = 0.4) -> float:
    """Angle of the filled dark band, in degrees mod 180.

    Fits the per-row darkness centroid over the top depth_frac of the
    unknown rows (before fronts advancing from other sides can reach
    them, skipping a small margin below the data) and converts the
    slope to a continuum angle.
    """
    x, y = pixel_centers(spec)
    bg = float(np.max(_color_pair(spec.colors)))
    rows = np.flatnonzero((labels == INPAINT).any(axis=1))
    stop = max(margin_rows + 2, int(math.ceil(depth_frac * rows.size)))
    rows = rows[margin_rows:stop]
    xs, ys = [], []
    for j in rows:
        w = np.clip(bg - np.asarray(u[j, :, 0], dtype=np.float64), 0.0, None)
        total = float(w.sum())
        if total <= 1e-12:
            continue
        xs.append(float((w * x).sum()) / total)
        ys.append(float(y[j]))
    if len(xs) < 2:
        raise ValueError("no dark band found in the unknown rows")
    slope = float(np.polyfit(ys, xs, 1)[0])  # dx/dy
    return math.degrees(math.atan2(1.0, slope)) % 180.0


# ------------------------------------------------------------------ studies


def _line_guide(spec: SyntheticProblem):
    """Unit guide along the scene's line in image coordinates (row-down)."""
    th = math.radians(spec.theta_deg)
    return (math.cos(th), -math.sin(th))


def degradation_study(spec: SyntheticProblem, resolutions,
                      cross_sections=(0.3, 0.25, 0.0),
                      params: engine.FillParams | None = None) -> list:
    """Transition widths of the extended band across depths and scales.

    Fills each rendering with a fixed guide along the true line and
    measures the 10-90 width of every requested horizontal cross-section
    in continuum units.  Returns one dict per (resolution, y).
    """
    rows = []
    for res in resolutions:
        scene = spec.with_resolution(res)
        image, labels, _ = render_problem(scene)
        p = params or engine.FillParams(
            r=3, mu=50.0, order="smart", neighborhood="rotated_ball",
            g_source="fixed", g_fixed=_line_guide(scene),
        )
        filled, report = engine.inpaint(image, labels, None, p)
        ink, bg = (float(np.min(_color_pair(scene.colors))),
                   float(np.max(_color_pair(scene.colors))))
        for yv in cross_sections:
            xs, prof = row_profile(filled, scene, float(yv))
            rows.append({
                "resolution": tuple(scene.resolution),
                "y": float(yv),
                "width": rise_width(xs, prof, ink, bg),
                "iterations": report.iterations,
            })
    return rows


def degradation_csv(rows) -> str:
    lines = ["W,H,y,width"]
    for r in rows:
        W, H = r["resolution"]
        lines.append(f"{W},{H},{r['y']:.10g},{r['width']:.10g}")
    return "\n".join(lines) + "\n"


def stripe_family(heights=(50, 70, 100, 140, 200, 280, 400, 500)) -> list:
    """Horizontal-stripe problems on [0,4]x[0,1] spanning two decades in N."""
    out = []
    for h in heights:
        out.append(SyntheticProblem(
            omega=(0.0, 4.0, 0.0, 1.0),
            domain=(0.4, 3.96, 0.2, 0.8),
            geometry="line",
            theta_deg=0.0,
            half_width=0.05,
            colors=(0.0, 1.0),
            resolution=(4 * int(h), int(h)),
        ))
    return out


def scaling_study(problems, params: engine.FillParams | None = None,
                  tracked: bool = True) -> list:
    """Fill each problem and record size, wall time, and lane demand.

    Smart order stays off and the guide is identically zero, so the run
    isolates the fill loop itself; threads_max is the widest requested
    lane count (frontier size when tracked, whole image otherwise).
    """
    rows = []
    for spec in problems:
        image, labels, _ = render_problem(spec)
        p = params or engine.FillParams(
            r=3, mu=50.0, order="onion", neighborhood="rotated_ball",
            g_source="fixed", g_fixed=(0.0, 0.0),
        )
        W, H = spec.resolution
        t0 = time.perf_counter()
        if tracked:
            _, metrics = tracker.run_tracked(image, labels, None, p)
            seconds = time.perf_counter() - t0
            rows.append({
                "N": W * H,
                "seconds": seconds,
                "threads_max": metrics.threads_max,
                "iterations": metrics.iterations,
                "work_total": metrics.work_total,
            })
        else:
            _, report = engine.inpaint(image, labels, None, p)
            seconds = time.perf_counter() - t0
            rows.append({
                "N": W * H,
                "seconds": seconds,
                "threads_max": W * H,
                "iterations": report.iterations,
                "work_total": None,
            })
    return rows


def scaling_csv(rows) -> str:
    lines = ["N,seconds,threads_max,iterations"]
    for r in rows:
        lines.append(
            f"{r['N']},{r['seconds']:.6g},{r['threads_max']},{r['iterations']}"
        )
    return "\n".join(lines) + "\n"


def fit_power_law(points) -> PowerLawFit:
    """Least squares fit of value ~ A * N**alpha in log-log space."""
    pts = [(float(n), float(v)) for n, v in points]
    if len(pts) < 2:
        raise ValueError("need at least two points")
    if any(n <= 0 or v <= 0 for n, v in pts):
        raise ValueError("points must be positive")
    logn = np.array([math.log(n) for n, _ in pts])
    logv = np.array([math.log(v) for _, v in pts])
    if float(np.ptp(logn)) == 0.0:
        raise DegenerateFitError("all N equal; exponent is undetermined")
    alpha, loga = np.polyfit(logn, logv, 1)
    resid = logv - (alpha * logn + loga)
    return PowerLawFit(
        amplitude=float(math.exp(loga)),
        alpha=float(alpha),
        residual=float(np.sqrt(np.mean(resid * resid))),
    )


def plot_script(csv_name: str, x: str = "N", y: str = "threads_max") -> str:
    """Tiny gnuplot script for a study CSV."""
    return (
        "set datafile separator ','\n"
        "set logscale xy\n"
        f"plot '{csv_name}' using '{x}':'{y}' with linespoints title '{y}'\n"
    )
