"""Shell-based fill engine.

Each iteration snapshots the readable set, computes a weighted average of
readable ball samples for every frontier pixel that is ready, writes the
results, and promotes the filled pixels to Readable.  Because fills only
write to pixels that were Inpaint at the iteration start, reads against
the live arrays are equivalent to reads against a snapshot.

Weights follow w(x, y) = 1/|y-x| * exp(-(mu^2 / 2 eps^2) (g_perp . (y-x))^2)
with eps = r pixels and g_perp the counterclockwise perpendicular of the
guide vector; g = 0 drops the anisotropic factor.  mu = inf restricts the
ball to the members closest to the line through x along g, inverse-distance
weighted within that set.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, asdict

import numpy as np
from scipy import ndimage

from . import grid
from .grid import READABLE, INPAINT

ORDERS = ("onion", "smart", "smart_with_data_term")
NEIGHBORHOODS = ("rotated_ball", "axis_ball")
G_SOURCES = ("guide_field", "modified_structure_tensor", "fixed")


@dataclass
class FillParams:
    """Knobs of the fill engine; defaults are the guide-field configuration."""

    r: int = 3
    mu: float = 50.0
    c: float = 0.05
    c2: float = 0.0
    order: str = "smart"
    neighborhood: str = "rotated_ball"
    g_source: str = "guide_field"
    g_fixed: tuple[float, float] | None = None
    periodic_x: bool = False
    sigma: float = 2.0
    rho: float = 4.0
    coherence_lambda: float = 1e-5

    def __post_init__(self):
        if self.r < 1:
            raise ValueError("r must be >= 1")
        if self.order not in ORDERS:
            raise ValueError(f"order must be one of {ORDERS}")
        if self.neighborhood not in NEIGHBORHOODS:
            raise ValueError(f"neighborhood must be one of {NEIGHBORHOODS}")
        if self.g_source not in G_SOURCES:
            raise ValueError(f"g_source must be one of {G_SOURCES}")
        if not (self.mu >= 0.0):
            raise ValueError("mu must be >= 0 (inf allowed)")

    @classmethod
    def guidefill(cls, **kw) -> "FillParams":
        return cls(**kw)

    @classmethod
    def coherence_transport(cls, **kw) -> "FillParams":
        """Axis-ball transport steered by the boundary-aware structure tensor."""
        defaults = dict(
            r=5,
            neighborhood="axis_ball",
            order="onion",
            g_source="modified_structure_tensor",
        )
        defaults.update(kw)
        return cls(**defaults)

    @classmethod
    def telea(cls, **kw) -> "FillParams":
        """Isotropic onion baseline: axis ball, g = 0."""
        defaults = dict(
            neighborhood="axis_ball", order="onion", g_source="fixed", g_fixed=(0.0, 0.0)
        )
        defaults.update(kw)
        return cls(**defaults)

    def to_dict(self) -> dict:
        d = asdict(self)
        if math.isinf(d["mu"]):
            d["mu"] = "inf"
        return d


@dataclass
class FillReport:
    iterations: int = 0
    filled: int = 0
    deadlock_fills: int = 0
    unfillable: bool = False
    unfillable_count: int = 0
    wall_time_s: float = 0.0
    # per-iteration rows: (iteration, frontier_size, candidates, threads_requested, filled)
    rows: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "iterations": self.iterations,
            "filled": self.filled,
            "deadlock_fills": self.deadlock_fills,
            "unfillable": self.unfillable,
            "unfillable_count": self.unfillable_count,
            "wall_time_s": self.wall_time_s,
            "frontier_sizes": [r[1] for r in self.rows],
            "filled_per_iteration": [r[4] for r in self.rows],
        }


def weight(x, y, g, mu: float, eps: float) -> float:
    """Pairwise fill weight for finite mu; x, y are continuous points."""
    dx = float(y[0]) - float(x[0])
    dy = float(y[1]) - float(x[1])
    dist = math.hypot(dx, dy)
    if dist == 0.0:
        raise ValueError("weight is undefined at y == x")
    if math.isinf(mu):
        raise ValueError("mu = inf weights are defined set-wise, not pairwise")
    d = -float(g[1]) * dx + float(g[0]) * dy
    return math.exp(-(mu * mu) / (2.0 * eps * eps) * d * d) / dist


def _ball_weights(rel: np.ndarray, g: np.ndarray, mu: float, r: int) -> np.ndarray:
    """Weights for relative ball offsets; rel (..., K, 2), g broadcastable (..., 2)."""
    dist = np.hypot(rel[..., 0], rel[..., 1])
    gx = g[..., 0][..., None]
    gy = g[..., 1][..., None]
    if math.isinf(mu):
        # scale of g is irrelevant in the argmin limit; normalize so the
        # selection tolerance is meaningful
        norm = np.sqrt(gx * gx + gy * gy)
        safe = np.where(norm == 0.0, 1.0, norm)
        d = (-gy * rel[..., 0] + gx * rel[..., 1]) / safe
        d2 = d * d
        tol = 1e-12 * max(1.0, float(r * r))
        sel = d2 <= d2.min(axis=-1, keepdims=True) + tol
        return sel / dist
    d = -gy * rel[..., 0] + gx * rel[..., 1]
    return np.exp(-(mu * mu) / (2.0 * float(r * r)) * d * d) / dist


def _per_pixel_points(g: np.ndarray, offs: np.ndarray, rotated: bool) -> np.ndarray:
    """Ball points relative to each center: (F, K, 2) from guide rows (F, 2)."""
    F = g.shape[0]
    if not rotated:
        return np.broadcast_to(offs, (F,) + offs.shape)
    norm = np.hypot(g[:, 0], g[:, 1])
    safe = np.where(norm == 0.0, 1.0, norm)
    ux = np.where(norm == 0.0, 0.0, g[:, 0] / safe)
    uy = np.where(norm == 0.0, 1.0, g[:, 1] / safe)
    # point = n * (uy, -ux) + m * (ux, uy) for offset (n, m)
    n = offs[:, 0]
    m = offs[:, 1]
    px = n[None, :] * uy[:, None] + m[None, :] * ux[:, None]
    py = -n[None, :] * ux[:, None] + m[None, :] * uy[:, None]
    return np.stack([px, py], axis=-1)


class _BallSampler:
    """Gathers readable ball samples and weight masses for frontier pixels."""

    def __init__(self, params: FillParams):
        self.params = params
        self.offs = grid.offsets_in_disk(params.r)[1:]  # center excluded
        self.rotated = params.neighborhood == "rotated_ball"

    def gather(self, u, readable, fx, fy, g):
        """fx, fy: frontier pixel coords (F,);  g: (2,) shared or (F, 2).

        Returns (values (F, C), readable_mass (F,), total_mass (F,)).
        """
        p = self.params
        if g.ndim == 1:
            rel = _per_pixel_points(g[None, :], self.offs, self.rotated)[0]
            w = _ball_weights(rel, g, p.mu, p.r)[None, :]
            X = fx[:, None] + rel[None, :, 0]
            Y = fy[:, None] + rel[None, :, 1]
        else:
            rel = _per_pixel_points(g, self.offs, self.rotated)
            w = _ball_weights(rel, g, p.mu, p.r)
            X = fx[:, None] + rel[..., 0]
            Y = fy[:, None] + rel[..., 1]
        vals, ok = grid.bilinear_gather(u, readable, X, Y, p.periodic_x)
        wr = np.where(ok, w, 0.0)
        readable_mass = wr.sum(axis=1)
        total_mass = (w * np.ones_like(ok, dtype=np.float64)).sum(axis=1)
        num = np.einsum("fk,fkc->fc", wr, vals)
        with np.errstate(invalid="ignore", divide="ignore"):
            values = num / readable_mass[:, None]
        values[readable_mass == 0.0] = 0.0
        return values, readable_mass, total_mass


def confidence(point, image, labels, g, params: FillParams) -> float:
    """Readable weight mass over total ball weight mass at one pixel."""
    sampler = _BallSampler(params)
    readable = labels == READABLE
    fx = np.array([float(point[0])])
    fy = np.array([float(point[1])])
    _, rw, tw = sampler.gather(image, readable, fx, fy, np.asarray(g, dtype=np.float64))
    return float(rw[0] / tw[0])


def fill_color(point, image, labels, g, params: FillParams):
    """Weighted average of readable ball samples; (values, True) or (None, False)."""
    sampler = _BallSampler(params)
    readable = labels == READABLE
    fx = np.array([float(point[0])])
    fy = np.array([float(point[1])])
    vals, rw, _ = sampler.gather(image, readable, fx, fy, np.asarray(g, dtype=np.float64))
    if rw[0] == 0.0:
        return None, False
    return vals[0], True


def ready(conf: float, g, params: FillParams, data_term_live: bool = True) -> bool:
    """Fill-readiness predicate for one pixel."""
    if params.order == "onion":
        return True
    if params.order == "smart" or not data_term_live:
        return conf > params.c
    gnorm = math.hypot(float(g[0]), float(g[1]))
    return gnorm > params.c2 and conf > params.c


def _resolve_g(u, labels, frontier, W, params: FillParams, guide_vecs):
    """Guide vectors for the frontier: (2,) shared or (F, 2) per pixel."""
    if params.g_source == "fixed":
        gf = params.g_fixed or (0.0, 0.0)
        return np.array([float(gf[0]), float(gf[1])])
    if params.g_source == "guide_field":
        if guide_vecs is None:
            return np.zeros(2)
        return guide_vecs.reshape(-1, 2)[frontier]
    from . import guide as guide_mod  # local import; guide depends on grid only

    iy, ix = np.divmod(frontier, W)
    return guide_mod.coherence_directions(
        u, labels == READABLE, ix, iy,
        sigma=params.sigma, rho=params.rho, lam=params.coherence_lambda,
    )


def _neighbor_mean(u, readable, idx: int, W: int, periodic_x: bool):
    """Mean color of readable 8-neighbors; the guard for data-free fills."""
    H = readable.shape[0]
    j, i = divmod(idx, W)
    acc = np.zeros(u.shape[2])
    n = 0
    for di, dj in grid.NEIGHBOR_OFFSETS:
        ii, jj = i + di, j + dj
        if periodic_x:
            ii %= W
        if 0 <= ii < W and 0 <= jj < H and readable[jj, ii]:
            acc += u[jj, ii]
            n += 1
    if n == 0:
        return None
    return acc / n


def _fill_unfillable(u, labels, readable):
    """Assign remaining Inpaint pixels the color of the nearest readable pixel."""
    remaining = labels == INPAINT
    count = int(remaining.sum())
    if count == 0:
        return 0
    if readable.any():
        _, (jnear, inear) = ndimage.distance_transform_edt(~readable, return_indices=True)
        jr, ir = np.nonzero(remaining)
        u[jr, ir] = u[jnear[jr, ir], inear[jr, ir]]
    else:
        u[remaining] = 0.5
    labels[remaining] = READABLE
    return count


def _fill_loop(image, labels, guide_vecs, params: FillParams, frontier_update=None):
    """Shared fill loop; frontier_update=None recomputes the frontier globally."""
    H, W = labels.shape
    u = np.ascontiguousarray(image, dtype=np.float64).copy()
    lab = labels.copy()
    readable = lab == READABLE
    if bool(readable.any()):
        seed = u[readable]
        value_hull = (float(seed.min()), float(seed.max()))
    else:
        value_hull = None
    remaining = int((lab == INPAINT).sum())
    sampler = _BallSampler(params)
    report = FillReport()
    data_term_live = params.order == "smart_with_data_term"
    frontier = np.flatnonzero(grid.active_boundary_mask(lab, params.periodic_x))
    t0 = time.perf_counter()

    flat_read = readable.reshape(-1)
    flat_lab = lab.reshape(-1)
    flat_u = u.reshape(-1, u.shape[2])

    iteration = 0
    while remaining > 0:
        if frontier.size == 0:
            report.unfillable = True
            report.unfillable_count = _fill_unfillable(u, lab, readable)
            break
        g = _resolve_g(u, lab, frontier, W, params, guide_vecs)
        fy, fx = np.divmod(frontier, W)
        vals, rw, tw = sampler.gather(u, readable, fx.astype(np.float64), fy.astype(np.float64), g)
        conf = rw / tw

        if params.order == "onion":
            is_ready = np.ones(frontier.size, dtype=bool)
        elif params.order == "smart" or not data_term_live:
            is_ready = conf > params.c
        else:
            gnorm = np.hypot(g[..., 0], g[..., 1])
            if g.ndim == 1:
                gnorm = np.full(frontier.size, gnorm)
            if not (gnorm > 0.0).any():
                data_term_live = False
                is_ready = conf > params.c
            else:
                is_ready = (gnorm > params.c2) & (conf > params.c)

        fill = is_ready & (rw > 0.0)
        if not fill.any():
            # deadlock guard: fill the single maximal-confidence pixel; the
            # sorted frontier makes the tie-break lexicographic in (j, i)
            k = int(np.argmax(conf))
            if rw[k] > 0.0:
                fill[k] = True
            else:
                fallback = _neighbor_mean(u, readable, int(frontier[k]), W, params.periodic_x)
                if fallback is None:
                    report.unfillable = True
                    report.unfillable_count = _fill_unfillable(u, lab, readable)
                    break
                vals[k] = fallback
                fill[k] = True
            report.deadlock_fills += 1

        filled_idx = frontier[fill]
        flat_u[filled_idx] = vals[fill]
        flat_read[filled_idx] = True
        flat_lab[filled_idx] = READABLE
        remaining -= filled_idx.size
        report.filled += int(filled_idx.size)

        if frontier_update is None:
            candidates = W * H
            threads = W * H
            new_frontier = np.flatnonzero(grid.active_boundary_mask(lab, params.periodic_x))
        else:
            candidates, new_frontier = frontier_update(frontier, fill, filled_idx, lab)
            threads = int(frontier.size)
        report.rows.append(
            (iteration, int(frontier.size), int(candidates), int(threads), int(filled_idx.size))
        )
        frontier = new_frontier
        iteration += 1

    report.iterations = iteration
    report.wall_time_s = time.perf_counter() - t0
    # every fill is a convex combination of readable values, but the
    # floating-point average can escape the hull by a few ulps
    if value_hull is not None:
        np.clip(u, value_hull[0], value_hull[1], out=u)
    return u, lab, report


def inpaint(image, labels, guide=None, params: FillParams | None = None):
    """Fill all Inpaint pixels of `labels` in `image`.

    Parameters
    ----------
    image : (H, W, C) float array in [0, 1]
    labels : (H, W) uint8 label mask
    guide : optional (H, W, 2) guide vector field (used when
        params.g_source == "guide_field"); None means g = 0 everywhere
    params : FillParams; defaults to FillParams()

    Returns
    -------
    (filled_image, FillReport)
    """
    params = params or FillParams()
    grid.validate_labels(labels)
    if image.ndim != 3:
        raise ValueError("image must be (H, W, C)")
    if image.shape[:2] != labels.shape:
        raise ValueError(
            f"image {image.shape[:2]} and label mask {labels.shape} dimensions differ"
        )
    guide_vecs = None
    if guide is not None:
        guide_vecs = np.asarray(guide, dtype=np.float64)
        if guide_vecs.shape != labels.shape + (2,):
            raise ValueError("guide field shape must be (H, W, 2)")
    u, _, report = _fill_loop(image, labels, guide_vecs, params)
    return u, report


def coherence_transport_mode(image, labels, **param_overrides):
    """Axis-ball onion fill steered per iteration by the masked structure tensor."""
    params = FillParams.coherence_transport(**param_overrides)
    return inpaint(image, labels, None, params)
