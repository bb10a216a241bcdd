"""Guide extraction: measurement rings, edge seeds, structure tensors,
spline tracing and the resulting guide vector field.

Isophote directions are read off the structure tensor, smoothed with
truncated Gaussians (window (4s+1)^2 for scale s, kernels renormalized to
unit mass) and gradients taken as centered differences on the smoothed
image.  Measurements happen on a ring far enough from the unknown region
that every convolution window sees only trustworthy data; the masked
variant of the tensor is available right at the boundary but its
orientations bend there, which is exactly why the ring exists.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage
from skimage.feature import canny

from .grid import READABLE, INPAINT
from .splines import Spline

DEFAULT_SIGMA = 2.0
DEFAULT_RHO = 4.0
DEFAULT_LAMBDA = 1e-5
DEFAULT_ETA = 3.0
CANNY_LOW = 0.08
CANNY_HIGH = 0.2
SEED_CLUSTER_RADIUS = 3.0


class EmptyRingError(ValueError):
    """No pixel is far enough from the unknown region to measure on."""


class WindowOverlapError(ValueError):
    """A convolution window reaches into non-Readable territory."""


class ZeroMassError(ValueError):
    """The masked tensor has no readable mass at the queried pixel."""


def _smooth(arr: np.ndarray, s: float) -> np.ndarray:
    """Gaussian smoothing truncated to the (4s+1)^2 window, zero-padded."""
    return ndimage.gaussian_filter(arr, sigma=s, truncate=2.0, mode="constant", cval=0.0)


def _gray(image: np.ndarray) -> np.ndarray:
    return image.mean(axis=2) if image.ndim == 3 else image


def ring_distance(sigma: float = DEFAULT_SIGMA, rho: float = DEFAULT_RHO) -> int:
    """Chebyshev clearance guaranteeing clean cascaded smoothing windows."""
    return int(math.ceil(2.0 * sigma + 2.0 * rho)) + 1


def cascade_radius(sigma: float = DEFAULT_SIGMA, rho: float = DEFAULT_RHO) -> int:
    """Chebyshev radius of the combined (4s+1)/(4r+1) window cascade."""
    return int(math.ceil(2.0 * sigma + 2.0 * rho))


def compute_ring(labels: np.ndarray, sigma: float = DEFAULT_SIGMA,
                 rho: float = DEFAULT_RHO) -> set[tuple[int, int]]:
    """Readable pixels at exactly the clearance distance from D u B.

    The ring is the chessboard-distance level set; any pixel whose window
    cascade would still touch D u B (possible only for hand-built rings,
    the level set construction guarantees clearance) is dropped.
    """
    obstacle = labels != READABLE
    if not obstacle.any():
        raise EmptyRingError("no Inpaint or Bystander pixels to ring")
    dist = ndimage.distance_transform_cdt(~obstacle, metric="chessboard")
    d_ring = ring_distance(sigma, rho)
    ring = dist == d_ring
    blocked = ndimage.binary_dilation(
        obstacle, structure=np.ones((3, 3), dtype=bool), iterations=cascade_radius(sigma, rho)
    )
    ring &= ~blocked
    if not ring.any():
        raise EmptyRingError(
            f"no readable pixel sits {d_ring} px clear of the unknown region"
        )
    j, i = np.nonzero(ring)
    return set(zip(i.tolist(), j.tolist()))


def _tensor_field(image: np.ndarray, indicator: np.ndarray, sigma: float, rho: float):
    """Indicator-weighted structure tensor field (J11, J12, J22, rho_mass).

    With an all-ones indicator this is the plain tensor normalized over the
    in-lattice window; with the readable indicator it is the masked variant.
    """
    ind = indicator.astype(np.float64)
    mass_s = _smooth(ind, sigma)
    safe_s = np.where(mass_s > 0.0, mass_s, 1.0)
    J11 = np.zeros(ind.shape)
    J12 = np.zeros(ind.shape)
    J22 = np.zeros(ind.shape)
    for ch in range(image.shape[2] if image.ndim == 3 else 1):
        u = image[:, :, ch] if image.ndim == 3 else image
        v = _smooth(ind * u, sigma) / safe_s
        gy, gx = np.gradient(v)
        J11 += gx * gx
        J12 += gx * gy
        J22 += gy * gy
    J11 *= ind
    J12 *= ind
    J22 *= ind
    mass_r = _smooth(ind, rho)
    safe_r = np.where(mass_r > 0.0, mass_r, 1.0)
    return (
        _smooth(J11, rho) / safe_r,
        _smooth(J12, rho) / safe_r,
        _smooth(J22, rho) / safe_r,
        mass_r,
    )


def eigen_2x2(a, b, c):
    """Eigen split of symmetric [[a, b], [b, c]] arrays.

    Returns (lambda_minus, lambda_plus, v_minus_x, v_minus_y) with the minor
    eigenvector unit length; orientation comes from the stable half-angle
    form rather than direct back-substitution.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    c = np.asarray(c, dtype=np.float64)
    mean = (a + c) / 2.0
    disc = np.sqrt(((a - c) / 2.0) ** 2 + b * b)
    phi_major = 0.5 * np.arctan2(2.0 * b, a - c)
    return mean - disc, mean + disc, -np.sin(phi_major), np.cos(phi_major)


def structure_tensor(image: np.ndarray, point, sigma: float = DEFAULT_SIGMA,
                     rho: float = DEFAULT_RHO, labels: np.ndarray | None = None) -> np.ndarray:
    """Smoothed gradient outer-product tensor at one pixel.

    When `labels` is given the cascaded window around the pixel must stay
    in Readable territory (WindowOverlapError otherwise).
    """
    i, j = int(point[0]), int(point[1])
    if labels is not None:
        w = cascade_radius(sigma, rho)
        H, W = labels.shape
        window = labels[max(0, j - w):j + w + 1, max(0, i - w):i + w + 1]
        if (window != READABLE).any():
            raise WindowOverlapError(
                f"window of radius {w} around ({i}, {j}) touches non-Readable pixels"
            )
    ones = np.ones(image.shape[:2])
    J11, J12, J22, _ = _tensor_field(image, ones, sigma, rho)
    return np.array([[J11[j, i], J12[j, i]], [J12[j, i], J22[j, i]]])


def modified_structure_tensor(image: np.ndarray, labels: np.ndarray, point,
                              sigma: float = DEFAULT_SIGMA,
                              rho: float = DEFAULT_RHO) -> np.ndarray:
    """Masked tensor: usable next to (or inside) the unknown region."""
    i, j = int(point[0]), int(point[1])
    J11, J12, J22, mass_r = _tensor_field(image, labels == READABLE, sigma, rho)
    if mass_r[j, i] <= 0.0:
        raise ZeroMassError(f"no readable mass within the window at ({i}, {j})")
    return np.array([[J11[j, i], J12[j, i]], [J12[j, i], J22[j, i]]])


def tensor_orientation(J: np.ndarray) -> float:
    """Isophote angle of a tensor, as the minor eigenvector angle mod pi."""
    _, _, vx, vy = eigen_2x2(J[0, 0], J[0, 1], J[1, 1])
    return float(np.mod(math.atan2(float(vy), float(vx)), math.pi))


def detect_edge_seeds(image: np.ndarray, labels: np.ndarray,
                      sigma: float = DEFAULT_SIGMA, rho: float = DEFAULT_RHO,
                      low: float = CANNY_LOW, high: float = CANNY_HIGH):
    """Edge crossings of the measurement ring: list of (i, j, strength).

    Canny runs on an annulus around the ring, restricted to Readable
    pixels, and nearby seeds collapse to the strongest within 3 px.
    """
    ring = compute_ring(labels, sigma, rho)
    obstacle = labels != READABLE
    dist = ndimage.distance_transform_cdt(~obstacle, metric="chessboard")
    d_ring = ring_distance(sigma, rho)
    half = int(math.ceil(2.0 * sigma)) + 1
    annulus = (dist >= d_ring - half) & (dist <= d_ring + half) & (labels == READABLE)
    gray = _gray(image)
    edges = canny(gray, sigma=sigma, low_threshold=low, high_threshold=high, mask=annulus)
    gy, gx = np.gradient(_smooth(gray, sigma))
    strength = np.hypot(gx, gy)
    hits = [(i, j, float(strength[j, i])) for (i, j) in sorted(ring, key=lambda p: (p[1], p[0]))
            if edges[j, i]]
    return _cluster_seeds(hits)


def _cluster_seeds(hits, radius: float = SEED_CLUSTER_RADIUS):
    """Greedy strongest-first suppression of seeds closer than `radius`."""
    kept = []
    for i, j, s in sorted(hits, key=lambda h: (-h[2], h[1], h[0])):
        if all((i - ki) ** 2 + (j - kj) ** 2 > radius * radius for ki, kj, _ in kept):
            kept.append((i, j, s))
    kept.sort(key=lambda h: (h[1], h[0]))
    return kept


def make_spline(seed, image: np.ndarray, labels: np.ndarray,
                sigma: float = DEFAULT_SIGMA, rho: float = DEFAULT_RHO,
                lam: float = DEFAULT_LAMBDA, spline_id: str = "auto-0") -> Spline | None:
    """Trace a straight guide spline through a ring seed.

    The ray follows the minor eigenvector of the clean tensor at the seed,
    signed so it enters the unknown region within twice the ring clearance;
    a ray that never enters (a grazing edge) yields None.  The kept ray is
    extended until it leaves D u B or the lattice.
    """
    i, j = int(seed[0]), int(seed[1])
    J = structure_tensor(image, (i, j), sigma, rho)
    lo, hi, vx, vy = eigen_2x2(J[0, 0], J[0, 1], J[1, 1])
    coherence = math.tanh((float(hi) - float(lo)) / lam)
    H, W = labels.shape
    budget = 2 * ring_distance(sigma, rho)
    step = 0.5
    start = np.array([float(i), float(j)])

    def first_entry(direction):
        for t in np.arange(step, budget + step / 2, step):
            p = start + t * direction
            ii, jj = int(round(p[0])), int(round(p[1]))
            if not (0 <= ii < W and 0 <= jj < H):
                return None
            if labels[jj, ii] == INPAINT:
                return t
        return None

    v = np.array([float(vx), float(vy)])
    t_plus = first_entry(v)
    t_minus = first_entry(-v)
    if t_plus is None and t_minus is None:
        return None
    if t_minus is None or (t_plus is not None and t_plus <= t_minus):
        direction = v
        t_entry = t_plus
    else:
        direction = -v
        t_entry = t_minus

    t_end = t_entry
    t = t_entry
    limit = 2.0 * (H + W)
    while t < limit:
        t += step
        p = start + t * direction
        ii, jj = int(round(p[0])), int(round(p[1]))
        if not (0 <= ii < W and 0 <= jj < H) or labels[jj, ii] == READABLE:
            break
        t_end = t
    end = start + t_end * direction
    return Spline(
        id=spline_id,
        source="auto",
        direction=(coherence * direction[0], coherence * direction[1]),
        points=np.stack([start, end]),
    )


def detect_splines(image: np.ndarray, labels: np.ndarray,
                   sigma: float = DEFAULT_SIGMA, rho: float = DEFAULT_RHO,
                   lam: float = DEFAULT_LAMBDA, low: float = CANNY_LOW,
                   high: float = CANNY_HIGH) -> list[Spline]:
    """Full pipeline: ring, seeds, one traced spline per surviving seed."""
    seeds = detect_edge_seeds(image, labels, sigma, rho, low, high)
    out = []
    for k, (i, j, _) in enumerate(seeds):
        sp = make_spline((i, j), image, labels, sigma, rho, lam, spline_id=f"auto-{k}")
        if sp is not None:
            out.append(sp)
    for k, sp in enumerate(out):
        sp.id = f"auto-{k}"
    return out


def _segment_min_distance(px, py, poly: np.ndarray) -> np.ndarray:
    """Min distance from pixels (px, py) to an open polyline."""
    best = np.full(px.shape, np.inf)
    for k in range(len(poly) - 1):
        ax, ay = poly[k]
        bx, by = poly[k + 1]
        abx, aby = bx - ax, by - ay
        L2 = abx * abx + aby * aby
        if L2 == 0.0:
            d = np.hypot(px - ax, py - ay)
        else:
            t = np.clip(((px - ax) * abx + (py - ay) * aby) / L2, 0.0, 1.0)
            d = np.hypot(px - (ax + t * abx), py - (ay + t * aby))
        np.minimum(best, d, out=best)
    return best


def build_guide_field(splines, labels: np.ndarray, eta: float = DEFAULT_ETA) -> np.ndarray:
    """Gaussian falloff of each nearest spline's direction over the Inpaint set.

    Returns an (H, W, 2) field that is exactly zero outside D_h and at
    pixels farther than 3 eta from every spline.
    """
    H, W = labels.shape
    field = np.zeros((H, W, 2))
    splines = list(splines)
    if not splines:
        return field
    jj, ii = np.nonzero(labels == INPAINT)
    if jj.size == 0:
        return field
    px = ii.astype(np.float64)
    py = jj.astype(np.float64)
    dists = np.stack([_segment_min_distance(px, py, sp.polyline()) for sp in splines])
    nearest = np.argmin(dists, axis=0)
    dmin = dists[nearest, np.arange(px.size)]
    falloff = np.exp(-(dmin * dmin) / (2.0 * eta * eta))
    falloff[dmin > 3.0 * eta] = 0.0
    dirs = np.array([[float(sp.direction[0]), float(sp.direction[1])] for sp in splines])
    field[jj, ii, 0] = dirs[nearest, 0] * falloff
    field[jj, ii, 1] = dirs[nearest, 1] * falloff
    return field


def coherence_directions(image: np.ndarray, readable: np.ndarray, ix, iy,
                         sigma: float = DEFAULT_SIGMA, rho: float = DEFAULT_RHO,
                         lam: float = DEFAULT_LAMBDA) -> np.ndarray:
    """Masked-tensor transport directions at the queried pixels: (F, 2).

    Used by the per-iteration coherence transport mode; pixels with no
    readable window mass get g = 0.
    """
    ix = np.asarray(ix)
    iy = np.asarray(iy)
    H, W = readable.shape
    pad = cascade_radius(sigma, rho) + 2
    j0 = max(0, int(iy.min()) - pad)
    j1 = min(H, int(iy.max()) + pad + 1)
    i0 = max(0, int(ix.min()) - pad)
    i1 = min(W, int(ix.max()) + pad + 1)
    sub_img = image[j0:j1, i0:i1]
    sub_read = readable[j0:j1, i0:i1]
    J11, J12, J22, mass_r = _tensor_field(sub_img, sub_read, sigma, rho)
    qj = iy - j0
    qi = ix - i0
    lo, hi, vx, vy = eigen_2x2(J11[qj, qi], J12[qj, qi], J22[qj, qi])
    coh = np.tanh((hi - lo) / lam)
    g = np.stack([coh * vx, coh * vy], axis=-1)
    g[mass_r[qj, qi] <= 0.0] = 0.0
    return g
