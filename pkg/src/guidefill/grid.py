"""Label lattices, boundaries, ghost-pixel sampling and stencil balls.

Conventions used across the package:

* images are float64 arrays of shape (H, W, C) with values in [0, 1],
* label masks are uint8 arrays of shape (H, W) holding READABLE,
  BYSTANDER or INPAINT,
* a pixel coordinate is the pair (i, j) where i is the column and j the
  row; continuous positions (x, y) live on the same axes, so the pixel
  center of (i, j) is the point (float(i), float(j)),
* arrays are indexed arr[j, i].

The lattice edge is not a label boundary: a pixel on the image border is
a boundary pixel only by virtue of its in-lattice neighbors.  An optional
periodic wrap in x is provided for the continuum-limit experiments.
"""

from __future__ import annotations

import numpy as np

READABLE = 0
BYSTANDER = 128
INPAINT = 255

_LABEL_VALUES = (READABLE, BYSTANDER, INPAINT)

# 8-neighborhood offsets as (di, dj), fixed order
NEIGHBOR_OFFSETS = (
    (-1, -1), (0, -1), (1, -1),
    (-1, 0), (1, 0),
    (-1, 1), (0, 1), (1, 1),
)


def validate_labels(labels: np.ndarray) -> None:
    """Raise ValueError unless labels is a 2-D array over the three label values."""
    if labels.ndim != 2:
        raise ValueError(f"label mask must be 2-D, got shape {labels.shape}")
    bad = ~np.isin(labels, _LABEL_VALUES)
    if bad.any():
        j, i = np.nonzero(bad)
        raise ValueError(
            f"label mask holds value {int(labels[j[0], i[0]])} at (i={int(i[0])}, j={int(j[0])}); "
            f"allowed values are {_LABEL_VALUES}"
        )


def validate_image(image: np.ndarray) -> None:
    """Raise ValueError unless image is (H, W, C) float with finite values in [0, 1]."""
    if image.ndim != 3 or image.shape[2] not in (1, 2, 3, 4):
        raise ValueError(f"image must be (H, W, C) with 1..4 channels, got shape {image.shape}")
    if not np.isfinite(image).all():
        raise ValueError("image holds non-finite values")
    if image.min() < 0.0 or image.max() > 1.0:
        raise ValueError("image values must lie in [0, 1]")


def neighbor_any(mask: np.ndarray, periodic_x: bool = False) -> np.ndarray:
    """Pixels having at least one true 8-neighbor in `mask` (self excluded).

    Out-of-lattice neighbors count as false; with periodic_x the x axis wraps.
    """
    H, W = mask.shape
    pad = np.zeros((H + 2, W + 2), dtype=bool)
    pad[1:-1, 1:-1] = mask
    if periodic_x:
        pad[1:-1, 0] = mask[:, -1]
        pad[1:-1, -1] = mask[:, 0]
    out = np.zeros((H, W), dtype=bool)
    for dj in (0, 1, 2):
        for di in (0, 1, 2):
            if dj == 1 and di == 1:
                continue
            out |= pad[dj:dj + H, di:di + W]
    return out


def _coord_set(mask: np.ndarray) -> set[tuple[int, int]]:
    j, i = np.nonzero(mask)
    return set(zip(i.tolist(), j.tolist()))


def inner_boundary(labels: np.ndarray, periodic_x: bool = False) -> set[tuple[int, int]]:
    """Inpaint pixels with an 8-neighbor outside the Inpaint set."""
    validate_labels(labels)
    inp = labels == INPAINT
    return _coord_set(inp & neighbor_any(~inp, periodic_x))


def outer_boundary(labels: np.ndarray, periodic_x: bool = False) -> set[tuple[int, int]]:
    """Non-Inpaint pixels with an Inpaint 8-neighbor."""
    validate_labels(labels)
    inp = labels == INPAINT
    return _coord_set(~inp & neighbor_any(inp, periodic_x))


def active_boundary(labels: np.ndarray, periodic_x: bool = False) -> set[tuple[int, int]]:
    """Inpaint pixels with a Readable 8-neighbor; the pixels fillable this iteration."""
    validate_labels(labels)
    return _coord_set(active_boundary_mask(labels, periodic_x))


def active_boundary_mask(labels: np.ndarray, periodic_x: bool = False) -> np.ndarray:
    """Boolean-array form of active_boundary, used by the fill loop."""
    return (labels == INPAINT) & neighbor_any(labels == READABLE, periodic_x)


def offsets_in_disk(r: int) -> np.ndarray:
    """Integer offsets (n, m) with n^2 + m^2 <= r^2, in fixed (m, n) scan order.

    The first entry is always (0, 0); callers that exclude the center rely
    on that.
    """
    if r < 1:
        raise ValueError("ball radius must be >= 1")
    span = np.arange(-r, r + 1)
    nn, mm = np.meshgrid(span, span)
    keep = nn * nn + mm * mm <= r * r
    offs = np.stack([nn[keep], mm[keep]], axis=1).astype(np.float64)
    # move (0, 0) to the front, keep the remaining scan order
    center = np.nonzero((offs[:, 0] == 0) & (offs[:, 1] == 0))[0][0]
    order = np.concatenate([[center], np.delete(np.arange(len(offs)), center)])
    return offs[order]


def rotation_to(g) -> np.ndarray:
    """Rotation matrix mapping (0, 1) onto the direction of g; identity for g = 0."""
    gx, gy = float(g[0]), float(g[1])
    norm = np.hypot(gx, gy)
    if norm == 0.0:
        return np.eye(2)
    ux, uy = gx / norm, gy / norm
    # columns are R(1,0) and R(0,1); R(0,1) = (ux, uy)
    return np.array([[uy, ux], [-ux, uy]])


def rotated_ball(center, g, r: int) -> np.ndarray:
    """Ball of lattice offsets rotated so its axis aligns with g.

    Returns an (K, 2) array of continuous points center + R(n, m) over the
    integer disk of radius r.  K equals the disk cardinality for every g,
    and for g = 0 the points are exactly the axis-aligned lattice points.
    """
    offs = offsets_in_disk(r)
    R = rotation_to(g)
    pts = offs @ R.T
    pts[:, 0] += float(center[0])
    pts[:, 1] += float(center[1])
    return pts


def axis_ball(center, r: int) -> np.ndarray:
    """Axis-aligned lattice ball; identical to rotated_ball with g = 0."""
    return rotated_ball(center, (0.0, 0.0), r)


def bilinear_gather(
    image: np.ndarray,
    readable: np.ndarray,
    X: np.ndarray,
    Y: np.ndarray,
    periodic_x: bool = False,
):
    """Sample ghost points (X, Y) from `image` with strict readability.

    A ghost point is Readable only if every bilinear stencil center with
    nonzero weight is in-lattice and true in `readable`; stencil centers
    whose weight is exactly zero are ignored, so lattice points reproduce
    the stored pixel bit-exactly.

    Parameters
    ----------
    image : (H, W, C) float array
    readable : (H, W) bool array
    X, Y : broadcast-compatible float arrays of sample coordinates
    periodic_x : wrap the x axis instead of treating it as a lattice edge

    Returns
    -------
    values : X.shape + (C,) float array (zeros where not readable)
    ok : bool array of X.shape
    """
    H, W = readable.shape
    C = image.shape[2]
    x0 = np.floor(X).astype(np.int64)
    y0 = np.floor(Y).astype(np.int64)
    fx = X - x0
    fy = Y - y0

    vals = np.zeros(X.shape + (C,))
    ok = np.ones(X.shape, dtype=bool)
    flat_img = image.reshape(-1, C)
    flat_read = readable.reshape(-1)

    for cx, wx in ((x0, 1.0 - fx), (x0 + 1, fx)):
        for cy, wy in ((y0, 1.0 - fy), (y0 + 1, fy)):
            w = wx * wy
            live = w != 0.0
            if periodic_x:
                cxe = np.mod(cx, W)
                inside = (cy >= 0) & (cy < H)
            else:
                cxe = cx
                inside = (cx >= 0) & (cx < W) & (cy >= 0) & (cy < H)
            idx = np.where(inside, cy * W + cxe, 0)
            corner_ok = inside & flat_read[idx]
            ok &= corner_ok | ~live
            vals += np.where(live & inside, w, 0.0)[..., None] * flat_img[idx]
    vals[~ok] = 0.0
    return vals, ok


def sample_bilinear(image: np.ndarray, readable: np.ndarray, point, periodic_x: bool = False):
    """Sample one ghost point; returns (values, True) or (None, False) if unreadable."""
    X = np.array([float(point[0])])
    Y = np.array([float(point[1])])
    vals, ok = bilinear_gather(image, readable, X, Y, periodic_x)
    if not ok[0]:
        return None, False
    return vals[0], True
