"""Incremental frontier tracking and work accounting.

The naive loop rescans the whole lattice for active pixels every
iteration, so each pass costs one thread (or lane) per image pixel.  The
tracked variant maintains the frontier as a compact sorted index list:
survivors of the last frontier plus the Inpaint 8-neighbors of the pixels
just filled, deduplicated by a sort, filtered by the active-boundary
predicate and compacted.  Lane counts stay proportional to the frontier
size while per-lane work stays logarithmic in it, and the produced fill
is bit-identical to the untracked engine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import grid
from .grid import INPAINT, READABLE


@dataclass
class FrontierList:
    """Compact sorted list of active-boundary pixels (linear indices)."""

    indices: np.ndarray
    shape: tuple[int, int]
    generation: int = 0

    @classmethod
    def from_labels(cls, labels: np.ndarray, periodic_x: bool = False) -> "FrontierList":
        idx = np.flatnonzero(grid.active_boundary_mask(labels, periodic_x))
        return cls(indices=idx, shape=labels.shape, generation=0)

    def coords(self) -> set[tuple[int, int]]:
        W = self.shape[1]
        return {(int(k % W), int(k // W)) for k in self.indices}


def _neighbor_indices(idx: np.ndarray, shape, periodic_x: bool):
    """All in-lattice 8-neighbors of the given linear indices: (valid, flat)."""
    H, W = shape
    jy, ix = np.divmod(idx, W)
    out = []
    for di, dj in grid.NEIGHBOR_OFFSETS:
        ii = ix + di
        jj = jy + dj
        if periodic_x:
            ii = np.mod(ii, W)
            valid = (jj >= 0) & (jj < H)
        else:
            valid = (ii >= 0) & (ii < W) & (jj >= 0) & (jj < H)
        out.append((valid, jj * W + np.where(valid, ii, 0)))
    return out


def _active_filter(cand: np.ndarray, labels: np.ndarray, periodic_x: bool) -> np.ndarray:
    """Keep candidates that are Inpaint with at least one Readable 8-neighbor."""
    flat = labels.reshape(-1)
    keep = flat[cand] == INPAINT
    has_readable = np.zeros(cand.size, dtype=bool)
    for valid, nbr in _neighbor_indices(cand, labels.shape, periodic_x):
        has_readable |= valid & (flat[np.where(valid, nbr, 0)] == READABLE)
    return cand[keep & has_readable]


def _update_arrays(frontier: np.ndarray, survivors: np.ndarray, filled: np.ndarray,
                   labels: np.ndarray, periodic_x: bool):
    """Core update; returns (candidate_count, new sorted frontier indices)."""
    flat = labels.reshape(-1)
    grown = []
    for valid, nbr in _neighbor_indices(filled, labels.shape, periodic_x):
        live = valid & (flat[np.where(valid, nbr, 0)] == INPAINT)
        grown.append(nbr[live])
    pool = np.concatenate([survivors] + grown) if grown else survivors
    candidates = np.unique(pool)  # sort-based dedup
    return int(candidates.size), _active_filter(candidates, labels, periodic_x)


def update_frontier(frontier: FrontierList, filled, labels: np.ndarray,
                    periodic_x: bool = False) -> FrontierList:
    """One frontier maintenance step after the pixels in `filled` were made
    Readable in `labels`.

    `filled` may be a set of (i, j) coordinates or an array of linear
    indices.  The result equals a from-scratch active-boundary scan of the
    updated labels, at a cost proportional to the frontier itself.
    """
    W = frontier.shape[1]
    if isinstance(filled, (set, frozenset, list, tuple)):
        filled_idx = np.sort(np.array(
            [j * W + i for (i, j) in filled], dtype=np.int64
        )) if len(filled) else np.empty(0, dtype=np.int64)
    else:
        filled_idx = np.sort(np.asarray(filled, dtype=np.int64))
    survivors = frontier.indices[~np.isin(frontier.indices, filled_idx)]
    _, new_idx = _update_arrays(frontier.indices, survivors, filled_idx, labels, periodic_x)
    return FrontierList(indices=new_idx, shape=frontier.shape,
                        generation=frontier.generation + 1)


@dataclass
class WorkMetrics:
    """Per-iteration lane accounting for a fill run.

    rows hold (iteration, frontier_size, candidates, threads_requested,
    filled).  threads_requested is the lane count of the widest stage: the
    frontier size for tracked runs, the full pixel count for untracked
    ones.  work counts lane-steps assuming logarithmic-depth dedup.
    """

    rows: list = field(default_factory=list)
    tracked: bool = True
    report: object = None

    CSV_HEADER = "iteration,frontier_size,candidates,threads_requested,filled"

    @property
    def threads_max(self) -> int:
        return max((r[3] for r in self.rows), default=0)

    @property
    def iterations(self) -> int:
        return len(self.rows)

    @property
    def work_total(self) -> int:
        total = 0
        for _, fsize, cand, _, _ in self.rows:
            depth = max(1, math.ceil(math.log2(max(2, cand))))
            total += fsize * depth
        return total

    def to_csv(self) -> str:
        lines = [self.CSV_HEADER]
        for row in self.rows:
            lines.append(",".join(str(int(v)) for v in row))
        return "\n".join(lines) + "\n"


def run_tracked(image, labels, guide=None, params=None, debug: bool = False):
    """Run the fill with incremental frontier maintenance.

    Returns (filled_image, WorkMetrics).  With debug=True every updated
    frontier is checked for set equality against a from-scratch scan.
    """
    from . import engine  # deferred: engine is the heavier import

    params = params or engine.FillParams()
    grid.validate_labels(labels)
    if image.shape[:2] != labels.shape:
        raise ValueError(
            f"image {image.shape[:2]} and label mask {labels.shape} dimensions differ"
        )
    guide_vecs = None
    if guide is not None:
        guide_vecs = np.asarray(guide, dtype=np.float64)

    def frontier_update(frontier, fill_mask, filled_idx, lab):
        survivors = frontier[~fill_mask]
        count, new_idx = _update_arrays(frontier, survivors, filled_idx, lab, params.periodic_x)
        if debug:
            oracle = np.flatnonzero(grid.active_boundary_mask(lab, params.periodic_x))
            if not np.array_equal(new_idx, oracle):
                raise AssertionError("tracked frontier diverged from full rescan")
        return count, new_idx

    u, _, report = engine._fill_loop(image, labels, guide_vecs, params, frontier_update)
    metrics = WorkMetrics(rows=report.rows, tracked=True, report=report)
    return u, metrics
