"""Regular evaluation grids, mode detection, and upper-level-set regions.

A retained mode must be the strict maximum of the estimated density over a
window of +-r cells per axis (ties broken toward the lexicographically
smallest index, so exactly one cell of a plateau survives). Each retained
mode's region is the largest Moore-connected upper-level set that contains
no other retained mode, found by bisecting the threshold over the distinct
density values.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
from scipy import ndimage

from .errors import DataError, ValidationError

if TYPE_CHECKING:  # pragma: no cover
    from .density import Bandwidth, DensityEstimate

GRID_CELL_CAP = 2**22
DEFAULT_PADDING = 3.0


def default_cells_per_axis(d: int) -> int:
    """50 cells per axis for d <= 3, 16 for d = 4; d >= 5 exceeds the cap."""
    if d <= 3:
        return 50
    if d == 4:
        return 16
    raise ValidationError("grids with d >= 5 exceed the cell cap")


@dataclass(frozen=True)
class RegularGrid:
    """Axis-aligned grid of equal cells; cell (i1..id) spans lower + i*res."""

    lower: np.ndarray
    upper: np.ndarray
    counts: np.ndarray

    def __post_init__(self):
        lower = np.atleast_1d(np.asarray(self.lower, dtype=float))
        upper = np.atleast_1d(np.asarray(self.upper, dtype=float))
        counts = np.atleast_1d(np.asarray(self.counts, dtype=int))
        if not (lower.shape == upper.shape == counts.shape):
            raise ValidationError("grid lower/upper/counts must share one shape")
        if np.any(counts < 4):
            raise ValidationError("grids need at least 4 cells per axis")
        if np.any(lower >= upper):
            raise ValidationError("grid lower bounds must be below upper bounds")
        total = int(np.prod(counts.astype(object)))
        if total > GRID_CELL_CAP:
            raise ValidationError(
                f"grid of {'x'.join(map(str, counts))} = {total} cells "
                f"exceeds the cap of {GRID_CELL_CAP}"
            )
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "counts", counts)

    @property
    def d(self) -> int:
        return self.lower.size

    @property
    def resolution(self) -> np.ndarray:
        return (self.upper - self.lower) / self.counts

    def axis_centers(self, j: int) -> np.ndarray:
        res = self.resolution[j]
        return self.lower[j] + (np.arange(self.counts[j]) + 0.5) * res

    def cell_centers(self) -> np.ndarray:
        axes = [self.axis_centers(j) for j in range(self.d)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack(mesh, axis=-1).reshape(-1, self.d)

    def center_of(self, cell) -> np.ndarray:
        idx = np.asarray(cell, dtype=int)
        return self.lower + (idx + 0.5) * self.resolution


def build_grid(
    scores: np.ndarray,
    cells_per_axis: int,
    padding_bandwidths: float,
    bw: "Bandwidth",
) -> RegularGrid:
    """Grid spanning the data range padded by p scaled bandwidths per side."""
    scores = np.atleast_2d(np.asarray(scores, dtype=float))
    if padding_bandwidths < 0:
        raise ValidationError("padding_bandwidths must be non-negative")
    pad = padding_bandwidths * bw.scaled
    lower = scores.min(axis=0) - pad
    upper = scores.max(axis=0) + pad
    counts = np.full(scores.shape[1], cells_per_axis, dtype=int)
    return RegularGrid(lower, upper, counts)


def locate_cell(grid: RegularGrid, x: np.ndarray):
    """Cell index tuple of x, or None when x lies outside the grid bounds."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x < grid.lower) or np.any(x > grid.upper):
        return None
    idx = np.floor((x - grid.lower) / grid.resolution).astype(int)
    return tuple(np.minimum(idx, grid.counts - 1))


def locate_cells(grid: RegularGrid, points: np.ndarray):
    """Vectorized locate_cell: (indices, inside mask) for many points."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    inside = np.all((points >= grid.lower) & (points <= grid.upper), axis=1)
    idx = np.floor((points - grid.lower) / grid.resolution).astype(int)
    idx = np.clip(idx, 0, grid.counts - 1)
    return idx, inside


@dataclass(frozen=True)
class ModeSet:
    """Retained density modes, sorted by descending density value."""

    cells: tuple
    centers: np.ndarray
    values: np.ndarray
    r: int

    def __len__(self) -> int:
        return len(self.cells)


@dataclass(frozen=True)
class RegionSet:
    """Disjoint level-set regions, one per retained mode.

    ``cell_label`` holds 1-based region ids per grid cell (0 = unassigned);
    ``thresholds[g]`` is the minimum density inside region g+1, so each
    region is exactly the Moore-connected component of {density >= threshold}
    that contains its mode.
    """

    masks: tuple
    thresholds: np.ndarray
    cell_label: np.ndarray

    def __len__(self) -> int:
        return len(self.masks)


def find_modes(density: "DensityEstimate", r: int) -> ModeSet:
    """Local maxima surviving the +-r-cell window filter."""
    if r < 1:
        raise ValidationError("mode window radius r must be at least 1")
    vals = density.values
    if vals.size == 0:
        raise DataError("empty density estimate")
    win = ndimage.maximum_filter(vals, size=2 * r + 1, mode="constant", cval=-np.inf)
    candidates = np.argwhere(vals == win)
    kept = []
    shape = vals.shape
    for idx in candidates:
        block_slices = tuple(
            slice(max(i - r, 0), min(i + r + 1, s)) for i, s in zip(idx, shape)
        )
        block = vals[block_slices]
        peak = vals[tuple(idx)]
        ties = np.argwhere(block == peak)
        ties += np.array([s.start for s in block_slices])
        order = np.lexsort(ties.T[::-1])
        if np.array_equal(ties[order[0]], idx):
            kept.append(tuple(int(i) for i in idx))
    kept.sort(key=lambda cell: (-vals[cell], cell))
    centers = np.array([density.grid.center_of(c) for c in kept]).reshape(
        len(kept), density.grid.d
    )
    values = np.array([vals[c] for c in kept])
    return ModeSet(cells=tuple(kept), centers=centers, values=values, r=r)


def _component_mask(vals, threshold, cell, structure):
    """Moore-connected component of {vals > threshold} containing cell."""
    labels, _ = ndimage.label(vals > threshold, structure=structure)
    lid = labels[cell]
    if lid == 0:
        return None
    return labels == lid


def extract_regions(density: "DensityEstimate", modes: ModeSet) -> RegionSet:
    """Largest pure upper-level-set region around each retained mode.

    For mode g the threshold is lowered through the distinct density values
    (located by bisection; component connectivity is monotone in the
    threshold) until the component containing g would absorb another
    retained mode; the region is the component just before that.
    """
    if len(modes) == 0:
        raise DataError("extract_regions requires at least one retained mode")
    vals = density.values
    structure = np.ones((3,) * vals.ndim, dtype=bool)
    # trailing -inf level makes the full grid reachable even when the only
    # bridge between modes runs through a minimum-valued cell
    levels = np.concatenate([np.unique(vals)[::-1], [-np.inf]])
    mode_cells = list(modes.cells)

    def impure(i: int, cell) -> bool:
        labels, _ = ndimage.label(vals > levels[i], structure=structure)
        lid = labels[cell]
        if lid == 0:
            return False
        return sum(1 for mc in mode_cells if labels[mc] == lid) > 1

    masks = []
    for cell in mode_cells:
        if len(mode_cells) == 1 or not impure(len(levels) - 1, cell):
            masks.append(np.ones(vals.shape, dtype=bool))
            continue
        lo, hi = 0, len(levels) - 1  # pure at lo, impure at hi
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if impure(mid, cell):
                hi = mid
            else:
                lo = mid
        mask = _component_mask(vals, levels[lo], cell, structure)
        masks.append(mask)
    thresholds = np.array([vals[m].min() for m in masks])
    cell_label = np.zeros(vals.shape, dtype=int)
    for g, mask in enumerate(masks, start=1):
        cell_label[mask] = g
    return RegionSet(
        masks=tuple(masks), thresholds=thresholds, cell_label=cell_label
    )
