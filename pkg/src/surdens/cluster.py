"""Surrogate-density clustering pipeline.

Fit the score decomposition, estimate the score density on a grid, keep the
modes that survive the window filter, carve one upper-level-set region per
mode, mark the observations whose scores fall inside a region as that
region's prototypes, and propagate labels to everything else by nearest
prototype.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .density import Bandwidth, DensityEstimate, KernelSpec, kde_on_grid, silverman_bandwidth
from .errors import NumericalError, ValidationError
from .fpca import FpcaModel, fit_fpca, modal_curve, project
from .funcdata import FunctionalSample
from .modegrid import (
    DEFAULT_PADDING,
    ModeSet,
    RegionSet,
    build_grid,
    default_cells_per_axis,
    extract_regions,
    find_modes,
    locate_cells,
)


@dataclass(frozen=True)
class ClusterConfig:
    d: int = 3
    delta: float = 1.0
    r: int = 5
    cells_per_axis: Optional[int] = None
    kernel: str = "gaussian"
    padding_bandwidths: float = DEFAULT_PADDING

    def __post_init__(self):
        if self.d < 1:
            raise ValidationError("dimension d must be at least 1")
        if self.delta <= 0:
            raise ValidationError("bandwidth scale delta must be positive")
        if self.r < 1:
            raise ValidationError("mode window radius r must be at least 1")

    def resolved_cells(self) -> int:
        if self.cells_per_axis is not None:
            return self.cells_per_axis
        return default_cells_per_axis(self.d)


@dataclass(frozen=True)
class ClusterResult:
    labels: np.ndarray
    g_hat: int
    prototype_flags: np.ndarray
    modes: ModeSet
    regions: RegionSet
    modal_curves: np.ndarray
    density: DensityEstimate
    model: FpcaModel
    scores: np.ndarray
    config: ClusterConfig
    dropped_regions: tuple = field(default=())


def cluster(sample: FunctionalSample, config: ClusterConfig) -> ClusterResult:
    """Run the five pipeline steps and label every observation."""
    model = fit_fpca(sample, config.d)
    scores = model.scores
    bw = silverman_bandwidth(scores).with_delta(config.delta)
    kernel = KernelSpec(config.kernel, config.d)
    grid = build_grid(scores, config.resolved_cells(), config.padding_bandwidths, bw)
    density = kde_on_grid(scores, bw, kernel, grid)
    modes = find_modes(density, config.r)
    regions = extract_regions(density, modes)

    idx, inside = locate_cells(grid, scores)
    region_of = np.zeros(sample.n, dtype=int)
    region_of[inside] = regions.cell_label[tuple(idx[inside].T)]

    kept, dropped = [], []
    for g in range(1, len(regions) + 1):
        if np.any(region_of == g):
            kept.append(g)
        else:
            dropped.append(g)
    if not kept:
        raise NumericalError("no region contains any observation score")

    labels = np.zeros(sample.n, dtype=int)
    for new_id, g in enumerate(kept, start=1):
        labels[region_of == g] = new_id
    prototype_flags = labels > 0

    proto_idx = np.flatnonzero(prototype_flags)
    rest = np.flatnonzero(~prototype_flags)
    if rest.size:
        dist = ((scores[rest, None, :] - scores[None, proto_idx, :]) ** 2).sum(-1)
        labels[rest] = labels[proto_idx[np.argmin(dist, axis=1)]]

    keep0 = [g - 1 for g in kept]
    masks = tuple(regions.masks[i] for i in keep0)
    cell_label = np.zeros_like(regions.cell_label)
    for new_id, mask in enumerate(masks, start=1):
        cell_label[mask] = new_id
    kept_regions = RegionSet(
        masks=masks,
        thresholds=regions.thresholds[keep0],
        cell_label=cell_label,
    )
    kept_modes = ModeSet(
        cells=tuple(modes.cells[i] for i in keep0),
        centers=modes.centers[keep0],
        values=modes.values[keep0],
        r=modes.r,
    )
    curves = np.array([modal_curve(model, c) for c in kept_modes.centers])
    return ClusterResult(
        labels=labels,
        g_hat=len(kept),
        prototype_flags=prototype_flags,
        modes=kept_modes,
        regions=kept_regions,
        modal_curves=curves,
        density=density,
        model=model,
        scores=scores,
        config=config,
        dropped_regions=tuple(dropped),
    )


def assign_new(result: ClusterResult, model: FpcaModel, curve: np.ndarray) -> int:
    """Label an out-of-sample curve by its nearest prototype in score space."""
    q = project(model, curve, result.config.d)
    proto_idx = np.flatnonzero(result.prototype_flags)
    dist = ((result.scores[proto_idx] - q) ** 2).sum(axis=1)
    return int(result.labels[proto_idx[np.argmin(dist)]])
