"""Discretized curves on a shared abscissa grid: quadrature and preprocessing."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DataError


@dataclass(frozen=True)
class AbscissaGrid:
    """Strictly increasing abscissa points with trapezoidal quadrature weights.

    Instances are immutable; the weights are always the trapezoid weights of
    the points, so only ``points`` is supplied by the caller.
    """

    points: np.ndarray
    weights: np.ndarray = field(init=False)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 1 or pts.size < 2:
            raise DataError("grid needs at least two abscissa points")
        if not np.all(np.isfinite(pts)):
            raise DataError("grid points must be finite")
        if not np.all(np.diff(pts) > 0):
            raise DataError("grid points must be strictly increasing")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", trapezoid_weights(pts))

    @property
    def m(self) -> int:
        return self.points.size

    def is_equispaced(self, rtol: float = 1e-9) -> bool:
        steps = np.diff(self.points)
        return bool(np.all(np.abs(steps - steps[0]) <= rtol * abs(steps[0])))

    @staticmethod
    def equispaced(m: int, lo: float = 0.0, hi: float = 1.0) -> "AbscissaGrid":
        return AbscissaGrid(np.linspace(lo, hi, m))


def trapezoid_weights(points: np.ndarray) -> np.ndarray:
    """Trapezoidal quadrature weights for an increasing point set."""
    pts = np.asarray(points, dtype=float)
    w = np.zeros_like(pts)
    d = np.diff(pts)
    w[:-1] += 0.5 * d
    w[1:] += 0.5 * d
    return w


@dataclass(frozen=True)
class FunctionalSample:
    """n curves sampled at the common grid points (rows of ``values``)."""

    grid: AbscissaGrid
    values: np.ndarray

    def __post_init__(self):
        vals = np.atleast_2d(np.asarray(self.values, dtype=float))
        if vals.shape[1] != self.grid.m:
            raise DataError(
                f"curves have {vals.shape[1]} values, expected {self.grid.m}"
            )
        if vals.shape[0] < 1:
            raise DataError("sample must contain at least one curve")
        if not np.all(np.isfinite(vals)):
            raise DataError("curve values must be finite")
        object.__setattr__(self, "values", vals)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def m(self) -> int:
        return self.values.shape[1]


def inner_product(a: np.ndarray, b: np.ndarray, grid: AbscissaGrid) -> float:
    """Quadrature inner product sum_k w_k a_k b_k.

    The elementwise products are formed before a single deterministic
    reduction, so swapping the arguments is bit-exact.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != (grid.m,) or b.shape != (grid.m,):
        raise DataError("inner_product arguments must match the grid length")
    return float(np.sum(grid.weights * a * b))


def curve_norm(a: np.ndarray, grid: AbscissaGrid) -> float:
    """Quadrature L2 norm of a curve."""
    return float(np.sqrt(inner_product(a, a, grid)))


def second_derivative(sample: FunctionalSample) -> FunctionalSample:
    """Finite-difference second derivative of every curve.

    Central differences on interior points; second-order one-sided stencils
    at the two boundary points on each side. Requires an equispaced grid
    with at least five points. Exact for quadratics.
    """
    if sample.m < 5:
        raise DataError("second_derivative needs at least 5 grid points")
    if not sample.grid.is_equispaced():
        raise DataError("second_derivative requires an equispaced grid")
    h = sample.grid.points[1] - sample.grid.points[0]
    v = sample.values
    out = np.empty_like(v)
    out[:, 1:-1] = (v[:, :-2] - 2.0 * v[:, 1:-1] + v[:, 2:]) / h**2
    # one-sided 4-point stencils, O(h^2)
    out[:, 0] = (2 * v[:, 0] - 5 * v[:, 1] + 4 * v[:, 2] - v[:, 3]) / h**2
    out[:, -1] = (2 * v[:, -1] - 5 * v[:, -2] + 4 * v[:, -3] - v[:, -4]) / h**2
    return FunctionalSample(sample.grid, out)


def center(sample: FunctionalSample) -> tuple[np.ndarray, FunctionalSample]:
    """Pointwise mean curve and the mean-centered sample."""
    mean = sample.values.mean(axis=0)
    return mean, FunctionalSample(sample.grid, sample.values - mean)
