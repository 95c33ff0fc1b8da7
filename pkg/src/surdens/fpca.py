"""Empirical Karhunen-Loeve decomposition of a functional sample.

The weighted covariance eigenproblem is symmetrized with the square root of
the quadrature weights, so eigenfunctions come out orthonormal under the
grid inner product and score variances (divisor n) equal the eigenvalues.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError, NumericalError
from .funcdata import AbscissaGrid, FunctionalSample

# eigenvalues this far below the top of the spectrum are numerical noise
REL_EIGEN_FLOOR = 1e-12


@dataclass(frozen=True)
class FpcaModel:
    """Fitted decomposition: mean, spectrum, eigenfunctions, and scores.

    ``eigenvalues`` and ``fev`` cover the whole computable spectrum
    (length min(n-1, m)); ``eigenfunctions`` (J x m) and ``scores``
    (n x J) keep only the ``max_components`` leading components.
    """

    mean: np.ndarray
    eigenvalues: np.ndarray
    eigenfunctions: np.ndarray
    scores: np.ndarray
    grid: AbscissaGrid
    fev: np.ndarray

    @property
    def n_components(self) -> int:
        return self.eigenfunctions.shape[0]


def fit_fpca(sample: FunctionalSample, max_components: int) -> FpcaModel:
    """Fit the weighted-covariance eigendecomposition.

    Covariance uses divisor n so that score columns have empirical variance
    (divisor n) exactly equal to the matching eigenvalue. Eigenfunction signs
    follow the largest-|entry|-positive convention; round-off negative
    eigenvalues are clamped to zero.
    """
    n, m = sample.n, sample.m
    if n < 2:
        raise DataError("fit_fpca needs at least two curves")
    rank_cap = min(n - 1, m)
    if not 1 <= max_components <= rank_cap:
        raise DataError(
            f"max_components must be in [1, {rank_cap}] for n={n}, m={m}"
        )
    w = sample.grid.weights
    mean = sample.values.mean(axis=0)
    xc = sample.values - mean
    cov = (xc.T @ xc) / n
    sw = np.sqrt(w)
    sym = (sw[:, None] * cov) * sw[None, :]
    total = np.trace(sym)
    if total <= 0.0:
        raise NumericalError("degenerate covariance: all curves are identical")
    evals, evecs = np.linalg.eigh(sym)
    evals = evals[::-1][:rank_cap]
    evecs = evecs[:, ::-1][:, :rank_cap]
    evals = np.where(evals > 0.0, evals, 0.0)
    if evals[max_components - 1] <= REL_EIGEN_FLOOR * evals[0]:
        raise NumericalError(
            f"covariance rank below requested {max_components} components"
        )
    # back-transform to quadrature-orthonormal eigenfunctions
    xi = (evecs[:, :max_components] / sw[:, None]).T
    flip = np.where(xi[np.arange(max_components), np.argmax(np.abs(xi), axis=1)] < 0)
    xi[flip] = -xi[flip]
    scores = xc @ (w[None, :] * xi).T
    csum = np.cumsum(evals)
    fev_profile = csum / csum[-1]
    return FpcaModel(
        mean=mean,
        eigenvalues=evals,
        eigenfunctions=xi,
        scores=scores,
        grid=sample.grid,
        fev=fev_profile,
    )


def fev(model: FpcaModel, d: int) -> float:
    """Cumulative fraction of variance explained by the first d components."""
    if not 1 <= d <= model.eigenvalues.size:
        raise DataError(f"d must be in [1, {model.eigenvalues.size}]")
    return float(model.fev[d - 1])


def project(model: FpcaModel, curve: np.ndarray, d: int) -> np.ndarray:
    """Scores of a curve on the first d eigenfunctions (mean removed)."""
    curve = np.asarray(curve, dtype=float)
    if curve.shape != (model.grid.m,):
        raise DataError("curve length does not match the model grid")
    if not 1 <= d <= model.n_components:
        raise DataError(f"d must be in [1, {model.n_components}]")
    centered = curve - model.mean
    return model.eigenfunctions[:d] @ (model.grid.weights * centered)


def modal_curve(model: FpcaModel, mode: np.ndarray) -> np.ndarray:
    """Reconstruct mean + sum_j mode_j * eigenfunction_j on the grid."""
    mode = np.asarray(mode, dtype=float)
    if mode.ndim != 1 or mode.size > model.n_components:
        raise DataError(
            f"mode vector must have at most {model.n_components} entries"
        )
    return model.mean + mode @ model.eigenfunctions[: mode.size]


def model_to_dict(model: FpcaModel) -> dict:
    """JSON-ready export; floats round-trip exactly via repr serialization."""
    return {
        "mean": model.mean.tolist(),
        "eigenvalues": model.eigenvalues.tolist(),
        "eigenfunctions": model.eigenfunctions.tolist(),
        "fev": model.fev.tolist(),
        "grid": model.grid.points.tolist(),
    }


def model_from_dict(doc: dict) -> FpcaModel:
    grid = AbscissaGrid(np.asarray(doc["grid"], dtype=float))
    eigenfunctions = np.asarray(doc["eigenfunctions"], dtype=float)
    return FpcaModel(
        mean=np.asarray(doc["mean"], dtype=float),
        eigenvalues=np.asarray(doc["eigenvalues"], dtype=float),
        eigenfunctions=eigenfunctions,
        scores=np.asarray(doc.get("scores", np.zeros((0, eigenfunctions.shape[0])))),
        grid=grid,
        fev=np.asarray(doc["fev"], dtype=float),
    )
