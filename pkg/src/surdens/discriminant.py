"""Kernel Bayes discriminant on group-wise PC scores.

Each group gets a projection basis (its own covariance eigenfunctions, or
the pooled within-covariance eigenfunctions in homoscedastic mode), a score
cloud, and a Silverman bandwidth. A query is assigned to the group whose
prior-weighted score density is largest; ties go to the smallest group id.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .density import Bandwidth, KernelSpec, _kde_batch, silverman_bandwidth
from .errors import DataError, NumericalError, ValidationError
from .fpca import fit_fpca
from .funcdata import AbscissaGrid, FunctionalSample

MODES = ("heteroscedastic", "homoscedastic")


@dataclass(frozen=True)
class GroupModel:
    prior: float
    mean: np.ndarray
    basis: np.ndarray  # d x m eigenfunctions
    scores: np.ndarray  # n_g x d training scores
    bandwidth: Bandwidth


@dataclass(frozen=True)
class ClassifierModel:
    groups: Tuple[GroupModel, ...]
    d: int
    mode: str
    kernel: KernelSpec
    grid: AbscissaGrid

    @property
    def n_groups(self) -> int:
        return len(self.groups)


@dataclass(frozen=True)
class Prediction:
    label: int
    scores_per_group: np.ndarray
    zero_evidence: bool


def _pooled_basis(sample, labels, group_ids, priors, d):
    """Eigenfunctions of W = sum_g prior_g * Cov_g under the grid weights."""
    w = sample.grid.weights
    m = sample.m
    pooled = np.zeros((m, m))
    for g, prior in zip(group_ids, priors):
        vals = sample.values[labels == g]
        xc = vals - vals.mean(axis=0)
        pooled += prior * (xc.T @ xc) / vals.shape[0]
    sw = np.sqrt(w)
    sym = (sw[:, None] * pooled) * sw[None, :]
    if np.trace(sym) <= 0:
        raise NumericalError("degenerate pooled covariance")
    evals, evecs = np.linalg.eigh(sym)
    evals, evecs = evals[::-1], evecs[:, ::-1]
    if evals[d - 1] <= 1e-12 * evals[0]:
        raise NumericalError(f"pooled spectrum rank below {d}")
    xi = (evecs[:, :d] / sw[:, None]).T
    flip = np.where(xi[np.arange(d), np.argmax(np.abs(xi), axis=1)] < 0)
    xi[flip] = -xi[flip]
    return xi


def train(
    sample: FunctionalSample,
    labels,
    d: int,
    mode: str = "heteroscedastic",
    kernel: str = "gaussian",
) -> ClassifierModel:
    """Fit per-group projections, score clouds, priors, and bandwidths."""
    labels = np.asarray(labels).ravel().astype(int)
    if labels.size != sample.n:
        raise DataError("labels must match the number of curves")
    if mode not in MODES:
        raise ValidationError(f"mode must be one of {MODES}")
    n_groups = labels.max()
    group_ids = np.arange(1, n_groups + 1)
    counts = np.array([np.sum(labels == g) for g in group_ids])
    if labels.min() < 1:
        raise DataError("group labels must be positive integers starting at 1")
    if np.any(counts == 0):
        missing = group_ids[counts == 0].tolist()
        raise DataError(f"missing group ids in 1..{n_groups}: {missing}")
    if np.any(counts < 2):
        small = group_ids[counts < 2].tolist()
        raise DataError(f"groups {small} have fewer than 2 observations")
    priors = counts / labels.size
    w = sample.grid.weights
    shared = None
    if mode == "homoscedastic":
        shared = _pooled_basis(sample, labels, group_ids, priors, d)
    groups = []
    for g, prior in zip(group_ids, priors):
        vals = sample.values[labels == g]
        gsample = FunctionalSample(sample.grid, vals)
        if mode == "heteroscedastic":
            gm = fit_fpca(gsample, d)
            mean, basis = gm.mean, gm.eigenfunctions
            scores = gm.scores
        else:
            mean = vals.mean(axis=0)
            basis = shared
            scores = (vals - mean) @ (w[None, :] * basis).T
        groups.append(
            GroupModel(
                prior=float(prior),
                mean=mean,
                basis=basis,
                scores=scores,
                bandwidth=silverman_bandwidth(scores),
            )
        )
    return ClassifierModel(
        groups=tuple(groups),
        d=d,
        mode=mode,
        kernel=KernelSpec(kernel, d),
        grid=sample.grid,
    )


def discriminant_values(model: ClassifierModel, curves: np.ndarray) -> np.ndarray:
    """Matrix of prior * group-density values, one row per query curve."""
    curves = np.atleast_2d(np.asarray(curves, dtype=float))
    if curves.shape[1] != model.grid.m:
        raise DataError("query curves do not match the training grid")
    w = model.grid.weights
    out = np.empty((curves.shape[0], model.n_groups))
    for j, grp in enumerate(model.groups):
        qscores = (curves - grp.mean) @ (w[None, :] * grp.basis).T
        out[:, j] = grp.prior * _kde_batch(
            grp.scores, grp.bandwidth, model.kernel, qscores
        )
    return out


def predict(model: ClassifierModel, curve: np.ndarray) -> Prediction:
    """Classify one curve; ties and zero evidence resolve to the smallest id."""
    vals = discriminant_values(model, curve)[0]
    label = int(np.argmax(vals)) + 1
    return Prediction(
        label=label,
        scores_per_group=vals,
        zero_evidence=bool(np.all(vals == 0.0)),
    )


def predict_labels(model: ClassifierModel, curves: np.ndarray) -> np.ndarray:
    vals = discriminant_values(model, curves)
    return np.argmax(vals, axis=1) + 1


def model_to_dict(model: ClassifierModel) -> dict:
    return {
        "d": model.d,
        "mode": model.mode,
        "kernel": model.kernel.profile,
        "grid": model.grid.points.tolist(),
        "groups": [
            {
                "prior": g.prior,
                "mean": g.mean.tolist(),
                "basis": g.basis.tolist(),
                "scores": g.scores.tolist(),
                "h": g.bandwidth.h.tolist(),
                "delta": g.bandwidth.delta,
            }
            for g in model.groups
        ],
    }


def model_from_dict(doc: dict) -> ClassifierModel:
    groups = tuple(
        GroupModel(
            prior=float(g["prior"]),
            mean=np.asarray(g["mean"], dtype=float),
            basis=np.asarray(g["basis"], dtype=float),
            scores=np.asarray(g["scores"], dtype=float),
            bandwidth=Bandwidth(np.asarray(g["h"], dtype=float), float(g["delta"])),
        )
        for g in doc["groups"]
    )
    return ClassifierModel(
        groups=groups,
        d=int(doc["d"]),
        mode=doc["mode"],
        kernel=KernelSpec(doc["kernel"], int(doc["d"])),
        grid=AbscissaGrid(np.asarray(doc["grid"], dtype=float)),
    )


@dataclass(frozen=True)
class CrossValidationResult:
    errors: np.ndarray
    mean: float
    sd: float


def cross_validate(
    sample: FunctionalSample,
    labels,
    d: int,
    mode: str = "heteroscedastic",
    kernel: str = "gaussian",
    repeats: int = 20,
    train_fraction: float = 2.0 / 3.0,
    seed: int = 0,
) -> CrossValidationResult:
    """Repeated stratified holdout error of the classifier.

    Each repeat draws a per-group proportional split from its own stream
    derived from ``seed``, trains on the ``train_fraction`` part, and scores
    misclassification on the rest.
    """
    labels = np.asarray(labels).ravel().astype(int)
    if not 0.0 < train_fraction < 1.0:
        raise ValidationError("train_fraction must lie strictly between 0 and 1")
    if repeats < 1:
        raise ValidationError("repeats must be positive")
    group_ids = np.unique(labels)
    errors = np.empty(repeats)
    for rep, child in enumerate(np.random.SeedSequence(seed).spawn(repeats)):
        rng = np.random.default_rng(child)
        train_idx, test_idx = [], []
        for g in group_ids:
            members = np.flatnonzero(labels == g)
            perm = rng.permutation(members)
            n_train = int(round(train_fraction * members.size))
            if n_train < 2 or n_train >= members.size:
                raise ValidationError(
                    f"group {g}: infeasible fold sizes at train_fraction="
                    f"{train_fraction}"
                )
            train_idx.append(perm[:n_train])
            test_idx.append(perm[n_train:])
        tr = np.concatenate(train_idx)
        te = np.concatenate(test_idx)
        fold_model = train(
            FunctionalSample(sample.grid, sample.values[tr]),
            labels[tr],
            d,
            mode=mode,
            kernel=kernel,
        )
        pred = predict_labels(fold_model, sample.values[te])
        errors[rep] = float(np.mean(pred != labels[te]))
    return CrossValidationResult(
        errors=errors,
        mean=float(errors.mean()),
        sd=float(errors.std(ddof=1)) if repeats > 1 else 0.0,
    )
