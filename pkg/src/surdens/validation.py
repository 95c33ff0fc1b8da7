"""Clustering validation: purity, Calinski-Harabasz, misclassification."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import DataError


@dataclass(frozen=True)
class ValidationScores:
    purity: float
    ch: float
    k_used: int
    misclassification: Optional[float] = None


def _check_pair(a, b):
    a = np.asarray(a).ravel()
    b = np.asarray(b).ravel()
    if a.size != b.size:
        raise DataError("label vectors must have equal length")
    if a.size == 0:
        raise DataError("label vectors must be non-empty")
    return a, b


def purity(cluster_labels, class_labels) -> float:
    """Weighted majority-class fraction: sum_g (n_g/n) * max_j n_gj/n_g."""
    cl, cs = _check_pair(cluster_labels, class_labels)
    n = cl.size
    total = 0
    for g in np.unique(cl):
        _, counts = np.unique(cs[cl == g], return_counts=True)
        total += counts.max()
    return total / n


def calinski_harabasz(points: np.ndarray, cluster_labels) -> float:
    """(Tr S_B / (K-1)) / (Tr S_W / (n-K)) with unnormalized scatter sums.

    Returns 0 for a single cluster and inf when the within-scatter
    vanishes with K > 1.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    labels = np.asarray(cluster_labels).ravel()
    n = points.shape[0]
    if labels.size != n:
        raise DataError("points and cluster labels must have equal length")
    uniq = np.unique(labels)
    k = uniq.size
    if k == 1:
        return 0.0
    if n <= k:
        raise DataError("calinski_harabasz needs more points than clusters")
    overall = points.mean(axis=0)
    tr_w = 0.0
    tr_b = 0.0
    for g in uniq:
        pts = points[labels == g]
        c = pts.mean(axis=0)
        tr_w += float(np.sum((pts - c) ** 2))
        tr_b += pts.shape[0] * float(np.sum((c - overall) ** 2))
    if tr_w == 0.0:
        return float("inf")
    return (tr_b / (k - 1)) / (tr_w / (n - k))


def misclassification(cluster_labels, class_labels, matching: str = "auto") -> float:
    """Error after matching cluster ids to class ids.

    matching="auto": optimal one-to-one assignment when the cluster and
    class counts agree, majority (many-to-one) mapping otherwise.
    matching="assignment": optimal one-to-one partial assignment always;
    clusters left unmatched count entirely as errors. This is the
    convention used by the simulation harness, where over-segmentation
    must be penalized.
    matching="majority": each cluster maps to its modal class.
    """
    cl, cs = _check_pair(cluster_labels, class_labels)
    if matching not in ("auto", "assignment", "majority"):
        raise DataError(f"unknown matching scheme: {matching!r}")
    n = cl.size
    cl_ids = np.unique(cl)
    cs_ids = np.unique(cs)
    conf = np.zeros((cl_ids.size, cs_ids.size))
    for a, u in enumerate(cl_ids):
        for b, v in enumerate(cs_ids):
            conf[a, b] = np.sum((cl == u) & (cs == v))
    if matching == "majority" or (matching == "auto" and cl_ids.size != cs_ids.size):
        return 1.0 - conf.max(axis=1).sum() / n
    side = max(cl_ids.size, cs_ids.size)
    padded = np.zeros((side, side))
    padded[: cl_ids.size, : cs_ids.size] = conf
    rows, cols = linear_sum_assignment(-padded)
    return 1.0 - padded[rows, cols].sum() / n
