"""Eigenvalue-decay diagnostics and the closed-form ball-volume factor."""

from __future__ import annotations

from dataclasses import dataclass
from math import lgamma, log, pi, exp

import numpy as np

from .errors import DataError

DEFAULT_C = 1.0 / 3.0
DEFAULT_TAIL_TOL = 0.05


@dataclass(frozen=True)
class DecayReport:
    """Per-depth decay statistics over the positive spectrum prefix.

    exponential_stat[d-1] = (tail sum after d) / lambda_d
    super_ratio[d-1]      = lambda_{d+1} / lambda_d
    hyper_stat[d-1]       = d * (tail sum after d) * (sum of 1/lambda_j, j<=d)

    ``classification`` is the strongest regime whose tail test passes:
    hyper, super, exponential, or none.
    """

    exponential_stat: np.ndarray
    super_ratio: np.ndarray
    hyper_stat: np.ndarray
    classification: str
    constant: float
    tail_tol: float
    n_used: int

    def to_dict(self) -> dict:
        return {
            "classification": self.classification,
            "constant": self.constant,
            "tail_tol": self.tail_tol,
            "n_used": self.n_used,
            "exponential_stat": self.exponential_stat.tolist(),
            "super_ratio": self.super_ratio.tolist(),
            "hyper_stat": self.hyper_stat.tolist(),
        }


def classify_decay(
    eigenvalues,
    C: float = DEFAULT_C,
    tail_tol: float = DEFAULT_TAIL_TOL,
    rel_floor: float = 0.0,
) -> DecayReport:
    """Classify the decay regime of a non-increasing positive spectrum.

    Statistics are computed on the positive prefix (values above
    ``rel_floor`` times the leading eigenvalue; set rel_floor around 1e-12
    when feeding empirical spectra so eigensolver noise is ignored).
    Limit conditions are checked on the last quarter of the prefix against
    ``tail_tol``; the exponential bound is a sup over all depths.
    """
    lam = np.asarray(eigenvalues, dtype=float)
    if lam.ndim != 1:
        raise DataError("eigenvalues must be a one-dimensional sequence")
    if C <= 0 or tail_tol <= 0:
        raise DataError("C and tail_tol must be positive")
    if lam.size and np.any(np.diff(lam) > 0):
        raise DataError("eigenvalues must be non-increasing")
    pos = lam > (rel_floor * lam[0] if lam.size else 0.0)
    p = int(np.argmin(pos)) if not pos.all() else lam.size
    if p < 4:
        raise DataError("need at least 4 positive eigenvalues")
    lam = lam[:p]
    tails = np.cumsum(lam[::-1])[::-1]  # tails[d] = sum_{j >= d+1} lam_j with 0-based d
    tail_after = np.concatenate([tails[1:], [0.0]])
    depths = np.arange(1, p)  # statistics at d = 1 .. p-1
    e_stat = tail_after[:-1] / lam[:-1]
    r_stat = lam[1:] / lam[:-1]
    h_stat = depths * tail_after[:-1] * np.cumsum(1.0 / lam)[:-1]
    k = max(1, -(-(p - 1) // 4))  # ceil of 25% of the depth range
    is_hyper = bool(np.max(h_stat[-k:]) < tail_tol)
    is_super = bool(np.max(r_stat[-k:]) < tail_tol)
    is_exp = bool(np.max(e_stat) < C)
    if is_hyper:
        label = "hyper"
    elif is_super:
        label = "super"
    elif is_exp:
        label = "exponential"
    else:
        label = "none"
    return DecayReport(
        exponential_stat=e_stat,
        super_ratio=r_stat,
        hyper_stat=h_stat,
        classification=label,
        constant=C,
        tail_tol=tail_tol,
        n_used=p,
    )


def ball_volume(d: int, eps: float) -> float:
    """Volume of the d-dimensional ball of radius eps, via log-gamma."""
    if d < 1 or int(d) != d:
        raise DataError("dimension d must be a positive integer")
    if eps <= 0:
        raise DataError("radius eps must be positive")
    return exp(d * log(eps) + 0.5 * d * log(pi) - lgamma(0.5 * d + 1.0))
