"""Two-interlocked-horseshoes functional mixture generator.

Curves are finite Fourier expansions X_i(t) = sum_l sqrt(beta_l) tau_il
psi_l(t) with beta_l = 0.7 * 3^-l. The first three coefficients place each
group on a noised unit semicircle; the two semicircles lie on orthogonal
planes and are translated to +-k along the third coordinate, so the score
clouds interlock. Remaining coefficients are pure noise.

Randomness: numpy PCG64 generators derived from one SeedSequence. The root
seed spawns a group-assignment stream and one stream per curve (angle via
two Gamma(5,1) draws, then L standard normals), so generation is
reproducible curve by curve regardless of evaluation order. Gamma variates
use numpy's standard_gamma (Marsaglia-Tsang rejection sampling).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .errors import ValidationError
from .funcdata import AbscissaGrid, FunctionalSample


@dataclass(frozen=True)
class HorseshoeConfig:
    n_per_group: Tuple[int, int] = (300, 300)
    k: float = 0.5
    sigma: float = float(np.sqrt(0.005))
    L: int = 150
    m: int = 100
    seed: int = 0
    group_probs: Optional[Tuple[float, float]] = None

    def __post_init__(self):
        n1, n2 = self.n_per_group
        if n1 < 1 or n2 < 1:
            raise ValidationError("group sizes must be positive")
        if self.L < 4:
            raise ValidationError("basis size L must be at least 4")
        if self.m < 2:
            raise ValidationError("need at least 2 discretization points")
        if self.sigma < 0:
            raise ValidationError("sigma must be non-negative")
        if not 0 < self.k:
            raise ValidationError("k must be positive")
        if not 0 < self.k < 1:
            warnings.warn("k outside (0,1): groups become linearly separable")
        if self.sigma >= self.k / 3:
            warnings.warn("sigma >= k/3: groups may overlap substantially")
        if self.group_probs is not None:
            p1, p2 = self.group_probs
            if not (0 < p1 < 1) or abs(p1 + p2 - 1.0) > 1e-12:
                raise ValidationError("group_probs must be (p, 1-p) with 0<p<1")

    @property
    def n(self) -> int:
        return self.n_per_group[0] + self.n_per_group[1]


def fourier_basis(L: int, m: int) -> np.ndarray:
    """Rows l = 1..L: sqrt2 sin(2 pi q t - pi) for odd l, cos for even, q = ceil(l/2)."""
    t = np.linspace(0.0, 1.0, m)
    basis = np.empty((L, m))
    for l in range(1, L + 1):
        q = (l + 1) // 2
        arg = 2.0 * np.pi * q * t - np.pi
        basis[l - 1] = np.sqrt(2.0) * (np.sin(arg) if l % 2 == 1 else np.cos(arg))
    return basis


def beta55_scaled(rng: np.random.Generator) -> float:
    """One Beta(5,5) draw via a Gamma(5,1) ratio, rescaled to [-pi, pi]."""
    g1 = rng.standard_gamma(5.0)
    g2 = rng.standard_gamma(5.0)
    return 2.0 * np.pi * (g1 / (g1 + g2)) - np.pi


def generate(config: HorseshoeConfig) -> tuple[FunctionalSample, np.ndarray]:
    """Draw one sample; returns (curves, group labels in {1, 2})."""
    root = np.random.SeedSequence(config.seed)
    group_seq, curves_seq = root.spawn(2)
    n = config.n
    if config.group_probs is not None:
        grng = np.random.default_rng(group_seq)
        labels = np.where(grng.random(n) < config.group_probs[0], 1, 2)
    else:
        n1, n2 = config.n_per_group
        labels = np.concatenate([np.full(n1, 1), np.full(n2, 2)])
    L, m = config.L, config.m
    beta = 0.7 * 3.0 ** (-np.arange(1, L + 1))
    basis = fourier_basis(L, m)
    tau = np.empty((n, L))
    for i, child in enumerate(curves_seq.spawn(n)):
        rng = np.random.default_rng(child)
        theta = beta55_scaled(rng)
        eps = rng.standard_normal(L)
        g = labels[i]
        rotation = 0.5 * np.pi * (g == 2)
        tau[i, 0] = np.sin(theta) * np.cos(rotation) + config.sigma * eps[0]
        tau[i, 1] = np.sin(theta) * np.sin(rotation) + config.sigma * eps[1]
        tau[i, 2] = np.cos(theta) + (-1.0) ** g * config.k + config.sigma * eps[2]
        tau[i, 3:] = np.sqrt(0.1) * eps[3:]
    values = (tau * np.sqrt(beta)) @ basis
    sample = FunctionalSample(AbscissaGrid.equispaced(m), values)
    return sample, labels
