"""Unbiased polynomial-kernel MMD^2 and subset-resampled KID.

The estimator follows the standard U-statistic form

    MMD^2 = sum_{i!=j} k(x_i,x_j)/(m(m-1)) + sum_{i!=j} k(y_i,y_j)/(n(n-1))
            - 2 sum_{i,j} k(x_i,y_j)/(mn)

with k(x,y) = (gamma <x,y> + coef)^degree. Kernel sums are accumulated with
``math.fsum`` (exactly rounded), which makes the result bit-identical under
row permutations and argument swaps and independent of evaluation order.

KID repeats the estimator over random subsets and reports the mean and the
population standard deviation. Each repetition r draws its indices from its
own PCG32 stream seeded with splitmix64(seed) XOR r, so the estimate does not
depend on scheduling and is reproducible from (X, Y, config) alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .features import FeatureSet
from .rng import Pcg32, stream_seed


@dataclass(frozen=True)
class KernelConfig:
    """Polynomial kernel parameters; gamma=None means 1/dim at evaluation."""

    degree: int = 3
    gamma: float | None = None
    coef: float = 1.0

    def __post_init__(self):
        if self.degree < 1:
            raise ValueError(f"degree must be >= 1, got {self.degree}")
        if self.gamma is not None and not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if self.coef < 0:
            raise ValueError(f"coef must be non-negative, got {self.coef}")

    def gamma_for_dim(self, dim: int) -> float:
        return self.gamma if self.gamma is not None else 1.0 / dim


@dataclass(frozen=True)
class KidConfig:
    subset_size: int = 100
    n_subsets: int = 100
    seed: int = 0
    kernel: KernelConfig = field(default_factory=KernelConfig)

    def __post_init__(self):
        if self.subset_size < 2:
            raise ValueError(f"subset_size must be >= 2, got {self.subset_size}")
        if self.n_subsets < 1:
            raise ValueError(f"n_subsets must be >= 1, got {self.n_subsets}")


@dataclass(frozen=True)
class KidEstimate:
    """Subset-resampled KID: mean and population std over subset MMD^2 values.

    ``subset_size`` is the effective size actually drawn, i.e.
    min(configured size, both set counts).
    """

    mean: float
    std: float
    n_subsets: int
    subset_size: int


def poly_kernel(x: np.ndarray, y: np.ndarray, cfg: KernelConfig) -> float:
    """Evaluate (gamma <x,y> + coef)^degree for two vectors of equal length."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError(f"vector length mismatch: {x.shape} vs {y.shape}")
    gamma = cfg.gamma_for_dim(x.shape[0])
    return float((gamma * np.dot(x, y) + cfg.coef) ** cfg.degree)


def _offdiag_sum(K: np.ndarray) -> float:
    mask = ~np.eye(K.shape[0], dtype=bool)
    return math.fsum(K[mask].tolist())


def _mmd2(X: np.ndarray, Y: np.ndarray, cfg: KernelConfig) -> float:
    """U-statistic over float64 row matrices (validation done by callers)."""
    m, n = X.shape[0], Y.shape[0]
    gamma = cfg.gamma_for_dim(X.shape[1])
    Kxx = (gamma * (X @ X.T) + cfg.coef) ** cfg.degree
    Kyy = (gamma * (Y @ Y.T) + cfg.coef) ** cfg.degree
    Kxy = (gamma * (X @ Y.T) + cfg.coef) ** cfg.degree
    xx = _offdiag_sum(Kxx) / (m * (m - 1))
    yy = _offdiag_sum(Kyy) / (n * (n - 1))
    xy = math.fsum(Kxy.ravel().tolist()) * 2.0 / (m * n)
    return xx + yy - xy


def mmd2_unbiased(X: FeatureSet, Y: FeatureSet, kernel: KernelConfig) -> float:
    """Unbiased MMD^2 between two feature sets (can be slightly negative)."""
    if X.dim != Y.dim:
        raise ValueError(f"dim mismatch: {X.dim} != {Y.dim}")
    if X.count < 2 or Y.count < 2:
        raise ValueError(f"count must be >= 2, got {X.count} and {Y.count}")
    return _mmd2(
        X.data.astype(np.float64), Y.data.astype(np.float64), kernel
    )


def kid_estimate(X: FeatureSet, Y: FeatureSet, cfg: KidConfig) -> KidEstimate:
    """KID over ``cfg.n_subsets`` independent without-replacement subsets.

    Subsets of X and Y are drawn fresh per repetition (partial Fisher-Yates
    over index arrays); repetitions are independent of each other and of any
    parallel execution order.
    """
    if X.dim != Y.dim:
        raise ValueError(f"dim mismatch: {X.dim} != {Y.dim}")
    if X.count < 2 or Y.count < 2:
        raise ValueError(f"count must be >= 2, got {X.count} and {Y.count}")
    m_eff = min(cfg.subset_size, X.count, Y.count)
    X64 = X.data.astype(np.float64)
    Y64 = Y.data.astype(np.float64)
    values = []
    for r in range(cfg.n_subsets):
        rng = Pcg32(stream_seed(cfg.seed, r))
        idx_x = rng.sample_indices(X.count, m_eff)
        idx_y = rng.sample_indices(Y.count, m_eff)
        values.append(_mmd2(X64[idx_x], Y64[idx_y], cfg.kernel))
    mean = math.fsum(values) / cfg.n_subsets
    var = math.fsum((v - mean) ** 2 for v in values) / cfg.n_subsets
    return KidEstimate(
        mean=mean, std=math.sqrt(var), n_subsets=cfg.n_subsets, subset_size=m_eff
    )
