"""Seeded synthetic-data generators for the simulation studies.

All randomness flows through counter-based Philox streams keyed by
``(seed, stream path)``, so every generator is a pure function of its seed and
independent replicates can be dispatched to workers in any order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import BlockPartition
from .errors import BlockTooLarge, NegativeIntensity

SCENARIO_FIXED_SPAN = 45  # fixed side of the scenario missing rectangles


def rng_stream(seed: int, *path: int) -> np.random.Generator:
    """Deterministic, splittable stream for (seed, sub-stream path)."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=path)))


@dataclass(frozen=True)
class GenSpec:
    kind: str  # lowrank_orthogonal | approx_lowrank | poisson | logistic_design
    p1: int
    p2: int
    r: int
    seed: int
    alpha: float = 0.0
    lambda0: float = 1.0

    def __post_init__(self):
        if self.r > min(self.p1, self.p2):
            raise ValueError("r must not exceed min(p1, p2)")
        if self.alpha < 0:
            raise ValueError("alpha must be nonnegative")
        if self.lambda0 <= 0:
            raise ValueError("lambda0 must be positive")


@dataclass(frozen=True)
class MissSpec:
    theta_kind: str  # uniform_scaled | band
    level: float  # c for uniform_scaled, eta for band
    seed: int

    def __post_init__(self):
        if not (0 <= self.level < 1):
            raise ValueError("missingness level must be in [0, 1)")


@dataclass(frozen=True)
class LogisticTruth:
    x: np.ndarray
    beta0: float
    beta1: np.ndarray
    labels: np.ndarray


def haar_orthonormal(p: int, k: int, rng: np.random.Generator) -> np.ndarray:
    """Uniformly random p x k orthonormal columns (QR of a Gaussian matrix,
    with the R-diagonal sign fix that makes the distribution exactly Haar)."""
    g = rng.standard_normal((p, k))
    q, r = np.linalg.qr(g)
    return q * np.sign(np.where(np.diag(r) == 0, 1.0, np.diag(r)))


def gen_lowrank(spec: GenSpec) -> np.ndarray:
    """Rank-r product of independent Haar orthonormal factors; all nonzero
    singular values equal 1."""
    rng = rng_stream(spec.seed, 0)
    u = haar_orthonormal(spec.p1, spec.r, rng)
    v = haar_orthonormal(spec.p2, spec.r, rng)
    return u @ v.T


def gen_approx_lowrank(spec: GenSpec) -> np.ndarray:
    """Full-spectrum matrix: r leading singular values of 1, then a j^-alpha tail."""
    k = min(spec.p1, spec.p2)
    rng = rng_stream(spec.seed, 0)
    u = haar_orthonormal(spec.p1, k, rng)
    v = haar_orthonormal(spec.p2, k, rng)
    tail = np.arange(1, k - spec.r + 1, dtype=float) ** (-spec.alpha)
    d = np.concatenate([np.ones(spec.r), tail])
    return (u * d) @ v.T


def gen_theta(p1: int, p2: int, miss: MissSpec) -> np.ndarray:
    """Rank-one observation-probability grid with entries in (0, 1]."""
    rng = rng_stream(miss.seed, 1)
    if miss.theta_kind == "uniform_scaled":
        alpha = 1.0 - miss.level * rng.uniform(size=p1)
        beta = 1.0 - miss.level * rng.uniform(size=p2)
    elif miss.theta_kind == "band":
        alpha = rng.uniform(1.0 - miss.level, 1.0, size=p1)
        beta = rng.uniform(1.0 - miss.level, 1.0, size=p2)
    else:
        raise ValueError(f"unknown theta_kind {miss.theta_kind!r}")
    return np.outer(alpha, beta)


def sample_mask(theta: np.ndarray, partition: BlockPartition | None, seed: int) -> np.ndarray:
    """Independent Bernoulli draws, zeroed on the structurally missing block
    (pass ``partition=None`` to draw over the whole grid)."""
    rng = rng_stream(seed, 2)
    mask = (rng.uniform(size=theta.shape) < theta).astype(np.int8)
    if partition is not None:
        mask[partition.m1:, partition.m2:] = 0
    return mask


def apply_scenario_block(mask: np.ndarray, scenario: str) -> tuple[np.ndarray, BlockPartition]:
    """Zero out the fixed downstream-task rectangle and return the induced
    partition: the final half of the rows by the last 45 columns (scenario
    one), or the final 45 rows by the last half of the columns (scenario two)."""
    n, p = mask.shape
    if scenario == "one":
        block_rows, block_cols = math.ceil(n / 2), SCENARIO_FIXED_SPAN
    elif scenario == "two":
        block_rows, block_cols = SCENARIO_FIXED_SPAN, math.ceil(p / 2)
    else:
        raise ValueError(f"unknown scenario {scenario!r}")
    if block_rows >= n or block_cols >= p:
        raise BlockTooLarge(
            f"scenario {scenario} block {block_rows}x{block_cols} does not fit in {n}x{p}")
    out = mask.copy()
    out[n - block_rows:, p - block_cols:] = 0
    return out, BlockPartition(p1=n, p2=p, m1=n - block_rows, m2=p - block_cols)


def add_gaussian_noise(a: np.ndarray, sigma: float, seed: int) -> np.ndarray:
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    if sigma == 0:
        return a.copy()
    rng = rng_stream(seed, 3)
    return a + sigma * rng.standard_normal(a.shape)


def gen_poisson(a: np.ndarray, lambda0: float, seed: int) -> np.ndarray:
    """Counts with intensity scaled so the grand mean is about lambda0."""
    a = np.asarray(a, dtype=float)
    if (a < 0).any():
        raise NegativeIntensity("intensity factors must be nonnegative")
    total = a.sum()
    if total == 0:
        return np.zeros(a.shape, dtype=np.int64)
    lam = lambda0 * a.size / total
    rng = rng_stream(seed, 4)
    return rng.poisson(lam * a)


def gen_poisson_lowrank(p1: int, p2: int, r: int, seed: int) -> np.ndarray:
    """Nonnegative rank-r intensity base with |Gaussian| factors."""
    rng = rng_stream(seed, 5)
    u = np.abs(rng.normal(0.0, 1.0 / math.sqrt(p1), size=(p1, r)))
    v = np.abs(rng.normal(0.0, 1.0 / math.sqrt(p2), size=(p2, r)))
    return u @ v.T


def gen_logistic(n: int, p: int, r: int, seed: int,
                 beta1_override: np.ndarray | None = None) -> LogisticTruth:
    """Standardized low-rank design plus Bernoulli labels from a sparse
    logistic model (15-entry coefficient support)."""
    if p < 15:
        raise ValueError("need p >= 15 for the sparse coefficient support")
    rng = rng_stream(seed, 6)
    u = rng.standard_normal((n, r))
    v = rng.standard_normal((p, r))
    d = rng.gamma(shape=2.0, scale=0.5, size=r)
    x = (u * d) @ v.T
    x = x - x.mean(axis=0)
    x = x / x.std(axis=0, ddof=1)

    beta0 = float(rng.standard_normal())
    if beta1_override is not None:
        beta1 = np.asarray(beta1_override, dtype=float)
    else:
        beta1 = np.zeros(p)
        support = rng.choice(p, size=15, replace=False)
        beta1[support] = rng.standard_normal(15)
    eta = beta0 + x @ beta1
    labels = (rng.uniform(size=n) < 1.0 / (1.0 + np.exp(-eta))).astype(np.int8)
    return LogisticTruth(x, beta0, beta1, labels)
