"""Comparison imputers: column-mean, random sampling, and K-nearest neighbors.

These fill missing entries only; observed entries pass through bit-identical
(unlike the completion pipeline, which also denoises).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import MaskedMatrix
from .errors import EmptyColumn
from .synthgen import rng_stream

DEFAULT_K = 5


@dataclass(frozen=True)
class ImputedMatrix:
    values: np.ndarray
    method_tag: str
    params: dict


def _column_means(y: MaskedMatrix) -> np.ndarray:
    observed = y.mask == 1
    counts = observed.sum(axis=0)
    if (counts == 0).any():
        raise EmptyColumn(f"column {int(np.argmin(counts))} has no observed entry")
    return (y.values * observed).sum(axis=0) / counts


def mean_impute(y: MaskedMatrix) -> ImputedMatrix:
    """Replace each missing entry with its column's observed mean."""
    means = _column_means(y)
    out = y.values.copy()
    missing = y.mask == 0
    out[missing] = np.broadcast_to(means, y.shape)[missing]
    return ImputedMatrix(out, "mean", {})


def rs_impute(y: MaskedMatrix, seed: int) -> ImputedMatrix:
    """Replace each missing entry with a uniform draw from the same column's
    observed values."""
    observed = y.mask == 1
    counts = observed.sum(axis=0)
    if (counts == 0).any():
        raise EmptyColumn(f"column {int(np.argmin(counts))} has no observed entry")
    rng = rng_stream(seed, 7)
    out = y.values.copy()
    for j in range(y.shape[1]):
        rows = np.flatnonzero(~observed[:, j])
        if rows.size == 0:
            continue
        pool = y.values[observed[:, j], j]
        out[rows, j] = rng.choice(pool, size=rows.size, replace=True)
    return ImputedMatrix(out, "rs", {"seed": seed})


def knn_impute(y: MaskedMatrix, k: int = DEFAULT_K) -> ImputedMatrix:
    """Fill each missing cell with the mean of that column over the k nearest
    rows that observe it.

    Row distance is the root-mean-square difference over jointly observed
    columns; ties break toward the lower row index. Cells with no usable
    neighbor fall back to the column mean.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    observed = (y.mask == 1).astype(float)
    values = y.values * observed
    means = _column_means(y)
    n = y.shape[0]
    out = y.values.copy()
    missing_rows = np.flatnonzero((y.mask == 0).any(axis=1))
    for i in missing_rows:
        joint = observed * observed[i]  # n x p, 1 where both rows observe
        overlap = joint.sum(axis=1)
        diff = (values - values[i]) * joint
        with np.errstate(invalid="ignore", divide="ignore"):
            dist = np.sqrt((diff * diff).sum(axis=1) / overlap)
        dist[overlap == 0] = np.inf
        dist[i] = np.inf
        order = np.lexsort((np.arange(n), dist))  # distance, then row index
        for j in np.flatnonzero(y.mask[i] == 0):
            usable = order[(observed[order, j] == 1) & np.isfinite(dist[order])]
            if usable.size == 0:
                out[i, j] = means[j]
            else:
                out[i, j] = y.values[usable[:k], j].mean()
    return ImputedMatrix(out, "knn", {"k": k})
