"""Estimation of the rank-one sporadic-missingness probabilities and the
inverse-probability-normalized, zero-filled matrix.

The estimator exploits the rank-one identity: for a rank-one nonnegative grid
with nonzero total, every entry equals (row sum) * (column sum) / (total sum).
Applied to the binary mask, whose expectation is the probability grid, this
gives plug-in estimates over the observable strips.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import BlockPartition, MaskedMatrix
from .errors import DimensionMismatch, EmptyRowOrColumn, ZeroTotalMass

DEFAULT_EPS_FLOOR = 1e-3
DEFAULT_CAP = 1.0


@dataclass(frozen=True)
class ThetaEstimate:
    """Estimated observation probabilities.

    ``theta_col`` covers the first ``m2`` columns over all rows, ``theta_row``
    the first ``m1`` rows over all columns; ``theta`` combines them (harmonic
    mean on the (1,1) block) and is zero on the (2,2) block. ``theta0_hat`` is
    the minimum over the observable strips.
    """

    theta_col: np.ndarray
    theta_row: np.ndarray
    theta: np.ndarray
    theta0_hat: float
    partition: BlockPartition


def _strip_estimate(strip: np.ndarray, axis_name: str) -> np.ndarray:
    total = strip.sum()
    if total == 0:
        raise ZeroTotalMass(f"the {axis_name} strip of the mask sums to zero")
    row_sums = strip.sum(axis=1)
    col_sums = strip.sum(axis=0)
    if (row_sums == 0).any() or (col_sums == 0).any():
        raise EmptyRowOrColumn(
            f"a fully missing row or column in the {axis_name} strip leaves the "
            "missingness probability undefined there")
    return np.outer(row_sums, col_sums) / total


def estimate_theta(mask: np.ndarray, partition: BlockPartition,
                   eps_floor: float = DEFAULT_EPS_FLOOR,
                   cap: float = DEFAULT_CAP) -> ThetaEstimate:
    """Estimate the observation probabilities from a nonnegative mask grid.

    Accepts general nonnegative grids, not just binary masks, so the rank-one
    identity can be verified on fractional inputs. Estimates are clamped to
    ``[eps_floor, cap]`` on the strips before combining.
    """
    mask = np.asarray(mask, dtype=float)
    if mask.shape != partition.shape:
        raise DimensionMismatch(
            f"mask shape {mask.shape} does not match partition {partition.shape}")
    if (mask < 0).any():
        raise DimensionMismatch("mask entries must be nonnegative")
    p1, p2, m1, m2 = partition.p1, partition.p2, partition.m1, partition.m2

    theta_col = _strip_estimate(mask[:, :m2], "column")
    theta_row = _strip_estimate(mask[:m1, :], "row")
    theta_col = np.clip(theta_col, eps_floor, cap)
    theta_row = np.clip(theta_row, eps_floor, cap)

    theta = np.zeros((p1, p2))
    # harmonic mean where both strips overlap, each strip alone elsewhere
    theta[:m1, :m2] = 1.0 / (0.5 / theta_col[:m1, :] + 0.5 / theta_row[:, :m2])
    theta[:m1, m2:] = theta_row[:, m2:]
    theta[m1:, :m2] = theta_col[m1:, :]

    strip_values = np.concatenate([theta[:m1, :].ravel(), theta[m1:, :m2].ravel()])
    theta0_hat = float(strip_values.min())
    return ThetaEstimate(theta_col, theta_row, theta, theta0_hat, partition)


def normalize(y: MaskedMatrix, theta: ThetaEstimate) -> np.ndarray:
    """Zero-fill missing entries and divide the observed ones by their
    estimated observation probability."""
    if theta.theta.shape != y.shape:
        raise DimensionMismatch(
            f"theta shape {theta.theta.shape} does not match matrix {y.shape}")
    out = np.zeros(y.shape)
    observed = y.mask == 1
    out[observed] = y.values[observed] / theta.theta[observed]
    return out
