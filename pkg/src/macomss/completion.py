"""Weighted stacking, SVD rotation, rank selection, and block assembly.

The pipeline: normalize the masked matrix, rotate its observable blocks with
singular vectors of two weighted stacks, walk the candidate rank down from a
starting value until the rotated leading block is nonsingular and one of two
norm bounds certifies stability, then rebuild the full matrix, with the
missing block recovered through the Schur-complement identity
``A22 = A21 A11^-1 A12``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import BlockPartition, MaskedMatrix
from .errors import DimensionMismatch, SingularSubmatrix
from .missingness import DEFAULT_CAP, DEFAULT_EPS_FLOOR, ThetaEstimate, estimate_theta, normalize
from .numerics import _complete_orthonormal, invert_leading, spectral_norm, svd


@dataclass(frozen=True)
class CompletionOptions:
    r0_mode: str = "min_dims"  # fixed | min_dims | hsvt_heuristic
    r0_fixed: int = 0
    eta_const: float = 2.0
    singularity_rel_tol: float = 1e-10
    stack_weight_mode: str = "signed"  # signed | zeroed
    theta_eps_floor: float = DEFAULT_EPS_FLOOR
    theta_cap: float = DEFAULT_CAP

    def __post_init__(self):
        if self.r0_mode not in ("fixed", "min_dims", "hsvt_heuristic"):
            raise ValueError(f"unknown r0_mode {self.r0_mode!r}")
        if self.stack_weight_mode not in ("signed", "zeroed"):
            raise ValueError(f"unknown stack_weight_mode {self.stack_weight_mode!r}")
        if self.eta_const <= 0:
            raise ValueError("eta_const must be positive")
        if not (0 < self.singularity_rel_tol < 1):
            raise ValueError("singularity_rel_tol must be in (0, 1)")


@dataclass(frozen=True)
class RotatedBlocks:
    b11: np.ndarray
    b12: np.ndarray
    b21: np.ndarray
    u_row: np.ndarray
    v_col: np.ndarray


@dataclass(frozen=True)
class CompletionResult:
    a_hat: np.ndarray
    r_hat: int
    r0_used: int
    criterion_side: str
    diagnostics: dict = field(default_factory=dict)


def build_stacks(y_tilde: np.ndarray, partition: BlockPartition,
                 stack_weight_mode: str = "signed"):
    """Stack the normalized blocks for the two rotation SVDs.

    The top/left copy of the (1,1) block enters with weight
    ``min(p - 2m, 0) / p`` on each side (zero whenever p >= 2m), or weight 0
    in ``zeroed`` mode.
    """
    p1, p2, m1, m2 = partition.p1, partition.p2, partition.m1, partition.m2
    if y_tilde.shape != (p1, p2):
        raise DimensionMismatch(f"grid shape {y_tilde.shape} != partition {partition.shape}")
    if stack_weight_mode == "zeroed":
        w1 = w2 = 0.0
    else:
        w1 = min(p1 - 2 * m1, 0) / p1
        w2 = min(p2 - 2 * m2, 0) / p2
    y11 = y_tilde[:m1, :m2]
    y_col = np.vstack([w1 * y11, y_tilde[m1:, :m2]])
    y_row = np.hstack([w2 * y11, y_tilde[:m1, m2:]])
    return y_col, y_row, w1, w2


def _square_basis(vectors: np.ndarray, n: int) -> np.ndarray:
    """Pad an orthonormal column set to a full n x n orthonormal basis."""
    k = vectors.shape[1]
    if k == n:
        return vectors
    out = np.zeros((n, n))
    out[:, :k] = vectors
    _complete_orthonormal(out, np.arange(n) >= k)
    return out


def rotate(y_tilde: np.ndarray, partition: BlockPartition,
           stack_weight_mode: str = "signed") -> RotatedBlocks:
    """Rotate the observable blocks by the stack singular vectors."""
    m1, m2 = partition.m1, partition.m2
    y_col, y_row, _, _ = build_stacks(y_tilde, partition, stack_weight_mode)
    v_col = _square_basis(svd(y_col).right_vectors, m2)
    u_row = _square_basis(svd(y_row).left_vectors, m1)
    y11 = y_tilde[:m1, :m2]
    b11 = u_row.T @ y11 @ v_col
    b12 = u_row.T @ y_tilde[:m1, m2:]
    b21 = y_tilde[m1:, :m2] @ v_col
    return RotatedBlocks(b11, b12, b21, u_row, v_col)


def observed_rms(y: MaskedMatrix) -> float:
    """Root mean square of the observed entries (noise-scale plug-in)."""
    observed = y.mask == 1
    count = int(observed.sum())
    if count == 0:
        return 0.0
    return float(np.sqrt((y.values[observed] ** 2).sum() / count))


def choose_r0(y_tilde: np.ndarray, y: MaskedMatrix, theta: ThetaEstimate,
              opts: CompletionOptions) -> int:
    """Starting rank for the selection loop.

    ``hsvt_heuristic`` counts the strip singular values clearing both
    noise-calibrated thresholds; ``min_dims`` returns ``m1 & m2``; ``fixed``
    clips the requested value.
    """
    part = y.partition
    r_max = min(part.m1, part.m2)
    if opts.r0_mode == "min_dims":
        return r_max
    if opts.r0_mode == "fixed":
        return int(np.clip(opts.r0_fixed, 0, r_max))

    tau = observed_rms(y)
    theta0 = max(theta.theta0_hat, 1e-300)
    logp = math.log(max(part.p1, part.p2))
    lam_col = opts.eta_const * math.sqrt(part.p1 * tau * logp / theta0)
    lam_row = opts.eta_const * math.sqrt(part.p2 * tau * logp / theta0)
    sig_col = svd(y_tilde[:, :part.m2]).singular_values
    sig_row = svd(y_tilde[:part.m1, :]).singular_values
    k = min(sig_col.size, sig_row.size)
    # both sequences are nonincreasing, so the joint condition holds on a prefix
    clears = (sig_col[:k] >= lam_col) & (sig_row[:k] >= lam_row)
    return int(np.clip(clears.sum(), 0, r_max))


def select_rank(blocks: RotatedBlocks, partition: BlockPartition, r0: int,
                opts: CompletionOptions) -> tuple[int, str]:
    """Walk s from r0 down to 1; accept the first s whose leading block is
    numerically nonsingular and passes at least one of the two norm bounds."""
    if r0 > min(partition.m1, partition.m2):
        raise DimensionMismatch("r0 exceeds the observable strip dimensions")
    row_limit = 2.0 * math.sqrt(partition.p1 / partition.m1)
    col_limit = 2.0 * math.sqrt(partition.p2 / partition.m2)
    for s in range(r0, 0, -1):
        sub = blocks.b11[:s, :s]
        sigma = svd(sub).singular_values
        if sigma[0] == 0.0 or sigma[-1] / sigma[0] < opts.singularity_rel_tol:
            continue
        inv = invert_leading(blocks.b11, s)
        row_ok = spectral_norm(blocks.b21[:, :s] @ inv) <= row_limit
        col_ok = spectral_norm(inv @ blocks.b12[:s, :]) <= col_limit
        if row_ok or col_ok:
            side = "both" if (row_ok and col_ok) else ("row_bound" if row_ok else "col_bound")
            return s, side
    return 0, "none"


def assemble(blocks: RotatedBlocks, r_hat: int) -> np.ndarray:
    """Rebuild the full matrix from the trimmed rotated blocks."""
    m1, m2 = blocks.u_row.shape[0], blocks.v_col.shape[0]
    p1 = m1 + blocks.b21.shape[0]
    p2 = m2 + blocks.b12.shape[1]
    out = np.zeros((p1, p2))
    if r_hat == 0:
        return out
    if r_hat > min(m1, m2):
        raise DimensionMismatch(f"r_hat={r_hat} exceeds block dimensions")
    u = blocks.u_row[:, :r_hat]
    v = blocks.v_col[:, :r_hat]
    inv = invert_leading(blocks.b11, r_hat)  # SingularSubmatrix here means select_rank lied
    out[:m1, :m2] = u @ blocks.b11[:r_hat, :r_hat] @ v.T
    out[:m1, m2:] = u @ blocks.b12[:r_hat, :]
    out[m1:, :m2] = blocks.b21[:, :r_hat] @ v.T
    out[m1:, m2:] = blocks.b21[:, :r_hat] @ inv @ blocks.b12[:r_hat, :]
    return out


def macomss(y: MaskedMatrix, opts: CompletionOptions | None = None,
            theta: ThetaEstimate | None = None) -> CompletionResult:
    """Full completion pipeline on a masked matrix.

    A precomputed ``theta`` bypasses missingness estimation (used when the
    probabilities are known, or held fixed for equivariance checks).
    """
    opts = opts or CompletionOptions()
    if theta is None:
        theta = estimate_theta(y.mask, y.partition,
                               eps_floor=opts.theta_eps_floor, cap=opts.theta_cap)
    y_tilde = normalize(y, theta)
    blocks = rotate(y_tilde, y.partition, opts.stack_weight_mode)
    r0 = choose_r0(y_tilde, y, theta, opts)
    r_hat, side = select_rank(blocks, y.partition, r0, opts)
    a_hat = assemble(blocks, r_hat)
    _, _, w1, w2 = build_stacks(y_tilde, y.partition, opts.stack_weight_mode)
    diagnostics = {
        "theta0_hat": theta.theta0_hat,
        "tau_tilde": observed_rms(y),
        "w1": w1,
        "w2": w2,
        "stack_weight_mode": opts.stack_weight_mode,
        "r0_mode": opts.r0_mode,
    }
    return CompletionResult(a_hat, r_hat, r0, side, diagnostics)
