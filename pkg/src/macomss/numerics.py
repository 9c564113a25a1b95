"""Self-contained dense linear-algebra kernel: SVD, norms, leading-block inverse.

The SVD is a one-sided Jacobi with cyclic sweeps. The hot pair loop lives in
the compiled extension ``macomss._jacobi`` when available; a pure-Python twin
is selected at import time otherwise, or when ``MACOMSS_PURE_PYTHON`` is set
in the environment.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceFailure, DimensionMismatch, SingularSubmatrix

if os.environ.get("MACOMSS_PURE_PYTHON"):
    from ._jacobi_py import jacobi_orthogonalize

    KERNEL_BACKEND = "python"
else:
    try:
        from ._jacobi import jacobi_orthogonalize

        KERNEL_BACKEND = "compiled"
    except ImportError:
        from ._jacobi_py import jacobi_orthogonalize

        KERNEL_BACKEND = "python"

JACOBI_TOL = 1e-12
MAX_SWEEPS = 60


@dataclass(frozen=True)
class SvdResult:
    """Thin SVD: ``left @ diag(singular_values) @ right.T`` reconstructs the input."""

    left_vectors: np.ndarray
    singular_values: np.ndarray
    right_vectors: np.ndarray

    @property
    def rank_tol(self) -> float:
        return 0.0 if self.singular_values.size == 0 else float(self.singular_values[0])


def _complete_orthonormal(u: np.ndarray, missing: np.ndarray) -> None:
    """Fill the flagged columns of ``u`` with unit vectors orthogonal to the rest.

    Each new direction starts from the canonical vector with the smallest
    leverage under the current basis, which keeps the Gram-Schmidt residual
    as large as possible.
    """
    p = u.shape[0]
    filled = [k for k in range(u.shape[1]) if not missing[k]]
    leverage = (u[:, filled] ** 2).sum(axis=1) if filled else np.zeros(p)
    for k in np.flatnonzero(missing):
        cand = np.zeros(p)
        cand[int(np.argmin(leverage))] = 1.0
        if filled:
            basis = u[:, filled]
            cand -= basis @ (basis.T @ cand)
            cand -= basis @ (basis.T @ cand)  # second pass for stability
        norm = np.linalg.norm(cand)
        if norm < 1e-8:  # pragma: no cover - needs > p requested directions
            raise ConvergenceFailure("could not complete an orthonormal basis")
        u[:, k] = cand / norm
        filled.append(k)
        leverage = leverage + u[:, k] ** 2


def svd(a: np.ndarray, tol: float = JACOBI_TOL, max_sweeps: int = MAX_SWEEPS) -> SvdResult:
    """Full thin SVD via one-sided Jacobi, deterministic for a fixed input.

    Sign convention: the first nonzero component of each left vector is
    nonnegative. Raises ConvergenceFailure if the sweep budget is exhausted.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2:
        raise DimensionMismatch(f"expected a 2-D grid, got ndim={a.ndim}")
    if not np.isfinite(a).all():
        raise DimensionMismatch("input entries must be finite")
    p, q = a.shape
    k = min(p, q)
    if k == 0:
        return SvdResult(np.zeros((p, 0)), np.zeros(0), np.zeros((q, 0)))

    transposed = p < q
    # the kernel works in place, so always copy the input
    work = np.array(a.T if transposed else a, dtype=float, order="C")
    cols = work.shape[1]
    rot = np.eye(cols)
    if jacobi_orthogonalize(work, rot, tol, max_sweeps) < 0:
        raise ConvergenceFailure(f"Jacobi SVD did not converge in {max_sweeps} sweeps")

    norms = np.linalg.norm(work, axis=0)
    order = np.argsort(-norms, kind="stable")
    sigma = norms[order]
    left = np.zeros_like(work)
    zero = sigma == 0.0
    nz = ~zero
    left[:, nz] = work[:, order[nz]] / sigma[nz]
    if zero.any():
        _complete_orthonormal(left, zero)
    right = rot[:, order]

    if transposed:
        left, right = right, left
    # fix signs on the left factor, mirrored on the right
    for j in range(k):
        col = left[:, j]
        idx = np.flatnonzero(np.abs(col) > 1e-12)
        pivot = col[idx[0]] if idx.size else col[0]
        if pivot < 0:
            left[:, j] = -left[:, j]
            right[:, j] = -right[:, j]
    return SvdResult(left, sigma, right)


def frobenius_norm(a: np.ndarray) -> float:
    a = np.asarray(a, dtype=float)
    return float(np.sqrt((a * a).sum()))


def spectral_norm(a: np.ndarray, tol: float = 1e-12, max_iter: int = 5000) -> float:
    """Largest singular value.

    Small matrices go through the Jacobi kernel; larger ones use power
    iteration on the Gram matrix with a fixed, seeded starting perturbation so
    the result is deterministic.
    """
    a = np.asarray(a, dtype=float)
    if a.size == 0:
        return 0.0
    p, q = a.shape
    if min(p, q) <= 16:
        s = svd(a).singular_values
        return float(s[0]) if s.size else 0.0
    if q > p:
        a = a.T
        p, q = q, p
    scale = np.abs(a).max()
    if scale == 0.0:
        return 0.0
    v = np.linalg.norm(a, axis=0)
    # deterministic perturbation guards against a start vector exactly
    # orthogonal to the top singular direction
    jitter = np.random.Generator(np.random.Philox(key=0xC0FFEE)).standard_normal(q)
    v = v + 0.1 * np.linalg.norm(v) * jitter / np.linalg.norm(jitter)
    v /= np.linalg.norm(v)
    est = 0.0
    for _ in range(max_iter):
        w = a @ v
        z = a.T @ w
        nz = np.linalg.norm(z)
        if nz == 0.0:
            return 0.0
        new_est = float(np.sqrt(nz))
        v = z / nz
        if abs(new_est - est) <= tol * new_est:
            return new_est
        est = new_est
    return est


def invert_leading(b: np.ndarray, s: int, rel_tol: float = 1e-14) -> np.ndarray:
    """Invert the leading ``s x s`` principal submatrix by pivoted Gauss-Jordan."""
    b = np.asarray(b, dtype=float)
    if s > min(b.shape):
        raise DimensionMismatch(f"s={s} exceeds matrix dims {b.shape}")
    if s == 0:
        return np.zeros((0, 0))
    aug = np.hstack([b[:s, :s].copy(), np.eye(s)])
    pivot_floor = rel_tol * max(np.abs(aug[:, :s]).max(), 1e-300)
    for col in range(s):
        pivot_row = col + int(np.argmax(np.abs(aug[col:, col])))
        pivot = aug[pivot_row, col]
        if abs(pivot) <= pivot_floor:
            raise SingularSubmatrix(f"leading {s}x{s} block is numerically singular")
        if pivot_row != col:
            aug[[col, pivot_row]] = aug[[pivot_row, col]]
        aug[col] /= aug[col, col]
        others = np.arange(s) != col
        aug[others] -= np.outer(aug[others, col], aug[col])
    return aug[:, s:]
