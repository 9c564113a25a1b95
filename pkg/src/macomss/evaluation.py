"""Metrics (NMSE, recovery losses, AUC), a ridge-penalized logistic trainer,
and recoverability diagnostics (minimum observation probability, incoherence,
singular-value gap)."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import BlockPartition
from .errors import SingleClass, ZeroTruthNorm
from .numerics import frobenius_norm, spectral_norm, svd
from .synthgen import rng_stream

LAMBDA_GRID = tuple(10.0 ** k for k in range(-4, 3))


@dataclass(frozen=True)
class LogisticFit:
    beta0: float
    beta1: np.ndarray
    ridge_lambda: float
    converged: bool
    iterations: int


@dataclass(frozen=True)
class ConditionReport:
    theta0: float
    rho: float
    sigma_r: float
    gap_ratio: float


def nmse(estimate: np.ndarray, truth: np.ndarray, target_mask: np.ndarray) -> float:
    """Squared error over the target entries, normalized by the squared norm
    of their true values."""
    target = np.asarray(target_mask) == 1
    if not target.any():
        raise ZeroTruthNorm("target set is empty")
    diff = np.asarray(estimate)[target] - np.asarray(truth)[target]
    denom = (np.asarray(truth)[target] ** 2).sum()
    if denom == 0:
        raise ZeroTruthNorm("true values on the target set have zero norm")
    return float((diff * diff).sum() / denom)


def recovery_losses(a_hat: np.ndarray, a: np.ndarray) -> tuple[float, float]:
    diff = np.asarray(a_hat) - np.asarray(a)
    return frobenius_norm(diff), spectral_norm(diff)


def _sigmoid(eta: np.ndarray) -> np.ndarray:
    out = np.empty_like(eta)
    pos = eta >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-eta[pos]))
    ex = np.exp(eta[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def fit_logistic(x: np.ndarray, z: np.ndarray, ridge_lambda: float = 0.0,
                 grad_tol: float = 1e-6, max_iter: int = 100) -> LogisticFit:
    """Damped-Newton (IRLS) maximizer of the ridge-penalized log-likelihood.

    The intercept is unpenalized. Step halving keeps the penalized objective
    nonincreasing; non-convergence is reported via the flag, not raised.
    """
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    if x.shape[0] < 2 or z.min() == z.max():
        raise SingleClass("need both label classes present")
    n, p = x.shape
    design = np.hstack([np.ones((n, 1)), x])
    pen = ridge_lambda * np.concatenate([[0.0], np.ones(p)])
    beta = np.zeros(p + 1)

    def objective(b):
        eta = design @ b
        return float(np.logaddexp(0.0, eta).sum() - z @ eta + 0.5 * (pen * b * b).sum())

    obj = objective(beta)
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        eta = design @ beta
        mu = _sigmoid(eta)
        grad = design.T @ (mu - z) + pen * beta
        if np.linalg.norm(grad) <= grad_tol:
            converged = True
            it -= 1
            break
        w = np.clip(mu * (1.0 - mu), 1e-10, None)
        hess = (design * w[:, None]).T @ design + np.diag(pen)
        step = np.linalg.solve(hess, grad)
        scale = 1.0
        for _ in range(50):
            trial = beta - scale * step
            trial_obj = objective(trial)
            if trial_obj <= obj:
                break
            scale *= 0.5
        beta = beta - scale * step
        obj = min(obj, trial_obj)
    else:
        converged = bool(np.linalg.norm(
            design.T @ (_sigmoid(design @ beta) - z) + pen * beta) <= grad_tol)
    return LogisticFit(float(beta[0]), beta[1:], ridge_lambda, converged, it)


def predict_proba(fit: LogisticFit, x: np.ndarray) -> np.ndarray:
    return _sigmoid(fit.beta0 + np.asarray(x, dtype=float) @ fit.beta1)


def auc(scores: np.ndarray, labels: np.ndarray) -> float:
    """Mann-Whitney AUC with half credit for ties, computed via average ranks."""
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels)
    pos = labels == 1
    n_pos = int(pos.sum())
    n_neg = labels.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise SingleClass("AUC needs both classes")
    order = np.argsort(scores, kind="mergesort")
    ranks = np.empty(scores.size)
    sorted_scores = scores[order]
    i = 0
    while i < scores.size:
        j = i
        while j + 1 < scores.size and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        ranks[order[i:j + 1]] = 0.5 * (i + j) + 1.0  # average 1-based rank
        i = j + 1
    return float((ranks[pos].sum() - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


def cv_folds(n: int, n_folds: int, seed: int) -> list[np.ndarray]:
    perm = rng_stream(seed, 8).permutation(n)
    return [perm[f::n_folds] for f in range(n_folds)]


def cv_logistic_auc(x: np.ndarray, z: np.ndarray, n_folds: int = 5, seed: int = 0,
                    lambda_grid: tuple[float, ...] = LAMBDA_GRID) -> tuple[float, float]:
    """Held-out AUC of the ridge logistic model, with the penalty picked by
    cross-validation on pooled out-of-fold probabilities.

    Returns (auc, chosen_lambda).
    """
    x = np.asarray(x, dtype=float)
    z = np.asarray(z)
    folds = cv_folds(x.shape[0], n_folds, seed)
    best = (-np.inf, lambda_grid[0])
    for lam in lambda_grid:
        scores = np.empty(x.shape[0])
        for fold in folds:
            train = np.setdiff1d(np.arange(x.shape[0]), fold)
            fit = fit_logistic(x[train], z[train], ridge_lambda=lam)
            scores[fold] = predict_proba(fit, x[fold])
        value = auc(scores, z)
        if value > best[0]:
            best = (value, lam)
    return best


def condition_report(a: np.ndarray, r: int, theta: np.ndarray,
                     partition: BlockPartition, gap_const: float = 1.0) -> ConditionReport:
    """Diagnostics for the recoverability conditions: max leverage coherence of
    the rank-r factors, the minimum strip observation probability, and the
    r-th singular value relative to the theoretical threshold."""
    if r < 1:
        raise ValueError("r must be at least 1")
    p1, p2, m1, m2 = partition.p1, partition.p2, partition.m1, partition.m2
    res = svd(np.asarray(a, dtype=float))
    u = res.left_vectors[:, :r]
    v = res.right_vectors[:, :r]
    rho = max(p1 / r * float((u * u).sum(axis=1).max()),
              p2 / r * float((v * v).sum(axis=1).max()))
    strips = np.concatenate([theta[:m1, :].ravel(), theta[m1:, :m2].ravel()])
    theta0 = float(strips.min())
    sigma_r = float(res.singular_values[r - 1])
    threshold = gap_const * math.sqrt(
        p1 * p2 * math.log(max(p1, p2)) / (max(theta0, 1e-300) * min(m1, m2)))
    return ConditionReport(theta0, rho, sigma_r, sigma_r / threshold)
