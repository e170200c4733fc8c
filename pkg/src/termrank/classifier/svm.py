"""Soft-margin kernel SVM trained by sequential minimal optimization.

Working-set selection is the maximal-violating-pair rule on the dual
gradient; the two-variable subproblem is solved analytically with box
clipping. No randomness is involved: given the same Gram matrix the
solver's trajectory is fixed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import DegenerateTrainingSet, InvalidInput

__all__ = [
    "kernel_matrix",
    "smo_solve",
    "SMOResult",
    "SVMModel",
    "fit_svm",
    "KKT_TOLERANCE",
]

KKT_TOLERANCE = 1e-3
_TAU = 1e-12


def _sq_dists(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    aa = (a * a).sum(axis=1)[:, None]
    bb = (b * b).sum(axis=1)[None, :]
    d2 = aa + bb - 2.0 * (a @ b.T)
    return np.maximum(d2, 0.0)


def kernel_matrix(
    kernel: str,
    a: np.ndarray,
    b: np.ndarray,
    gamma: float | None = None,
) -> np.ndarray:
    if kernel == "linear":
        return a @ b.T
    if kernel == "rbf":
        if gamma is None or gamma <= 0:
            raise InvalidInput("rbf kernel needs gamma > 0")
        return np.exp(-gamma * _sq_dists(a, b))
    raise InvalidInput(f"unknown kernel {kernel!r}")


@dataclass
class SMOResult:
    alpha: np.ndarray
    bias: float
    iterations: int
    converged: bool
    objective: float  # dual objective sum(alpha) - 0.5 a'Qa


def smo_solve(
    K: np.ndarray,
    y: np.ndarray,
    C: float,
    tol: float = KKT_TOLERANCE,
    max_iter: int | None = None,
) -> SMOResult:
    """Maximize sum(a) - 0.5 a'Qa subject to 0 <= a <= C, sum(a*y) = 0,
    where Q = yy' * K.

    Each step updates the most violating pair: i maximizing -y*grad over
    the up-set, j minimizing it over the low-set; termination when the
    violation gap m - M drops below tol. The bias is the midpoint
    (m + M) / 2, which at optimality brackets every free support
    vector's implied bias.
    """
    n = len(y)
    Q = (y[:, None] * y[None, :]) * K
    qd = np.diag(Q).copy()
    alpha = np.zeros(n)
    grad = -np.ones(n)  # Q @ alpha - 1
    if max_iter is None:
        max_iter = max(10_000, 200 * n)

    iterations = 0
    converged = False
    stuck = 0
    while iterations < max_iter:
        iterations += 1
        v = -y * grad
        up = ((y > 0) & (alpha < C)) | ((y < 0) & (alpha > 0))
        low = ((y < 0) & (alpha < C)) | ((y > 0) & (alpha > 0))
        if not up.any() or not low.any():
            converged = True
            break
        vi = np.where(up, v, -np.inf)
        vj = np.where(low, v, np.inf)
        i = int(np.argmax(vi))
        j = int(np.argmin(vj))
        if vi[i] - vj[j] <= tol:
            converged = True
            break

        old_i, old_j = alpha[i], alpha[j]
        if y[i] != y[j]:
            quad = qd[i] + qd[j] + 2.0 * Q[i, j]
            if quad <= 0:
                quad = _TAU
            delta = (-grad[i] - grad[j]) / quad
            diff = alpha[i] - alpha[j]
            alpha[i] += delta
            alpha[j] += delta
            if diff > 0:
                if alpha[j] < 0:
                    alpha[j] = 0.0
                    alpha[i] = diff
            else:
                if alpha[i] < 0:
                    alpha[i] = 0.0
                    alpha[j] = -diff
            if diff > 0:
                if alpha[i] > C:
                    alpha[i] = C
                    alpha[j] = C - diff
            else:
                if alpha[j] > C:
                    alpha[j] = C
                    alpha[i] = C + diff
        else:
            quad = qd[i] + qd[j] - 2.0 * Q[i, j]
            if quad <= 0:
                quad = _TAU
            delta = (grad[i] - grad[j]) / quad
            total = alpha[i] + alpha[j]
            alpha[i] -= delta
            alpha[j] += delta
            if total > C:
                if alpha[i] > C:
                    alpha[i] = C
                    alpha[j] = total - C
            else:
                if alpha[j] < 0:
                    alpha[j] = 0.0
                    alpha[i] = total
            if total > C:
                if alpha[j] > C:
                    alpha[j] = C
                    alpha[i] = total - C
            else:
                if alpha[i] < 0:
                    alpha[i] = 0.0
                    alpha[j] = total

        d_i = alpha[i] - old_i
        d_j = alpha[j] - old_j
        if abs(d_i) < 1e-14 and abs(d_j) < 1e-14:
            stuck += 1
            if stuck >= 3:
                break  # numerically pinned; gap cannot shrink further
        else:
            stuck = 0
        grad += Q[:, i] * d_i + Q[:, j] * d_j

    v = -y * grad
    up = ((y > 0) & (alpha < C)) | ((y < 0) & (alpha > 0))
    low = ((y < 0) & (alpha < C)) | ((y > 0) & (alpha > 0))
    if up.any() and low.any():
        bias = (float(np.max(v[up])) + float(np.min(v[low]))) / 2.0
    else:
        free = (alpha > _TAU) & (alpha < C - _TAU)
        bias = float(np.mean(v[free])) if free.any() else 0.0
    objective = float(alpha.sum() - 0.5 * (alpha @ Q @ alpha))
    return SMOResult(
        alpha=alpha,
        bias=bias,
        iterations=iterations,
        converged=converged,
        objective=objective,
    )


@dataclass
class SVMModel:
    kernel: str
    C: float
    gamma: float | None
    support_vectors: np.ndarray  # rows with nonzero alpha
    dual_coef: np.ndarray  # alpha_i * y_i for those rows
    bias: float
    metadata: dict = field(default_factory=dict)

    def decision_function(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if len(self.support_vectors) == 0:
            return np.full(len(X), self.bias)
        K = kernel_matrix(self.kernel, X, self.support_vectors, self.gamma)
        return K @ self.dual_coef + self.bias

    def predict(self, X: np.ndarray) -> np.ndarray:
        """+1/-1 labels; the boundary itself counts as +1."""
        return np.where(self.decision_function(X) >= 0.0, 1, -1)


def fit_svm(
    X: np.ndarray,
    y: np.ndarray,
    kernel: str = "rbf",
    C: float = 1.0,
    gamma: float | None = None,
    tol: float = KKT_TOLERANCE,
    seed: int | None = None,
    max_iter: int | None = None,
) -> SVMModel:
    """Train on rows X with labels y in {-1, +1}.

    The seed is recorded in metadata for provenance only; the solver is
    deterministic.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or len(X) != len(y):
        raise InvalidInput("X must be 2-d with one label per row")
    labels = set(np.unique(y))
    if not labels <= {-1.0, 1.0}:
        raise InvalidInput(f"labels must be -1/+1, got {sorted(labels)}")
    if len(labels) < 2:
        raise DegenerateTrainingSet("training data contains a single class")
    if C <= 0:
        raise InvalidInput(f"C must be > 0, got {C}")

    K = kernel_matrix(kernel, X, X, gamma)
    result = smo_solve(K, y, C, tol=tol, max_iter=max_iter)
    sv = result.alpha > _TAU
    return SVMModel(
        kernel=kernel,
        C=C,
        gamma=gamma,
        support_vectors=X[sv].copy(),
        dual_coef=(result.alpha * y)[sv].copy(),
        bias=result.bias,
        metadata={
            "seed": seed,
            "iterations": result.iterations,
            "converged": result.converged,
            "objective": result.objective,
            "n_support": int(sv.sum()),
            "tol": tol,
        },
    )
