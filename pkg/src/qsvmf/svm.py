"""Kernel SVM trained by sequential minimal optimization on precomputed Grams.

The solver is deterministic with no randomized heuristics: every KKT violator
in index order is paired by a sequential scan over partners, taking the first
pair that makes an acceptable step. Bias is recomputed after every sweep as
the mean over free support vectors, or the midpoint of the KKT-feasible
interval when no multiplier is strictly inside (0, C). After each sweep the
KKT conditions are tested at that canonical bias, and the model is converged
as soon as every residual is within tol.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(fn):
            return fn

        return wrap

_EPS = 1e-8
_STEP_EPS = 1e-5


@njit(cache=True)
def _canonical_bias(alpha, g, y, C):
    n = alpha.shape[0]
    total = 0.0
    free = 0
    for i in range(n):
        if _EPS < alpha[i] < C - _EPS:
            total += y[i] - g[i]
            free += 1
    if free > 0:
        return total / free
    lower = -np.inf
    upper = np.inf
    for i in range(n):
        if alpha[i] < _EPS:
            if y[i] > 0:
                lower = max(lower, 1.0 - g[i])
            else:
                upper = min(upper, -1.0 - g[i])
        elif alpha[i] > C - _EPS:
            if y[i] > 0:
                upper = min(upper, 1.0 - g[i])
            else:
                lower = max(lower, -1.0 - g[i])
    if np.isfinite(lower) and np.isfinite(upper):
        return 0.5 * (lower + upper)
    if np.isfinite(lower):
        return lower
    if np.isfinite(upper):
        return upper
    return 0.0


@njit(cache=True)
def _kkt_satisfied(alpha, g, y, C, b, tol):
    n = alpha.shape[0]
    for i in range(n):
        r = y[i] * (g[i] + b) - 1.0
        if alpha[i] < _EPS:
            if r < -tol:
                return False
        elif alpha[i] > C - _EPS:
            if r > tol:
                return False
        elif abs(r) > tol:
            return False
    return True


@njit(cache=True)
def _smo_solve(K, y, C, tol, max_passes):
    n = K.shape[0]
    alpha = np.zeros(n)
    g = np.zeros(n)
    b = 0.0
    converged = False
    sweeps = 0
    prev_clean_b = np.nan
    while sweeps < max_passes:
        changed = 0
        for i in range(n):
            Ei = g[i] + b - y[i]
            r = y[i] * Ei
            if not ((r < -tol and alpha[i] < C - _EPS) or (r > tol and alpha[i] > _EPS)):
                continue
            for j in range(n):
                if j == i:
                    continue
                stepped, b = _step(i, j, K, y, alpha, g, b, C)
                if stepped:
                    changed += 1
                    break
        sweeps += 1
        b = _canonical_bias(alpha, g, y, C)
        if _kkt_satisfied(alpha, g, y, C, b, tol):
            converged = True
            break
        if changed == 0:
            if not np.isnan(prev_clean_b) and b == prev_clean_b:
                break
            prev_clean_b = b
    return alpha, b, converged, sweeps


@njit(cache=True)
def _step(i, j, K, y, alpha, g, b, C):
    if i == j:
        return False, b
    ai, aj = alpha[i], alpha[j]
    yi, yj = y[i], y[j]
    Ei = g[i] + b - yi
    Ej = g[j] + b - yj
    s = yi * yj
    if s < 0:
        L = max(0.0, aj - ai)
        H = min(C, C + aj - ai)
    else:
        L = max(0.0, ai + aj - C)
        H = min(C, ai + aj)
    if H - L < 1e-12:
        return False, b
    eta = 2.0 * K[i, j] - K[i, i] - K[j, j]
    if eta < 0.0:
        cand = aj - yj * (Ei - Ej) / eta
        if cand < L:
            cand = L
        elif cand > H:
            cand = H
    else:
        # flat direction: the dual is linear in alpha_j here, optimum at an end
        slope = -yj * (Ei - Ej)
        if slope > 0.0:
            cand = H
        elif slope < 0.0:
            cand = L
        else:
            return False, b
    if abs(cand - aj) < _STEP_EPS * (cand + aj + _STEP_EPS):
        return False, b
    ai_new = ai + s * (aj - cand)
    d_i = ai_new - ai
    d_j = cand - aj
    b1 = b - Ei - yi * d_i * K[i, i] - yj * d_j * K[i, j]
    b2 = b - Ej - yi * d_i * K[i, j] - yj * d_j * K[j, j]
    if _EPS < ai_new < C - _EPS:
        b_new = b1
    elif _EPS < cand < C - _EPS:
        b_new = b2
    else:
        b_new = 0.5 * (b1 + b2)
    alpha[i] = ai_new
    alpha[j] = cand
    for t in range(K.shape[0]):
        g[t] += yi * d_i * K[i, t] + yj * d_j * K[j, t]
    return True, b_new


@dataclass
class SvmModel:
    alphas: np.ndarray
    bias: float
    labels: np.ndarray
    C: float
    tol: float
    converged: bool
    sweeps: int

    @property
    def support_indices(self) -> np.ndarray:
        return np.flatnonzero(self.alphas > _EPS)


def smo_train(
    K: np.ndarray,
    y: np.ndarray,
    C: float = 1.0,
    tol: float = 1e-3,
    max_passes: int = 200,
) -> SvmModel:
    K = np.ascontiguousarray(K, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise ValueError("K must be square")
    if y.shape != (K.shape[0],):
        raise ValueError("y length must match K")
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise ValueError("labels must be +1 or -1")
    if C <= 0:
        raise ValueError("C must be positive")
    if np.abs(K - K.T).max() > 1e-9:
        raise ValueError("K must be symmetric")
    alpha, b, converged, sweeps = _smo_solve(K, y, float(C), float(tol), int(max_passes))
    return SvmModel(
        alphas=alpha,
        bias=float(b),
        labels=y.astype(np.int64),
        C=float(C),
        tol=float(tol),
        converged=bool(converged),
        sweeps=int(sweeps),
    )


def decision_values(model: SvmModel, K_cross: np.ndarray) -> np.ndarray:
    """Decision function for rows of K_cross (eval points x training points)."""
    K_cross = np.asarray(K_cross, dtype=np.float64)
    if K_cross.ndim != 2 or K_cross.shape[1] != model.alphas.shape[0]:
        raise ValueError("K_cross columns must match the training set size")
    return K_cross @ (model.alphas * model.labels) + model.bias


def predict(model: SvmModel, K_cross: np.ndarray) -> np.ndarray:
    d = decision_values(model, K_cross)
    return np.where(d >= 0, 1, -1).astype(np.int64)


def accuracy(predicted: np.ndarray, truth: np.ndarray) -> float:
    predicted = np.asarray(predicted)
    truth = np.asarray(truth)
    if predicted.shape != truth.shape:
        raise ValueError("shape mismatch")
    return float(np.mean(predicted == truth))


class KernelSVC(BaseEstimator):
    """Binary SVM over a precomputed kernel, sklearn-style surface.

    fit takes the training Gram matrix; predict and decision_function take
    cross kernels with evaluation points as rows and training points as
    columns, in the fit order.
    """

    def __init__(self, C: float = 1.0, tol: float = 1e-3, max_passes: int = 200):
        self.C = C
        self.tol = tol
        self.max_passes = max_passes

    def fit(self, K: np.ndarray, y: np.ndarray) -> "KernelSVC":
        self.model_ = smo_train(K, y, C=self.C, tol=self.tol, max_passes=self.max_passes)
        self.n_train_ = int(self.model_.labels.shape[0])
        return self

    def decision_function(self, K_cross: np.ndarray) -> np.ndarray:
        self._check_fitted()
        return decision_values(self.model_, K_cross)

    def predict(self, K_cross: np.ndarray) -> np.ndarray:
        self._check_fitted()
        return predict(self.model_, K_cross)

    def score(self, K_cross: np.ndarray, y: np.ndarray) -> float:
        return accuracy(self.predict(K_cross), np.asarray(y))

    def _check_fitted(self) -> None:
        if not hasattr(self, "model_"):
            raise ValueError("KernelSVC is not fitted")


@dataclass(frozen=True)
class ClassicalKernel:
    """Classical kernel family; gamma=None means the 1/(p * var) scale rule."""

    kind: str
    degree: int = 3
    gamma: float | None = None
    coef0: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("linear", "poly", "rbf", "sigmoid"):
            raise ValueError(f"unknown kernel kind {self.kind!r}")

    def resolved_coef0(self) -> float:
        if self.coef0 is not None:
            return self.coef0
        return 1.0 if self.kind == "poly" else 0.0


def gamma_scale(X: np.ndarray) -> float:
    """1 / (n_features * var(X)) over the full matrix, the scale-gamma rule."""
    X = np.asarray(X, dtype=np.float64)
    v = float(X.var())
    if v <= 0:
        raise ValueError("gamma scale undefined for constant data")
    return 1.0 / (X.shape[1] * v)


def classical_kernel(
    spec: ClassicalKernel, X_a: np.ndarray, X_b: np.ndarray | None = None
) -> np.ndarray:
    """Kernel matrix between row sets. gamma=None resolves from X_a, so pass
    an explicit gamma (resolved from the training rows) when building cross
    kernels."""
    X_a = np.asarray(X_a, dtype=np.float64)
    X_b = X_a if X_b is None else np.asarray(X_b, dtype=np.float64)
    if X_a.ndim != 2 or X_b.ndim != 2 or X_a.shape[1] != X_b.shape[1]:
        raise ValueError("inputs must be 2-d with matching column counts")
    if spec.kind == "linear":
        return X_a @ X_b.T
    g = spec.gamma if spec.gamma is not None else gamma_scale(X_a)
    if spec.kind == "poly":
        return (g * (X_a @ X_b.T) + spec.resolved_coef0()) ** spec.degree
    if spec.kind == "sigmoid":
        return np.tanh(g * (X_a @ X_b.T) + spec.resolved_coef0())
    sq = (
        (X_a ** 2).sum(axis=1)[:, None]
        + (X_b ** 2).sum(axis=1)[None, :]
        - 2.0 * (X_a @ X_b.T)
    )
    return np.exp(-g * np.maximum(sq, 0.0))
