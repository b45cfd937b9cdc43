"""Univariate feature scoring and the classical classifier suite.

Scoring runs on raw features. The selectors break score ties toward the
lower column index and report the chosen columns in ascending order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

_VAR_FLOOR = 1e-9


@dataclass(frozen=True)
class FeatureScores:
    scores: np.ndarray
    method: str


def chi2_scores(X: np.ndarray, y: np.ndarray) -> FeatureScores:
    """Chi-squared statistic per feature from class-conditional feature sums.

    Observed counts are per-class column sums; expected counts split each
    column total by class priors. Requires nonnegative features.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    if X.ndim != 2 or y.shape != (X.shape[0],):
        raise ValueError("X must be 2-d with one label per row")
    if (X < 0).any():
        raise ValueError("chi-squared scoring needs nonnegative features")
    classes = np.unique(y)
    indicator = (y[:, None] == classes[None, :]).astype(np.float64)
    observed = indicator.T @ X
    priors = indicator.mean(axis=0)
    expected = np.outer(priors, X.sum(axis=0))
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = (observed - expected) ** 2 / expected
    terms[~np.isfinite(terms)] = 0.0
    return FeatureScores(scores=terms.sum(axis=0), method="chi2")


def f_regression_scores(X: np.ndarray, y: np.ndarray) -> FeatureScores:
    """Univariate F statistic of each column against the numeric labels.

    F = r^2 / (1 - r^2) * (n - 2); a constant column scores 0 and a perfect
    correlation is capped at a large finite value.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2 or y.shape != (X.shape[0],):
        raise ValueError("X must be 2-d with one label per row")
    n = X.shape[0]
    if n < 3:
        raise ValueError("need at least 3 rows for an F statistic")
    Xc = X - X.mean(axis=0)
    yc = y - y.mean()
    denom = np.sqrt((Xc ** 2).sum(axis=0) * (yc ** 2).sum())
    with np.errstate(divide="ignore", invalid="ignore"):
        r = (Xc * yc[:, None]).sum(axis=0) / denom
    r[~np.isfinite(r)] = 0.0
    r2 = r ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        F = r2 / (1.0 - r2) * (n - 2)
    F[~np.isfinite(F)] = np.finfo(np.float64).max
    return FeatureScores(scores=F, method="f_regression")


def select_k_best(scores: FeatureScores, k: int) -> list[int]:
    """Indices of the k best-scoring columns, ascending; ties favor lower index."""
    s = np.asarray(scores.scores, dtype=np.float64)
    if not 1 <= k <= s.shape[0]:
        raise ValueError(f"k must be in [1, {s.shape[0]}]")
    order = np.argsort(-s, kind="stable")
    return sorted(int(i) for i in order[:k])


def zscore_fit(X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-column mean and std over the given rows; zero stds become 1."""
    X = np.asarray(X, dtype=np.float64)
    mean = X.mean(axis=0)
    std = X.std(axis=0)
    std = np.where(std > 0, std, 1.0)
    return mean, std


def zscore_apply(X: np.ndarray, mean: np.ndarray, std: np.ndarray) -> np.ndarray:
    return (np.asarray(X, dtype=np.float64) - mean) / std


class GaussianNaiveBayes(BaseEstimator):
    """Gaussian class-conditional naive Bayes for the +1/-1 labels."""

    def fit(self, X: np.ndarray, y: np.ndarray) -> "GaussianNaiveBayes":
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y)
        self.classes_ = np.unique(y)
        self.theta_ = np.array([X[y == c].mean(axis=0) for c in self.classes_])
        self.var_ = np.array(
            [np.maximum(X[y == c].var(axis=0), _VAR_FLOOR) for c in self.classes_]
        )
        self.log_prior_ = np.log(
            np.array([(y == c).mean() for c in self.classes_])
        )
        return self

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        joint = []
        for c in range(self.classes_.shape[0]):
            ll = -0.5 * np.sum(
                np.log(2.0 * np.pi * self.var_[c])
                + (X - self.theta_[c]) ** 2 / self.var_[c],
                axis=1,
            )
            joint.append(self.log_prior_[c] + ll)
        return self.classes_[np.argmax(np.column_stack(joint), axis=1)]


class KNearestNeighbors(BaseEstimator):
    """Majority vote over the n_neighbors nearest training rows.

    Distance ties resolve toward the lower training index; a split vote
    follows the single nearest neighbor. With fewer training rows than
    n_neighbors, all rows vote.
    """

    def __init__(self, n_neighbors: int = 5):
        self.n_neighbors = n_neighbors

    def fit(self, X: np.ndarray, y: np.ndarray) -> "KNearestNeighbors":
        self.X_ = np.asarray(X, dtype=np.float64)
        self.y_ = np.asarray(y, dtype=np.int64)
        return self

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        d2 = (
            (X ** 2).sum(axis=1)[:, None]
            + (self.X_ ** 2).sum(axis=1)[None, :]
            - 2.0 * X @ self.X_.T
        )
        order = np.argsort(d2, axis=1, kind="stable")
        k = min(self.n_neighbors, self.X_.shape[0])
        votes = self.y_[order[:, :k]].sum(axis=1)
        nearest = self.y_[order[:, 0]]
        return np.where(votes > 0, 1, np.where(votes < 0, -1, nearest)).astype(np.int64)


class LogisticRegressionGD(BaseEstimator):
    """Logistic regression by full-batch gradient descent, zero-initialized.

    The L2 penalty applies to the weights only, not the intercept.
    """

    def __init__(self, l2: float = 1e-4, learning_rate: float = 0.1,
                 n_iterations: int = 500):
        self.l2 = l2
        self.learning_rate = learning_rate
        self.n_iterations = n_iterations

    def fit(self, X: np.ndarray, y: np.ndarray) -> "LogisticRegressionGD":
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        n, p = X.shape
        w = np.zeros(p)
        b = 0.0
        for _ in range(self.n_iterations):
            t = -y * (X @ w + b)
            s = np.empty_like(t)
            pos = t >= 0
            s[pos] = 1.0 / (1.0 + np.exp(-t[pos]))
            e = np.exp(t[~pos])
            s[~pos] = e / (1.0 + e)
            grad_w = -(X.T @ (y * s)) / n + 2.0 * self.l2 * w
            grad_b = -(y * s).mean()
            w -= self.learning_rate * grad_w
            b -= self.learning_rate * grad_b
        self.coef_ = w
        self.intercept_ = b
        return self

    def decision_function(self, X: np.ndarray) -> np.ndarray:
        return np.asarray(X, dtype=np.float64) @ self.coef_ + self.intercept_

    def predict(self, X: np.ndarray) -> np.ndarray:
        return np.where(self.decision_function(X) >= 0, 1, -1).astype(np.int64)
