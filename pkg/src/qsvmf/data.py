"""Loading the WDBC table, angle scaling, stratified folds, redundancy scoring.

Labels are mapped to +1 (malignant) / -1 (benign) at load time; every
downstream component assumes that convention.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

N_FEATURES = 30

FEATURE_NAMES: tuple[str, ...] = (
    "mean radius", "mean texture", "mean perimeter", "mean area",
    "mean smoothness", "mean compactness", "mean concavity",
    "mean concave points", "mean symmetry", "mean fractal dimension",
    "radius error", "texture error", "perimeter error", "area error",
    "smoothness error", "compactness error", "concavity error",
    "concave points error", "symmetry error", "fractal dimension error",
    "worst radius", "worst texture", "worst perimeter", "worst area",
    "worst smoothness", "worst compactness", "worst concavity",
    "worst concave points", "worst symmetry", "worst fractal dimension",
)


class WdbcParseError(ValueError):
    """Raised when a data file does not follow the 32-field WDBC row format."""


@dataclass
class Dataset:
    """Feature matrix plus signed labels; rows are patients, columns features."""

    features: np.ndarray
    labels: np.ndarray
    feature_names: tuple[str, ...]

    def __post_init__(self) -> None:
        self.features = np.asarray(self.features, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.features.ndim != 2 or self.features.shape[0] == 0:
            raise ValueError("features must be a non-empty 2-d array")
        if self.labels.shape != (self.features.shape[0],):
            raise ValueError("labels length must match the number of rows")
        if not np.all(np.isin(self.labels, (-1, 1))):
            raise ValueError("labels must be +1 or -1")
        if not np.all(np.isfinite(self.features)):
            raise ValueError("features must be finite")
        self.feature_names = tuple(self.feature_names)
        if len(self.feature_names) != self.features.shape[1]:
            raise ValueError("feature_names length must match the number of columns")

    @property
    def n_rows(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]


def bundled_wdbc_path() -> Path:
    """Path of the WDBC copy shipped inside the package."""
    return Path(resources.files("qsvmf").joinpath("datasets", "wdbc.csv"))


def load_wdbc(path: str | Path | None = None) -> Dataset:
    """Parse a WDBC-format CSV: id, M/B diagnosis, then 30 real features.

    A single header row is tolerated when its first field is not numeric.
    Malformed rows raise WdbcParseError naming the 1-based row number.
    """
    if path is None:
        path = bundled_wdbc_path()
    features: list[list[float]] = []
    labels: list[int] = []
    with open(path, newline="") as fh:
        for row_no, row in enumerate(csv.reader(fh), start=1):
            if not row:
                continue
            if row_no == 1 and not _is_number(row[0]):
                continue
            if len(row) != 2 + N_FEATURES:
                raise WdbcParseError(
                    f"row {row_no}: expected {2 + N_FEATURES} fields, got {len(row)}"
                )
            diagnosis = row[1].strip()
            if diagnosis not in ("M", "B"):
                raise WdbcParseError(f"row {row_no}: diagnosis must be M or B, got {diagnosis!r}")
            try:
                values = [float(v) for v in row[2:]]
            except ValueError as exc:
                raise WdbcParseError(f"row {row_no}: non-numeric feature field ({exc})") from exc
            if not all(math.isfinite(v) for v in values):
                raise WdbcParseError(f"row {row_no}: non-finite feature value")
            features.append(values)
            labels.append(1 if diagnosis == "M" else -1)
    if not features:
        raise WdbcParseError("no data rows found")
    return Dataset(np.array(features), np.array(labels), FEATURE_NAMES)


def _is_number(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True


class MinMaxAngleScaler(BaseEstimator, TransformerMixin):
    """Per-column min-max map onto a rotation-angle interval, default [0, pi].

    Statistics come from the rows passed to fit only; transform clamps
    out-of-range values to the interval ends, and a constant column maps
    to the lower end.
    """

    def __init__(self, lo: float = 0.0, hi: float = math.pi):
        self.lo = lo
        self.hi = hi

    def fit(self, X: np.ndarray, y: np.ndarray | None = None) -> "MinMaxAngleScaler":
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[0] == 0:
            raise ValueError("fit needs a non-empty 2-d array")
        if not self.lo < self.hi:
            raise ValueError("scaler range must satisfy lo < hi")
        if not np.all(np.isfinite(X)):
            raise ValueError("fit rows must be finite")
        self.min_ = X.min(axis=0)
        self.max_ = X.max(axis=0)
        return self

    def transform(self, X: np.ndarray) -> np.ndarray:
        if not hasattr(self, "min_"):
            raise ValueError("scaler is not fitted")
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.min_.shape[0]:
            raise ValueError("column count does not match the fitted data")
        span = self.max_ - self.min_
        width = self.hi - self.lo
        out = np.empty_like(X)
        ok = span > 0
        out[:, ok] = self.lo + (X[:, ok] - self.min_[ok]) * (width / span[ok])
        out[:, ~ok] = self.lo
        return np.clip(out, self.lo, self.hi)


@dataclass
class FoldPlan:
    """Fold assignment per row; a row is in the validation set of exactly one fold."""

    k: int
    assignments: np.ndarray

    def validation_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignments == fold)

    def train_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignments != fold)


def stratified_kfold(labels: Sequence[int], k: int, seed: int) -> FoldPlan:
    """Stratified k-fold split determined entirely by (labels, k, seed).

    Classes are handled in ascending label order; each class's remainder rows
    go to folds starting at a rotating offset so fold sizes stay within one
    of each other overall, not just per class.
    """
    y = np.asarray(labels)
    if k < 2:
        raise ValueError("k must be at least 2")
    rng = np.random.default_rng(seed)
    assignments = np.full(y.shape[0], -1, dtype=np.int64)
    offset = 0
    for cls in np.unique(y):
        idx = np.flatnonzero(y == cls)
        if idx.size < k:
            raise ValueError(f"class {cls} has {idx.size} rows, fewer than k={k}")
        rng.shuffle(idx)
        base, rem = divmod(idx.size, k)
        pos = 0
        for fold in range(k):
            size = base + (1 if (fold - offset) % k < rem else 0)
            assignments[idx[pos:pos + size]] = fold
            pos += size
        offset = (offset + rem) % k
    return FoldPlan(k=k, assignments=assignments)


def pairwise_covariance_score(features: np.ndarray, columns: Iterable[int]) -> float:
    """Sum of |covariance| over column pairs after per-column standardization.

    Standardization uses population moments over the given rows, so each pair
    contributes its absolute Pearson correlation; a zero-variance column
    contributes nothing. Fewer than two distinct columns score 0.
    """
    cols = np.unique(np.fromiter(columns, dtype=np.int64))
    if cols.size <= 1:
        return 0.0
    X = np.asarray(features, dtype=np.float64)[:, cols]
    Xc = X - X.mean(axis=0)
    sd = np.sqrt((Xc ** 2).mean(axis=0))
    Z = np.divide(Xc, sd, out=np.zeros_like(Xc), where=sd > 0)
    C = (Z.T @ Z) / X.shape[0]
    iu = np.triu_indices(cols.size, k=1)
    return float(np.abs(C[iu]).sum())


def column_variances(features: np.ndarray, columns: Iterable[int]) -> np.ndarray:
    """Population variance of each requested raw column, in the order given."""
    cols = np.fromiter(columns, dtype=np.int64)
    X = np.asarray(features, dtype=np.float64)
    return X[:, cols].var(axis=0)
