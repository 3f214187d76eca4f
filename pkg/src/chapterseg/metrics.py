"""Segmentation metrics, length statistics, and break-count regression."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    BookMismatchError,
    DegenerateWindowError,
    SingularDesignError,
    UndefinedStatisticError,
)
from .segmentation import Segmentation


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


@dataclass(frozen=True)
class MetricConfig:
    k: int

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("window length k must be >= 1")


def default_window(ref: Segmentation, n_sentences: int) -> MetricConfig:
    """k = round(half of the mean true segment length), at least 2."""
    n_segments = len(ref.breaks) + 1
    mean_len = n_sentences / n_segments
    return MetricConfig(k=max(2, round_half_up(mean_len / 2.0)))


def _boundary_prefix(breaks, n_sentences: int) -> np.ndarray:
    """prefix[i] = number of breaks in gaps [0, i)."""
    ind = np.zeros(n_sentences, dtype=np.int64)
    for b in breaks:
        if not 0 <= b <= n_sentences - 2:
            raise ValueError(f"break {b} outside [0, {n_sentences - 2}]")
        ind[b] = 1
    return np.concatenate([[0], np.cumsum(ind)])


def _window_counts(breaks, n_sentences: int, k: int) -> np.ndarray:
    """Boundary count in gap range [i, i+k-1] for i = 0..N-k-1."""
    prefix = _boundary_prefix(breaks, n_sentences)
    i = np.arange(n_sentences - k)
    return prefix[i + k] - prefix[i]


def pk(
    ref: Segmentation, hyp: Segmentation, n_sentences: int, k: int
) -> float:
    """Beeferman Pk: disagreement rate on same-segment membership of
    sentence pairs (i, i+k); a pair is same-segment iff no break lies in
    gap range [i, i+k-1]."""
    if k >= n_sentences:
        raise DegenerateWindowError(f"k={k} >= N={n_sentences}")
    ref_same = _window_counts(ref.breaks, n_sentences, k) == 0
    hyp_same = _window_counts(hyp.breaks, n_sentences, k) == 0
    return float(np.mean(ref_same != hyp_same))


def window_diff(
    ref: Segmentation, hyp: Segmentation, n_sentences: int, k: int
) -> float:
    """WindowDiff: rate of windows whose boundary counts differ."""
    if k >= n_sentences:
        raise DegenerateWindowError(f"k={k} >= N={n_sentences}")
    ref_counts = _window_counts(ref.breaks, n_sentences, k)
    hyp_counts = _window_counts(hyp.breaks, n_sentences, k)
    return float(np.mean(ref_counts != hyp_counts))


def exact_f1(
    ref: Segmentation, hyp: Segmentation
) -> tuple[float, float, float]:
    """Precision/recall/F1 counting only gap-exact boundary matches."""
    ref_set, hyp_set = set(ref.breaks), set(hyp.breaks)
    if not ref_set and not hyp_set:
        return 1.0, 1.0, 1.0
    tp = len(ref_set & hyp_set)
    precision = tp / len(hyp_set) if hyp_set else 0.0
    recall = tp / len(ref_set) if ref_set else 0.0
    if precision + recall == 0.0:
        return precision, recall, 0.0
    return precision, recall, 2 * precision * recall / (precision + recall)


def segment_lengths(ref: Segmentation, n_sentences: int) -> list[int]:
    bounds = [-1, *ref.breaks, n_sentences - 1]
    return [b - a for a, b in zip(bounds, bounds[1:])]


def coefficient_of_variance(ref: Segmentation, n_sentences: int) -> float:
    """Population stddev over mean of per-segment sentence counts."""
    lengths = segment_lengths(ref, n_sentences)
    if len(lengths) < 2:
        raise UndefinedStatisticError("CV needs at least two segments")
    arr = np.asarray(lengths, dtype=np.float64)
    return float(arr.std() / arr.mean())


# --------------------------------------------------------------------------
# Break-count regression

@dataclass(frozen=True)
class RegressionModel:
    """OLS model predicting break counts from corpus features."""

    coefficients: tuple[float, ...]
    intercept: float
    feature_names: tuple[str, ...]
    fitted: bool = True

    def predict_raw(self, features) -> float:
        x = np.asarray(features, dtype=np.float64)
        return float(x @ np.asarray(self.coefficients) + self.intercept)

    def predict(self, features) -> int:
        """Nearest integer (half up), floored at one break."""
        return max(round_half_up(self.predict_raw(features)), 1)


@dataclass(frozen=True)
class RegressionReport:
    mse: float
    mae: float
    r2: float
    n_train: int
    n_test: int


def _ols(x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, float]:
    design = np.column_stack([np.ones(len(x)), x])
    if np.linalg.matrix_rank(design) < design.shape[1]:
        raise SingularDesignError("design matrix is rank deficient")
    beta, *_ = np.linalg.lstsq(design, y, rcond=None)
    return beta[1:], float(beta[0])


def fit_count_regression(
    rows,
    sentence_only: bool = False,
    seed: int = 0,
    holdout: float = 0.33,
) -> tuple[RegressionModel, RegressionReport]:
    """Fit break count ~ (candidate_count, sentence_count) by OLS.

    Rows are (candidate_count, sentence_count, true_breaks).  The fit
    uses a seeded train/test split (67-33 by default); reported MSE, MAE
    and R^2 are computed on the held-out rows from the rounded
    predictions.  With sentence_only, candidate counts are ignored (the
    baseline model).
    """
    rows = list(rows)
    if len(rows) < 3:
        raise ValueError("need at least 3 rows")
    data = np.asarray(rows, dtype=np.float64)
    x = data[:, 1:2] if sentence_only else data[:, 0:2]
    names = ("sentence_count",) if sentence_only else (
        "candidate_count",
        "sentence_count",
    )
    y = data[:, 2]
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(rows))
    n_test = max(1, int(round(holdout * len(rows))))
    n_train = len(rows) - n_test
    if n_train < x.shape[1] + 1:
        raise ValueError("not enough training rows for the feature count")
    train, test = order[:n_train], order[n_train:]
    coef, intercept = _ols(x[train], y[train])
    model = RegressionModel(
        coefficients=tuple(float(c) for c in coef),
        intercept=intercept,
        feature_names=names,
    )
    preds = np.asarray([model.predict(row) for row in x[test]], dtype=np.float64)
    resid = preds - y[test]
    ss_tot = float(np.sum((y[test] - y[test].mean()) ** 2))
    ss_res = float(np.sum(resid**2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else (1.0 if ss_res == 0 else 0.0)
    report = RegressionReport(
        mse=float(np.mean(resid**2)),
        mae=float(np.mean(np.abs(resid))),
        r2=r2,
        n_train=n_train,
        n_test=len(test),
    )
    return model, report


def training_r2(model: RegressionModel, rows, sentence_only: bool = False) -> float:
    """R^2 of the raw (unrounded) model on the given rows."""
    data = np.asarray(list(rows), dtype=np.float64)
    x = data[:, 1:2] if sentence_only else data[:, 0:2]
    y = data[:, 2]
    preds = np.asarray([model.predict_raw(row) for row in x])
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot == 0:
        return 1.0
    return 1.0 - float(np.sum((preds - y) ** 2)) / ss_tot
