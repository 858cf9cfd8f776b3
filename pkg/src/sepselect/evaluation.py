"""Evaluation of ranked feature lists.

kNN accuracy under stratified cross-validation and k-means clustering
scored by NMI, computed over the top-1, top-2, ... prefixes of a ranking.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dataset import Dataset, FoldAssignment, stratified_folds
from .separability import check_subset
from .selector import SelectionTrace


class Metric(enum.Enum):
    ACCURACY_KNN = "knn"
    NMI_KMEANS = "nmi"


@dataclass(frozen=True)
class EvalConfig:
    knn_k: int = 5
    folds: int = 10
    seed: int = 0
    max_top: int = 150
    kmeans_max_iter: int = 300
    kmeans_tol: float = 1e-6

    def __post_init__(self) -> None:
        if self.knn_k < 1:
            raise ValueError(f"knn_k must be >= 1, got {self.knn_k}")
        if self.folds < 2:
            raise ValueError(f"folds must be >= 2, got {self.folds}")
        if self.max_top < 1:
            raise ValueError(f"max_top must be >= 1, got {self.max_top}")


@dataclass(frozen=True)
class EvaluationCurve:
    metric: Metric
    values: tuple[float, ...]
    max_value: float
    ave_value: float
    # per-t standard deviation of fold accuracies (kNN only), diagnostics
    fold_std: tuple[float, ...] | None = None

    @classmethod
    def from_values(cls, metric: Metric, values: Sequence[float], fold_std=None) -> "EvaluationCurve":
        vals = tuple(float(v) for v in values)
        if not vals:
            raise ValueError("curve needs at least one value")
        return cls(metric, vals, max(vals), float(np.mean(vals)), fold_std)

    def summary(self) -> dict:
        return {"metric": self.metric.value, "max": self.max_value, "ave": self.ave_value}


def pairwise_sq_distances(X: np.ndarray) -> np.ndarray:
    """Squared Euclidean distances, accumulated column by column."""
    n = X.shape[0]
    D = np.zeros((n, n))
    for j in range(X.shape[1]):
        diff = X[:, j, None] - X[None, :, j]
        D += diff * diff
    return D


def _knn_fold_predictions(D2: np.ndarray, codes: np.ndarray, p: int, folds: FoldAssignment,
                          knn_k: int) -> np.ndarray:
    pred = np.empty(len(codes), dtype=np.intp)
    for f in range(folds.folds):
        test = folds.test_indices(f)
        train = folds.train_indices(f)
        if len(test) == 0:
            continue
        k = knn_k
        if len(train) < k:
            warnings.warn(f"fold {f}: only {len(train)} training instances, using k={len(train)}",
                          RuntimeWarning, stacklevel=3)
            k = len(train)
        # train is ascending, so a stable sort breaks distance ties by instance index
        order = np.argsort(D2[np.ix_(test, train)], axis=1, kind="stable")[:, :k]
        neigh = codes[train][order]
        votes = np.zeros((len(test), p), dtype=np.intp)
        np.add.at(votes, (np.arange(len(test))[:, None], neigh), 1)
        tied = votes == votes.max(axis=1, keepdims=True)
        first = neigh[:, 0]
        pred[test] = np.where(tied[np.arange(len(test)), first], first, tied.argmax(axis=1))
    return pred


def _fold_accuracies(correct: np.ndarray, folds: FoldAssignment) -> np.ndarray:
    return np.array([correct[folds.fold_of == f].mean() for f in range(folds.folds)
                     if np.any(folds.fold_of == f)])


def knn_accuracy(d: Dataset, subset: Sequence[int], folds: FoldAssignment, knn_k: int = 5) -> float:
    """Pooled cross-validated accuracy of a majority-vote kNN classifier.

    Vote ties go to the class of the nearest neighbour if it is among the
    tied classes, otherwise to the smallest tied class index.
    """
    subset = check_subset(subset, d.m)
    if not subset:
        raise ValueError("kNN needs a non-empty feature subset")
    D2 = pairwise_sq_distances(d.features[:, list(subset)])
    pred = _knn_fold_predictions(D2, d.codes, d.p, folds, knn_k)
    return float(np.mean(pred == d.codes))


def kmeans_seed_indices(n: int, p: int) -> list[int]:
    """1-based indices of evenly spread initial centroids.

    ``int = (n-1) // (p-1)``, ``start = (n - (p-1)*int + 1) // 2`` and the
    seeds are ``start, start+int, ..., start+(p-1)*int``.
    """
    if p < 2:
        raise ValueError(f"need at least 2 clusters, got {p}")
    if p > n:
        raise ValueError(f"cluster count {p} exceeds instance count {n}")
    step = (n - 1) // (p - 1)
    start = (n - (p - 1) * step + 1) // 2
    return [start + j * step for j in range(p)]


def _assign(X: np.ndarray, C: np.ndarray):
    diff = X[:, None, :] - C[None, :, :]
    d2 = (diff * diff).sum(axis=2)
    lab = d2.argmin(axis=1)
    return lab, d2[np.arange(len(X)), lab]


def lloyd(X: np.ndarray, init: np.ndarray, max_iter: int = 300, tol: float = 1e-6):
    """Lloyd iterations from fixed initial centroids.

    Returns ``(labels, centroids, objectives)`` where ``objectives`` holds
    the within-cluster sum of squares after each assignment step. A cluster
    that empties is moved onto the point farthest from its nearest centroid.
    """
    C = np.array(init, dtype=float, copy=True)
    p = len(C)
    objectives = []
    for _ in range(max_iter):
        lab, mind = _assign(X, C)
        objectives.append(float(mind.sum()))
        new = C.copy()
        taken = np.zeros(len(X), dtype=bool)
        for c in range(p):
            members = lab == c
            if members.any():
                new[c] = X[members].mean(axis=0)
        for c in range(p):
            if not np.any(lab == c):
                far = np.where(taken, -1.0, mind)
                i = int(far.argmax())
                taken[i] = True
                new[c] = X[i]
                mind[i] = 0.0
        shift = float(np.sqrt(((new - C) ** 2).sum(axis=1)).max())
        C = new
        if shift < tol:
            break
    lab, mind = _assign(X, C)
    objectives.append(float(mind.sum()))
    return lab, C, objectives


def kmeans_deterministic(d: Dataset, subset: Sequence[int], p: int, cfg: EvalConfig | None = None) -> np.ndarray:
    cfg = cfg or EvalConfig()
    subset = check_subset(subset, d.m)
    if not subset:
        raise ValueError("k-means needs a non-empty feature subset")
    X = d.features[:, list(subset)]
    seeds = np.array(kmeans_seed_indices(d.n, p)) - 1
    lab, _, _ = lloyd(X, X[seeds], cfg.kmeans_max_iter, cfg.kmeans_tol)
    return lab


def _entropy(counts: np.ndarray) -> float:
    pr = counts[counts > 0] / counts.sum()
    return float(-(pr * np.log(pr)).sum())


def nmi(labels: Sequence, clusters: Sequence) -> float:
    """Normalized mutual information, 2 I(L;C) / (H(L) + H(C))."""
    labels = np.asarray(labels)
    clusters = np.asarray(clusters)
    if labels.shape != clusters.shape:
        raise ValueError(f"length mismatch: {labels.shape} vs {clusters.shape}")
    if labels.size == 0:
        raise ValueError("nmi needs at least one instance")
    _, a = np.unique(labels, return_inverse=True)
    _, b = np.unique(clusters, return_inverse=True)
    table = np.zeros((a.max() + 1, b.max() + 1))
    np.add.at(table, (a, b), 1)
    h_l = _entropy(table.sum(axis=1))
    h_c = _entropy(table.sum(axis=0))
    if h_l + h_c == 0:
        return 1.0
    joint = _entropy(table.ravel())
    mi = max(h_l + h_c - joint, 0.0)
    return float(min(2.0 * mi / (h_l + h_c), 1.0))


def performance_curve(d: Dataset, ranking: SelectionTrace | Sequence[int], metric: Metric | str,
                      cfg: EvalConfig | None = None, folds: FoldAssignment | None = None) -> EvaluationCurve:
    """Metric on the top-1 .. top-T prefixes of a ranking, T = min(max_top, len)."""
    cfg = cfg or EvalConfig()
    metric = Metric(metric)
    feats = ranking.features if isinstance(ranking, SelectionTrace) else list(ranking)
    feats = list(check_subset(feats, d.m))
    if not feats:
        raise ValueError("ranking is empty")
    top = min(cfg.max_top, len(feats))

    values = []
    if metric is Metric.ACCURACY_KNN:
        folds = folds or stratified_folds(d, cfg.folds, cfg.seed)
        D2 = np.zeros((d.n, d.n))
        stds = []
        for t in range(top):
            col = d.features[:, feats[t]]
            diff = col[:, None] - col[None, :]
            D2 += diff * diff
            correct = _knn_fold_predictions(D2, d.codes, d.p, folds, cfg.knn_k) == d.codes
            values.append(float(correct.mean()))
            stds.append(float(_fold_accuracies(correct, folds).std()))
        return EvaluationCurve.from_values(metric, values, tuple(stds))

    for t in range(1, top + 1):
        clusters = kmeans_deterministic(d, feats[:t], d.p, cfg)
        values.append(nmi(d.codes, clusters))
    return EvaluationCurve.from_values(metric, values)
