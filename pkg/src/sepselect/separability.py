"""Spatially-aware separability of a feature subset.

The criterion is a ratio of between-class separation to within-class
compactness. Each side has a distance term and a directional term:

* within-class: mean distance of instances to their own centroid, plus a
  membership-weighted penalty on the angle between the vector to the own
  centroid and the vectors to the other centroids;
* between-class: mean distance from each centroid to its nearest foreign
  centroid, plus a membership-weighted reward for the angle between that
  nearest-neighbour direction and the directions to the remaining centroids.
"""

from __future__ import annotations

import enum
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from .dataset import ClassPartition, Dataset

EPS_NORM = 1e-12
EPS_DIV = 1e-12
# relative slack when comparing centroid distances for nearest-class ties
NEAREST_RTOL = 1e-12


class Variant(enum.Enum):
    FULL = "full"
    NO_DIR_WITHIN = "no-dir-within"
    NO_DIR_BETWEEN = "no-dir-between"
    DISTANCE_ONLY = "distance-only"


@dataclass(frozen=True)
class SeparabilityParams:
    alpha: float = 0.0316
    beta: float = 0.0316
    variant: Variant = Variant.FULL
    eps_norm: float = EPS_NORM
    eps_div: float = EPS_DIV

    def __post_init__(self) -> None:
        if not isinstance(self.variant, Variant):
            object.__setattr__(self, "variant", Variant(self.variant))
        if self.alpha < 0 or self.beta < 0:
            raise ValueError(f"alpha and beta must be non-negative, got {self.alpha}, {self.beta}")
        if self.eps_norm <= 0 or self.eps_div <= 0:
            raise ValueError("eps_norm and eps_div must be positive")

    def to_dict(self) -> dict:
        out = asdict(self)
        out["variant"] = self.variant.value
        return out


@dataclass(frozen=True)
class SeparabilityScore:
    theta_dis: float
    theta_dir: float
    lambda_dis: float
    lambda_dir: float
    sep: float

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class Centroids:
    points: np.ndarray
    subset: tuple[int, ...]

    @property
    def p(self) -> int:
        return self.points.shape[0]


ZERO_SCORE = SeparabilityScore(0.0, 0.0, 0.0, 0.0, 0.0)


def check_subset(subset: Sequence[int], m: int) -> tuple[int, ...]:
    out = tuple(int(f) for f in subset)
    if len(set(out)) != len(out):
        raise ValueError(f"feature subset has duplicates: {out}")
    bad = [f for f in out if not 0 <= f < m]
    if bad:
        raise ValueError(f"feature indices {bad} out of range for m={m}")
    return out


def compose(theta_dis, theta_dir, lambda_dis, lambda_dir, params: SeparabilityParams):
    """Numerator / guarded denominator for the chosen variant.

    Works elementwise, so arrays of components are accepted.
    """
    v = params.variant
    num = lambda_dis
    den = theta_dis
    if v in (Variant.FULL, Variant.NO_DIR_WITHIN):
        num = lambda_dis + params.beta * lambda_dir
    if v in (Variant.FULL, Variant.NO_DIR_BETWEEN):
        den = theta_dis + params.alpha * theta_dir
    return num / np.maximum(den, params.eps_div)


def fuzzy_memberships(dist: np.ndarray, eps_norm: float = EPS_NORM) -> np.ndarray:
    """Inverse-squared-distance memberships along the last axis.

    ``mu_j = 1 / sum_k (d_j / d_k)^2``. Where some distances are below
    ``eps_norm`` the membership is split equally among those entries.
    """
    dist = np.asarray(dist, dtype=float)
    hit = dist < eps_norm
    with np.errstate(divide="ignore", invalid="ignore"):
        inv = 1.0 / np.where(hit, 1.0, dist) ** 2
        soft = inv / inv.sum(axis=-1, keepdims=True)
        hard = hit / hit.sum(axis=-1, keepdims=True)
    return np.where(hit.any(axis=-1, keepdims=True), hard, soft)


def _cos_from_parts(dot, norm_u, norm_v, eps_norm):
    degenerate = (norm_u < eps_norm) | (norm_v < eps_norm)
    with np.errstate(divide="ignore", invalid="ignore"):
        c = dot / (norm_u * norm_v)
    return np.clip(np.where(degenerate, 1.0, c), -1.0, 1.0)


def cosine(u, v, eps_norm: float = EPS_NORM) -> float:
    """Cosine similarity; 1.0 when either vector has norm below ``eps_norm``."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape:
        raise ValueError(f"length mismatch: {u.shape} vs {v.shape}")
    return float(_cos_from_parts(u @ v, np.linalg.norm(u), np.linalg.norm(v), eps_norm))


def class_centroids(d: Dataset, part: ClassPartition, subset: Sequence[int]) -> Centroids:
    subset = check_subset(subset, d.m)
    if not subset:
        raise ValueError("centroids need a non-empty feature subset")
    X = d.features[:, list(subset)]
    pts = np.stack([X[idx].mean(axis=0) for idx in part.classes])
    return Centroids(pts, subset)


def _instance_geometry(d: Dataset, cents: Centroids):
    """Vectors from each instance to every centroid, and their lengths."""
    X = d.features[:, list(cents.subset)]
    V = cents.points[None, :, :] - X[:, None, :]
    return V, np.linalg.norm(V, axis=2)


def instance_memberships(d: Dataset, cents: Centroids, i: int, subset: Sequence[int] | None = None,
                         eps_norm: float = EPS_NORM) -> np.ndarray:
    """Fuzzy membership of instance ``i`` to every class (sums to 1)."""
    cols = list(cents.subset if subset is None else subset)
    dist = np.linalg.norm(cents.points - d.features[i, cols], axis=1)
    return fuzzy_memberships(dist, eps_norm)


def within_compactness_distance(d: Dataset, part: ClassPartition, cents: Centroids) -> float:
    """Mean distance from each instance to its own class centroid."""
    _, dist = _instance_geometry(d, cents)
    return float(dist[np.arange(d.n), d.codes].mean())


def within_compactness_direction(d: Dataset, part: ClassPartition, cents: Centroids,
                                 eps_norm: float = EPS_NORM) -> float:
    V, dist = _instance_geometry(d, cents)
    rows = np.arange(d.n)
    own = V[rows, d.codes]
    own_len = dist[rows, d.codes]
    dots = (V * own[:, None, :]).sum(axis=2)
    cos = _cos_from_parts(dots, own_len[:, None], dist, eps_norm)
    mu = fuzzy_memberships(dist, eps_norm)
    return float((mu * (1.0 - cos)).sum(axis=1).mean())


def _centroid_distances(cents: Centroids) -> np.ndarray:
    P = cents.points
    return np.linalg.norm(P[:, None, :] - P[None, :, :], axis=2)


def nearest_from_distances(D: np.ndarray) -> np.ndarray:
    """Nearest other class per row of a (..., p, p) distance array.

    Distances within a relative ``NEAREST_RTOL`` of the row minimum count
    as tied; the smallest class index wins.
    """
    p = D.shape[-1]
    D = np.where(np.eye(p, dtype=bool), np.inf, D)
    dmin = D.min(axis=-1, keepdims=True)
    tied = D <= dmin * (1.0 + NEAREST_RTOL)
    return tied.argmax(axis=-1)


def nearest_class(cents: Centroids) -> np.ndarray:
    if cents.p < 2:
        raise ValueError("nearest class needs at least 2 classes")
    return nearest_from_distances(_centroid_distances(cents))


def between_separation_distance(cents: Centroids) -> float:
    D = _centroid_distances(cents)
    nn = nearest_from_distances(D)
    return float(D[np.arange(cents.p), nn].mean())


def centroid_memberships_from_distances(D: np.ndarray, eps_norm: float = EPS_NORM) -> np.ndarray:
    """Full (..., p, p) centroid membership matrix from centroid distances.

    Row ``a`` holds 1 on the diagonal and, off the diagonal, the fuzzy
    memberships of centroid ``a`` over the other p-1 classes.
    """
    p = D.shape[-1]
    out = np.empty(D.shape)
    for a in range(p):
        others = [b for b in range(p) if b != a]
        out[..., a, a] = 1.0
        out[..., a, others] = fuzzy_memberships(D[..., a, others], eps_norm)
    return out


def centroid_memberships(cents: Centroids, q_prime: int, eps_norm: float = EPS_NORM) -> np.ndarray:
    """Memberships of centroid ``q_prime`` to every class; self entry is 1."""
    if cents.p < 2:
        raise ValueError("centroid memberships need at least 2 classes")
    return centroid_memberships_from_distances(_centroid_distances(cents), eps_norm)[q_prime]


def between_separation_direction(cents: Centroids, eps_norm: float = EPS_NORM) -> float:
    p = cents.p
    if p < 2:
        raise ValueError("between-class separation needs at least 2 classes")
    if p == 2:
        return 0.0
    P = cents.points
    V = P[None, :, :] - P[:, None, :]  # V[q, a] = c_a - c_q
    D = np.linalg.norm(V, axis=2)
    nn = nearest_from_distances(D)
    mubar = centroid_memberships_from_distances(D, eps_norm)
    total = 0.0
    for q in range(p):
        a = nn[q]
        others = [b for b in range(p) if b != q and b != a]
        dots = V[q, others] @ V[q, a]
        cos = _cos_from_parts(dots, D[q, a], D[q, others], eps_norm)
        total += float((mubar[a, others] * (1.0 - cos)).sum())
    return total / p


def separability(d: Dataset, part: ClassPartition, subset: Sequence[int],
                 params: SeparabilityParams | None = None) -> SeparabilityScore:
    """Score a feature subset from scratch. The empty subset scores 0."""
    params = params or SeparabilityParams()
    if part.p < 2:
        raise ValueError("separability needs at least 2 classes")
    subset = check_subset(subset, d.m)
    if not subset:
        return ZERO_SCORE
    cents = class_centroids(d, part, subset)
    td = within_compactness_distance(d, part, cents)
    tr = within_compactness_direction(d, part, cents, eps_norm=params.eps_norm)
    ld = between_separation_distance(cents)
    lr = between_separation_direction(cents, params.eps_norm)
    return SeparabilityScore(td, tr, ld, lr, float(compose(td, tr, ld, lr, params)))
