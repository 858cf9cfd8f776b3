"""Forward greedy selection maximising the separability gain.

The selector keeps running sums over the accepted features:

* ``d2[i, q]``   squared distance from instance i to centroid q
* ``g[i, q]``    dot product of (c_own(i) - x_i) with (c_q - x_i)
* ``cd2[a, b]``  squared distance between centroids a and b
* ``cg[q, a, b]`` dot product of (c_a - c_q) with (c_b - c_q)

All four are sums over features, so a candidate is scored by adding its
single-column contribution. The per-candidate work is O(n p + p^3).
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .dataset import ClassPartition, Dataset
from .separability import (
    SeparabilityParams,
    SeparabilityScore,
    _cos_from_parts,
    centroid_memberships_from_distances,
    check_subset,
    compose,
    fuzzy_memberships,
    nearest_from_distances,
    separability,
)

GAIN_TIE = 1e-12
# elements per candidate chunk; chunking depends only on data shape
_CHUNK_BUDGET = 1 << 21


def default_workers() -> int:
    cap = os.environ.get("SEPSELECT_THREADS")
    n = os.cpu_count() or 1
    if cap:
        n = min(n, max(1, int(cap)))
    return n


@dataclass(frozen=True)
class SelectionStep:
    feature_index: int
    gain: float
    score_after: SeparabilityScore


@dataclass
class SelectionTrace:
    steps: list[SelectionStep]
    params: SeparabilityParams
    k: int
    evaluations: int = field(default=0, compare=False)

    @property
    def features(self) -> list[int]:
        return [s.feature_index for s in self.steps]

    def __len__(self) -> int:
        return len(self.steps)

    def to_dict(self, feature_names: Sequence[str] | None = None) -> dict:
        steps = []
        for rank, s in enumerate(self.steps, start=1):
            rec = {"rank": rank, "feature_index": s.feature_index}
            if feature_names is not None:
                rec["feature_name"] = feature_names[s.feature_index]
            rec["gain"] = s.gain
            rec["score"] = s.score_after.to_dict()
            steps.append(rec)
        return {"k": self.k, "params": self.params.to_dict(), "steps": steps}


def gain(d: Dataset, part: ClassPartition, subset: Sequence[int], candidate: int,
         params: SeparabilityParams | None = None) -> float:
    """Separability change from adding ``candidate`` to ``subset``."""
    params = params or SeparabilityParams()
    subset = check_subset(subset, d.m)
    if not 0 <= candidate < d.m:
        raise ValueError(f"candidate {candidate} out of range for m={d.m}")
    if candidate in subset:
        raise ValueError(f"candidate {candidate} is already selected")
    after = separability(d, part, subset + (candidate,), params)
    before = separability(d, part, subset, params)
    return after.sep - before.sep


class _State:
    def __init__(self, d: Dataset, part: ClassPartition):
        self.X = d.features
        self.codes = d.codes
        self.C = np.stack([d.features[idx].mean(axis=0) for idx in part.classes])
        n, p = d.n, part.p
        self.n, self.p = n, p
        self.d2 = np.zeros((n, p))
        self.g = np.zeros((n, p))
        self.cd2 = np.zeros((p, p))
        self.cg = np.zeros((p, p, p))

    def contributions(self, cols: np.ndarray):
        """Single-feature increments for candidate columns, batch axis first."""
        delta = self.C[:, cols].T[:, None, :] - self.X[:, cols].T[:, :, None]  # (B, n, p)
        own = np.take_along_axis(delta, np.broadcast_to(self.codes[None, :, None], (len(cols), self.n, 1)), axis=2)
        e = self.C[:, cols].T[:, None, :] - self.C[:, cols].T[:, :, None]  # e[b, q, a] = c_a - c_q
        return delta * delta, own * delta, e * e, e[:, :, :, None] * e[:, :, None, :]

    def scores(self, cols: np.ndarray, params: SeparabilityParams):
        dd2, dg, dcd2, dcg = self.contributions(cols)
        return _score_batch(self.d2 + dd2, self.g + dg, self.cd2 + dcd2, self.cg + dcg,
                            self.codes, params)

    def accept(self, f: int) -> None:
        dd2, dg, dcd2, dcg = self.contributions(np.array([f]))
        self.d2 += dd2[0]
        self.g += dg[0]
        self.cd2 += dcd2[0]
        self.cg += dcg[0]


def _score_batch(d2, g, cd2, cg, codes, params: SeparabilityParams):
    """Components and Sep for a batch of accumulated statistics."""
    eps = params.eps_norm
    B, n, p = d2.shape
    dist = np.sqrt(d2)
    own = np.take_along_axis(dist, np.broadcast_to(codes[None, :, None], (B, n, 1)), axis=2)
    theta_dis = own[:, :, 0].mean(axis=1)
    cos = _cos_from_parts(g, own, dist, eps)
    mu = fuzzy_memberships(dist, eps)
    theta_dir = (mu * (1.0 - cos)).sum(axis=2).mean(axis=1)

    cd = np.sqrt(cd2)
    nn = nearest_from_distances(cd)  # (B, p)
    bidx = np.arange(B)[:, None]
    qidx = np.arange(p)[None, :]
    lambda_dis = cd[bidx, qidx, nn].mean(axis=1)

    if p > 2:
        mubar = centroid_memberships_from_distances(cd, eps)
        # dot and lengths of (c_nn - c_q) against (c_b - c_q) for every b
        dots = cg[bidx, qidx, nn]  # (B, p, p) indexed [b, q, other]
        len_nn = cd[bidx, qidx, nn][:, :, None]
        cos_b = _cos_from_parts(dots, len_nn, cd, eps)
        weight = mubar[bidx, nn]  # row nn[q] of mubar
        admissible = np.ones((B, p, p), dtype=bool)
        admissible[:, np.arange(p), np.arange(p)] = False
        np.put_along_axis(admissible, nn[:, :, None], False, axis=2)
        lambda_dir = np.where(admissible, weight * (1.0 - cos_b), 0.0).sum(axis=2).mean(axis=1)
    else:
        lambda_dir = np.zeros(B)
    sep = compose(theta_dis, theta_dir, lambda_dis, lambda_dir, params)
    return theta_dis, theta_dir, lambda_dis, lambda_dir, sep


def _chunks(cands: np.ndarray, n: int, p: int, chunk_size: int | None):
    if chunk_size is None:
        per = max(n * p, p ** 3, 1)
        chunk_size = max(1, _CHUNK_BUDGET // per)
    return [cands[i:i + chunk_size] for i in range(0, len(cands), chunk_size)]


def select(d: Dataset, part: ClassPartition, k: int, params: SeparabilityParams | None = None,
           workers: int | None = None, chunk_size: int | None = None) -> SelectionTrace:
    """Greedily pick ``k`` features by maximum separability gain.

    Every iteration scores all remaining candidates, then takes the largest
    gain; gains within ``GAIN_TIE`` of the best go to the smallest index.
    Selection continues to ``k`` even when the best gain is negative.
    Results do not depend on ``workers`` or ``chunk_size``.
    """
    params = params or SeparabilityParams()
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if k > d.m:
        raise ValueError(f"k ({k}) exceeds number of features m ({d.m})")
    workers = default_workers() if workers is None else max(1, int(workers))

    state = _State(d, part)
    remaining = np.ones(d.m, dtype=bool)
    current = 0.0
    steps: list[SelectionStep] = []
    evaluations = 0
    pool = ThreadPoolExecutor(workers) if workers > 1 else None
    try:
        for _ in range(k):
            cands = np.flatnonzero(remaining)
            parts = _chunks(cands, d.n, part.p, chunk_size)
            run = (lambda c: state.scores(c, params))
            results = list(pool.map(run, parts)) if pool else [run(c) for c in parts]
            comps = [np.concatenate([r[j] for r in results]) for j in range(5)]
            evaluations += len(cands)
            gains = comps[4] - current
            best = gains.max()
            w = int(np.flatnonzero(gains >= best - GAIN_TIE)[0])
            f = int(cands[w])
            score = SeparabilityScore(*(float(c[w]) for c in comps))
            steps.append(SelectionStep(f, float(gains[w]), score))
            state.accept(f)
            remaining[f] = False
            current = score.sep
    finally:
        if pool:
            pool.shutdown()
    return SelectionTrace(steps, params, int(k), evaluations)
