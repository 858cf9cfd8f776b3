"""Friedman test and Nemenyi critical difference over datasets x algorithms tables."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats as st

# Nemenyi q_alpha (Studentized range / sqrt(2), infinite dof), keyed by algorithm count
Q_ALPHA = {
    0.05: {2: 1.960, 3: 2.343, 4: 2.569, 5: 2.728, 6: 2.850, 7: 2.949, 8: 3.031, 9: 3.102, 10: 3.164},
    0.10: {2: 1.645, 3: 2.052, 4: 2.291, 5: 2.459, 6: 2.589, 7: 2.693, 8: 2.780, 9: 2.855, 10: 2.920},
}


class DegenerateFriedmanError(ArithmeticError):
    """N(s-1) - chi2 <= 0: rankings agree perfectly and F_F is undefined."""


@dataclass(frozen=True)
class RankTable:
    scores: np.ndarray
    ranks: np.ndarray
    avg_ranks: np.ndarray

    @property
    def n_datasets(self) -> int:
        return self.ranks.shape[0]

    @property
    def n_algorithms(self) -> int:
        return self.ranks.shape[1]


@dataclass(frozen=True)
class FriedmanResult:
    chi2: float
    f_stat: float
    dof: tuple[int, int]
    critical_value: float | None = None

    @property
    def significant(self) -> bool | None:
        if self.critical_value is None:
            return None
        return self.f_stat > self.critical_value


def rank_rows(scores, higher_is_better: bool = True) -> RankTable:
    """Rank algorithms within each dataset row; 1 is best, ties share the mean rank."""
    S = np.asarray(scores, dtype=float)
    if S.ndim != 2 or S.shape[0] < 2 or S.shape[1] < 2:
        raise ValueError(f"need an N x s table with N, s >= 2, got shape {S.shape}")
    if not np.all(np.isfinite(S)):
        raise ValueError("score table contains non-finite values")
    R = st.rankdata(-S if higher_is_better else S, method="average", axis=1)
    return RankTable(S, R, R.mean(axis=0))


def friedman(table: RankTable, critical_value: float | None = None) -> FriedmanResult:
    N, s = table.n_datasets, table.n_algorithms
    R = table.avg_ranks
    chi2 = 12.0 * N / (s * (s + 1)) * (float(np.sum(R ** 2)) - s * (s + 1) ** 2 / 4.0)
    chi2 = max(chi2, 0.0)
    denom = N * (s - 1) - chi2
    if denom <= 1e-12 * N * (s - 1):
        raise DegenerateFriedmanError(
            f"N(s-1) - chi2 = {denom:.3g}: rankings agree on every dataset, F_F undefined"
        )
    f_stat = (N - 1) * chi2 / denom
    return FriedmanResult(chi2, f_stat, (s - 1, (s - 1) * (N - 1)), critical_value)


def f_critical_value(s: int, N: int, alpha: float = 0.05) -> float:
    """Upper-alpha quantile of F((s-1), (s-1)(N-1))."""
    return float(st.f.ppf(1.0 - alpha, s - 1, (s - 1) * (N - 1)))


def q_alpha(s: int, alpha: float = 0.05) -> float:
    """Tabulated q_alpha; falls back to scipy's Studentized range outside the table."""
    table = Q_ALPHA.get(round(alpha, 4), {})
    if s in table:
        return table[s]
    return float(st.studentized_range.ppf(1.0 - alpha, s, np.inf) / math.sqrt(2.0))


def nemenyi_cd(s: int, N: int, q: float) -> float:
    if s < 2 or N < 1 or q < 0:
        raise ValueError(f"invalid CD inputs s={s}, N={N}, q={q}")
    return q * math.sqrt(s * (s + 1) / (6.0 * N))
