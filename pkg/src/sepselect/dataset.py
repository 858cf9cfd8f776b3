"""Labeled tabular data: loading, min-max scaling, class partitions and CV folds."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np


class DatasetError(ValueError):
    """Raised for malformed or invalid input data."""


@dataclass(frozen=True)
class Dataset:
    """Immutable n x m feature matrix with one class label per row.

    Labels are kept as strings; ``class_order`` is their lexicographic
    ordering and ``codes[i]`` is the position of row ``i``'s label in it.
    """

    features: np.ndarray
    labels: tuple[str, ...]
    feature_names: tuple[str, ...]
    class_order: tuple[str, ...] = field(init=False)
    codes: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        X = np.array(self.features, dtype=float, copy=True)
        if X.ndim != 2:
            raise DatasetError(f"features must be 2-D, got shape {X.shape}")
        n, m = X.shape
        labels = tuple(str(v) for v in self.labels)
        names = tuple(str(v) for v in self.feature_names)
        if n < 2:
            raise DatasetError(f"need at least 2 instances, got {n}")
        if m < 1:
            raise DatasetError("need at least 1 feature")
        if len(labels) != n:
            raise DatasetError(f"{len(labels)} labels for {n} instances")
        if len(names) != m:
            raise DatasetError(f"{len(names)} feature names for {m} features")
        if not np.all(np.isfinite(X)):
            r, c = np.argwhere(~np.isfinite(X))[0]
            raise DatasetError(f"non-finite value at instance {r}, feature {names[c]}")
        order = tuple(sorted(set(labels)))
        if len(order) < 2:
            raise DatasetError(f"need at least 2 classes, found {len(order)}")
        lookup = {lab: q for q, lab in enumerate(order)}
        codes = np.array([lookup[lab] for lab in labels], dtype=np.intp)
        X.setflags(write=False)
        codes.setflags(write=False)
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "feature_names", names)
        object.__setattr__(self, "class_order", order)
        object.__setattr__(self, "codes", codes)

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def m(self) -> int:
        return self.features.shape[1]

    @property
    def p(self) -> int:
        return len(self.class_order)


@dataclass(frozen=True)
class ClassPartition:
    """Decision classes as disjoint index arrays, ordered like ``class_order``."""

    classes: tuple[np.ndarray, ...]
    class_order: tuple[str, ...]

    @property
    def p(self) -> int:
        return len(self.classes)

    def sizes(self) -> list[int]:
        return [len(c) for c in self.classes]


@dataclass(frozen=True)
class FoldAssignment:
    fold_of: np.ndarray
    folds: int
    seed: int

    def test_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.fold_of == fold)

    def train_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.fold_of != fold)


def _resolve_label_column(label_column: str | int, header: list[str] | None, width: int) -> int:
    if isinstance(label_column, str) and label_column.startswith("#"):
        label_column = int(label_column[1:])
    if isinstance(label_column, int):
        idx = label_column + width if label_column < 0 else label_column
        if not 0 <= idx < width:
            raise DatasetError(f"label column index {label_column} out of range for {width} columns")
        return idx
    if header is None:
        raise DatasetError(f"label column {label_column!r} given by name but the file has no header")
    if label_column not in header:
        raise DatasetError(f"label column {label_column!r} not found in header")
    return header.index(label_column)


def load_csv(path: str | Path, label_column: str | int = -1, has_header: bool = True) -> Dataset:
    """Read a comma-separated file with one label column and numeric features.

    ``label_column`` is a header name, an integer position (negative counts
    from the end), or a string ``"#<index>"``. Row numbers in error messages
    are 1-based file lines.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such file: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if not rows:
        raise DatasetError(f"{path} is empty")

    header = [c.strip() for c in rows[0]] if has_header else None
    body = rows[1:] if has_header else rows
    first_line = 2 if has_header else 1
    if not body:
        raise DatasetError(f"{path} has no data rows")
    width = len(header) if header is not None else len(body[0])
    lab = _resolve_label_column(label_column, header, width)
    names = header if header is not None else [f"f{j}" for j in range(width)]
    feat_cols = [j for j in range(width) if j != lab]

    X = np.empty((len(body), len(feat_cols)))
    labels = []
    for r, row in enumerate(body):
        line = r + first_line
        if len(row) != width:
            raise DatasetError(f"row {line} has {len(row)} cells, expected {width}")
        labels.append(row[lab].strip())
        for c, j in enumerate(feat_cols):
            try:
                X[r, c] = float(row[j])
            except ValueError:
                raise DatasetError(
                    f"cannot parse {row[j]!r} as a number at row {line}, column {names[j]}"
                ) from None
    return Dataset(X, tuple(labels), tuple(names[j] for j in feat_cols))


def minmax_normalize(d: Dataset) -> Dataset:
    """Rescale every column to [0, 1]; constant columns become all zeros."""
    X = d.features
    lo = X.min(axis=0)
    span = X.max(axis=0) - lo
    safe = np.where(span > 0, span, 1.0)
    Z = np.where(span > 0, (X - lo) / safe, 0.0)
    return Dataset(Z, d.labels, d.feature_names)


def partition_by_class(d: Dataset) -> ClassPartition:
    classes = tuple(np.flatnonzero(d.codes == q) for q in range(d.p))
    return ClassPartition(classes, d.class_order)


def stratified_folds(d: Dataset, folds: int, seed: int) -> FoldAssignment:
    """Stratified fold assignment.

    Each class is shuffled with a PCG64 generator seeded from ``(seed, q)``
    and dealt round-robin; the dealing position carries over between
    classes so folds stay balanced overall.
    """
    if folds < 2:
        raise DatasetError(f"folds must be >= 2, got {folds}")
    if folds > d.n:
        raise DatasetError(f"folds ({folds}) exceeds number of instances ({d.n})")
    fold_of = np.empty(d.n, dtype=np.intp)
    offset = 0
    key = int(seed) & 0xFFFFFFFFFFFFFFFF
    for q, members in enumerate(partition_by_class(d).classes):
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([key, q])))
        shuffled = rng.permutation(members)
        fold_of[shuffled] = (offset + np.arange(len(shuffled))) % folds
        offset = (offset + len(shuffled)) % folds
    fold_of.setflags(write=False)
    return FoldAssignment(fold_of, folds, int(seed))


def subset_columns(d: Dataset, subset: Sequence[int]) -> np.ndarray:
    return d.features[:, list(subset)]
