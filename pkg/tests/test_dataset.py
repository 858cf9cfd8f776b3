import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as hs
from hypothesis.extra.numpy import arrays

from conftest import make_dataset
from sepselect import DatasetError, load_csv, minmax_normalize, partition_by_class, stratified_folds


def write(tmp_path, text, name="d.csv"):
    path = tmp_path / name
    path.write_text(text)
    return path


def test_load_small_csv(tmp_path):
    d = load_csv(write(tmp_path, "f1,f2,y\n0,0,a\n2,2,a\n5,5,b\n"), "y")
    assert (d.n, d.m, d.p) == (3, 2, 2)
    assert d.feature_names == ("f1", "f2")
    np.testing.assert_array_equal(d.features, [[0, 0], [2, 2], [5, 5]])
    assert list(d.codes) == [0, 0, 1]


def test_load_label_by_index_and_no_header(tmp_path):
    path = write(tmp_path, "a,1,2\nb,3,4\n")
    d = load_csv(path, "#0", has_header=False)
    assert d.labels == ("a", "b")
    np.testing.assert_array_equal(d.features, [[1, 2], [3, 4]])
    assert load_csv(path, 0, has_header=False).m == 2


def test_parse_error_names_row_and_column(tmp_path):
    path = write(tmp_path, "f1,f2,y\nabc,0,a\n2,2,b\n")
    with pytest.raises(DatasetError, match=r"row 2, column f1"):
        load_csv(path, "y")


@pytest.mark.parametrize(
    "text, pattern",
    [
        ("", "empty"),
        ("f1,y\n1,a\n2,a\n", "at least 2 classes"),
        ("f1,y\n", "no data rows"),
        ("f1,y\n1,a,3\n2,b\n", "cells"),
    ],
)
def test_load_errors(tmp_path, text, pattern):
    with pytest.raises(DatasetError, match=pattern):
        load_csv(write(tmp_path, text), "y" if text else -1)


def test_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_csv(tmp_path / "nope.csv")


def test_missing_label_column(tmp_path):
    with pytest.raises(DatasetError, match="not found"):
        load_csv(write(tmp_path, "f1,y\n1,a\n2,b\n"), "label")


def test_nonfinite_rejected():
    with pytest.raises(DatasetError, match="non-finite"):
        make_dataset([[0.0], [np.nan]], ["a", "b"])


def test_dataset_is_read_only():
    d = make_dataset([[0.0], [1.0]], ["a", "b"])
    with pytest.raises(ValueError):
        d.features[0, 0] = 5.0


@pytest.mark.parametrize(
    "col, expected",
    [
        ([0, 5, 10], [0, 0.5, 1]),
        ([3, 3, 3], [0, 0, 0]),
        ([2, 4, 8], [0, 1 / 3, 1]),
    ],
)
def test_minmax_columns(col, expected):
    d = minmax_normalize(make_dataset(col, ["a", "b", "b"]))
    np.testing.assert_allclose(d.features[:, 0], expected, rtol=0, atol=1e-15)


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, hs.tuples(hs.integers(2, 12), hs.integers(1, 5)),
              elements=hs.floats(-1e6, 1e6, allow_nan=False)))
def test_minmax_idempotent(X):
    y = ["a"] + ["b"] * (len(X) - 1)
    once = minmax_normalize(make_dataset(X, y))
    twice = minmax_normalize(once)
    np.testing.assert_array_equal(once.features, twice.features)
    assert once.features.min() >= 0 and once.features.max() <= 1


def test_partition_basic():
    part = partition_by_class(make_dataset([0, 1, 2], ["a", "a", "b"]))
    assert [list(c) for c in part.classes] == [[0, 1], [2]]


def test_partition_canonical_order():
    part = partition_by_class(make_dataset([0, 1, 2, 3], ["b", "a", "b", "a"]))
    assert part.class_order == ("a", "b")
    assert [list(c) for c in part.classes] == [[1, 3], [0, 2]]


def test_partition_yale_shape():
    y = np.repeat([f"s{i:02d}" for i in range(15)], 11)
    part = partition_by_class(make_dataset(np.zeros(165), y))
    assert part.p == 15 and part.sizes() == [11] * 15
    assert sum(part.sizes()) == 165


def test_folds_exact_divisibility():
    d = make_dataset(np.arange(10), ["a"] * 5 + ["b"] * 5)
    fa = stratified_folds(d, 5, seed=3)
    for f in range(5):
        members = fa.test_indices(f)
        assert sorted(d.codes[members]) == [0, 1]


def test_folds_deterministic():
    d = make_dataset(np.arange(10), ["a"] * 5 + ["b"] * 5)
    a = stratified_folds(d, 3, seed=11).fold_of
    b = stratified_folds(d, 3, seed=11).fold_of
    np.testing.assert_array_equal(a, b)


def test_folds_uneven_sizes():
    d = make_dataset(np.arange(7), ["a"] * 4 + ["b"] * 3)
    fa = stratified_folds(d, 3, seed=0)
    sizes0 = sorted(np.bincount(fa.fold_of[d.codes == 0], minlength=3))
    sizes1 = sorted(np.bincount(fa.fold_of[d.codes == 1], minlength=3))
    assert sizes0 == [1, 1, 2] and sizes1 == [1, 1, 1]


def test_folds_errors():
    d = make_dataset(np.arange(4), ["a", "a", "b", "b"])
    with pytest.raises(DatasetError):
        stratified_folds(d, 5, seed=0)
    with pytest.raises(DatasetError):
        stratified_folds(d, 1, seed=0)


@settings(max_examples=60, deadline=None)
@given(hs.lists(hs.integers(1, 9), min_size=2, max_size=6), hs.integers(2, 10), hs.integers(-2**63, 2**63 - 1))
def test_folds_stratified_and_nonempty(sizes, folds, seed):
    y = np.repeat(np.arange(len(sizes)), sizes)
    d = make_dataset(np.zeros(len(y)), y)
    if folds > d.n:
        return
    fa = stratified_folds(d, folds, seed)
    for q in range(d.p):
        counts = np.bincount(fa.fold_of[d.codes == q], minlength=folds)
        assert counts.max() - counts.min() <= 1
    assert np.all(np.bincount(fa.fold_of, minlength=folds) > 0)
