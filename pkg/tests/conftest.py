import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from sepselect import Dataset, partition_by_class  # noqa: E402


def make_dataset(X, y, names=None):
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    names = names or [f"f{j}" for j in range(X.shape[1])]
    return Dataset(X, [str(v) for v in y], names)


def random_dataset(rng, n_max=30, m_max=8, p_choices=(2, 3, 4)):
    p = int(rng.choice(p_choices))
    n = int(rng.integers(max(p, 4), n_max + 1))
    m = int(rng.integers(1, m_max + 1))
    y = np.concatenate([np.arange(p), rng.integers(0, p, n - p)])
    rng.shuffle(y)
    return make_dataset(rng.random((n, m)), y)


@pytest.fixture
def toy_1d():
    """A = {0, 2}, B = {10, 12} on a single feature."""
    d = make_dataset([0, 2, 10, 12], ["A", "A", "B", "B"])
    return d, partition_by_class(d)


def pytest_terminal_summary(terminalreporter):
    try:
        import test_acceptance
    except ImportError:
        return
    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.RESULTS:
            terminalreporter.write_line(line)
