import numpy as np
import pytest

from csfs import Dataset, Task


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_instance(rng, d, n, m):
    X = rng.standard_normal((d, n))
    Y = np.where(rng.random((n, m)) < 0.4, 1.0, -1.0)
    C = rng.uniform(0.0, 2.0, (n, m))
    return X, Y, C


def toy_binary(n_pos=30, n_neg=10, d=3, seed=0):
    rng = np.random.default_rng(seed)
    X = rng.random((d, n_pos + n_neg))
    y = np.r_[np.ones(n_pos), -np.ones(n_neg)].astype(int)
    return Dataset(X, y, Task.BINARY)
