import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from csfs import (
    CostDomainError,
    DataError,
    Variant,
    build_cost_matrix,
    cost_fn_binary,
    cost_fn_multiclass,
    cost_fn_multilabel,
    cost_vector,
    discretize,
)


def test_discretize_examples():
    assert discretize(3, 1.0) == [0.5, 1.0, 1.5]
    assert discretize(1, 1.0) == [1.0]
    assert len(discretize()) == 20
    with pytest.raises(DataError):
        discretize(0)


@pytest.mark.parametrize("beta", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("T", [1, 2, 5, 20, 33])
def test_discretize_range_monotone_symmetric(T, beta):
    rs = np.array(discretize(T, beta))
    hi = 1 + beta**2
    assert np.all((rs > 0) & (rs < hi))
    assert np.all(np.diff(rs) > 0)
    np.testing.assert_allclose(rs + rs[::-1], hi, rtol=0, atol=1e-12)


def test_binary_golden():
    assert list(cost_fn_binary(0.5).a) == [1.5, 0.5]
    assert list(cost_fn_binary(1.0).a) == [1.0, 1.0]
    a = cost_fn_binary(1.2).a
    assert list(a) == [2.0 - 1.2, 1.2]
    assert a[0] == pytest.approx(0.8, abs=1e-15)
    # minority (negative class) errors are the false positives, now the dearer ones
    assert a[1] > a[0]


def test_binary_domain():
    with pytest.raises(CostDomainError):
        cost_fn_binary(2.01)
    with pytest.raises(CostDomainError):
        cost_fn_binary(-0.1)
    assert list(cost_fn_binary(0.0).a) == [2.0, 0.0]


def test_multilabel_golden():
    assert list(cost_fn_multilabel(0.5, 1.0, 2).a) == [1.5, 0.5, 1.5, 0.5]
    assert list(cost_fn_multilabel(0.0, 1.0, 2).a) == [2.0, 0.0, 2.0, 0.0]
    assert list(cost_fn_multilabel(0.7, 1.0, 1).a) == list(cost_fn_binary(0.7).a)


def test_multiclass_golden():
    # the privileged class is the second one (index 1)
    a = cost_fn_multiclass(0.5, 1.0, 3, ref_class=1)
    assert list(a.a) == [1.5, 0.0, 0.5, 0.0, 1.5, 0.0]
    a = cost_fn_multiclass(2.0, 1.0, 3, ref_class=0)
    assert np.count_nonzero(a.a) == 1 and a.a[0] == 2.0
    with pytest.raises(DataError):
        cost_fn_multiclass(0.5, 1.0, 3, ref_class=3)
    with pytest.raises(DataError):
        cost_fn_multiclass(0.5, 1.0, 1)


@pytest.mark.parametrize("ref", [0, 1, 2, 3])
def test_multiclass_permutation(ref):
    a = cost_fn_multiclass(0.3, 1.0, 4, ref_class=ref).a
    expect = np.zeros(8)
    expect[0::2] = 1.7
    expect[2 * ref] = 0.3
    np.testing.assert_array_equal(a, expect)


@pytest.mark.parametrize("beta", [0.5, 1.0, 2.0])
def test_costs_non_negative(beta):
    for r in discretize(20, beta):
        for variant, m in ((Variant.BINARY, 1), (Variant.MULTILABEL_MICRO, 3), (Variant.MULTICLASS_MICRO, 3)):
            assert np.all(cost_vector(variant, r, beta, m).a >= 0)


@pytest.mark.parametrize("beta", [0.5, 1.0, 2.0])
def test_equal_cost_point(beta, rng):
    r = (1 + beta**2) / 2
    for a in (cost_fn_binary(r, beta), cost_fn_multilabel(r, beta, 3)):
        assert np.unique(a.a).size == 1
        Y = np.where(rng.random((7, a.m)) < 0.5, 1, -1)
        C = build_cost_matrix(Y, a)
        assert np.unique(C).size == 1


def test_build_cost_matrix_examples():
    C = build_cost_matrix(np.array([1, -1, -1]), cost_fn_binary(0.5))
    np.testing.assert_array_equal(C[:, 0], [1.5, 0.5, 0.5])
    assert np.all(build_cost_matrix(np.array([1, -1, 1]), np.array([1.0, 1.0])) == 1)
    Y = np.array([[1, -1], [-1, 1], [1, -1]])
    C = build_cost_matrix(Y, np.array([0.5, 0.0, 1.5, 0.0]))
    np.testing.assert_array_equal(C, [[0.5, 0.0], [0.0, 1.5], [0.5, 0.0]])
    with pytest.raises(DataError):
        build_cost_matrix(Y, np.array([1.0, 1.0]))


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 4), st.floats(0.0, 2.0), st.integers(0, 10**6))
def test_cost_matrix_values_come_from_a(m, r, seed):
    rng = np.random.default_rng(seed)
    Y = np.where(rng.random((6, m)) < 0.5, 1, -1)
    a = cost_fn_multilabel(r, 1.0, m)
    C = build_cost_matrix(Y, a)
    assert set(np.unique(C)) <= set(a.a)
    for k in range(m):
        assert np.all(C[Y[:, k] == 1, k] == a.a[2 * k])
        assert np.all(C[Y[:, k] == -1, k] == a.a[2 * k + 1])
