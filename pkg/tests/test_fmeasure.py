import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from csfs import (
    ClassPriors,
    ConfusionCounts,
    DataError,
    ErrorProfile,
    UndefinedMeasureError,
    confusion,
    cost_fn_binary,
    error_profile,
    f_beta_binary,
    macro_f,
    mc_micro_f,
    ml_micro_f,
    total_cost,
)


def prof(e, P):
    return ErrorProfile(np.array(e, dtype=float), ClassPriors(tuple(P)))


def classic_f(tp, fp, fn, beta=1.0):
    b2 = beta * beta
    return (1 + b2) * tp / ((1 + b2) * tp + b2 * fn + fp)


@st.composite
def binary_profiles(draw, min_p=0.01):
    P = draw(st.floats(min_p, 0.99))
    fn = draw(st.floats(0.0, 1.0)) * P
    fp = draw(st.floats(0.0, 1.0)) * (1 - P)
    return prof((fn, fp), (P,))


@st.composite
def multi_profiles(draw, m=None):
    m = m or draw(st.integers(1, 5))
    P = np.array(draw(st.lists(st.floats(0.01, 0.99), min_size=m, max_size=m)))
    u = np.array(draw(st.lists(st.floats(0.0, 1.0), min_size=2 * m, max_size=2 * m)))
    e = np.empty(2 * m)
    e[0::2] = u[0::2] * P
    e[1::2] = u[1::2] * (1 - P)
    return prof(e, P)


@st.composite
def multiclass_profiles(draw, m=None):
    m = m or draw(st.integers(2, 5))
    w = np.array(draw(st.lists(st.floats(0.05, 1.0), min_size=m, max_size=m)))
    P = w / w.sum()
    u = np.array(draw(st.lists(st.floats(0.0, 1.0), min_size=m, max_size=m)))
    e = np.zeros(2 * m)
    e[0::2] = u * P
    return prof(e, P)


# --- confusion / error_profile


def test_confusion_identity_and_total_error():
    y = np.array([[1, -1], [-1, 1], [1, 1]])
    c = confusion(y, y)
    assert np.all(c.fp == 0) and np.all(c.fn == 0)
    c = confusion(-y, y)
    assert np.all(c.tp == 0) and np.all(c.tn == 0)


def test_confusion_hand_built():
    # pairs enumerated: 3 tp, 1 fp, 1 fn, 5 tn
    true = np.array([1, 1, 1, 1, -1, -1, -1, -1, -1, -1])
    pred = np.array([1, 1, 1, -1, 1, -1, -1, -1, -1, -1])
    c = confusion(pred, true)
    assert (c.tp[0], c.fp[0], c.fn[0], c.tn[0], c.n) == (3, 1, 1, 5, 10)
    p = error_profile(c)
    np.testing.assert_allclose(p.e, [0.1, 0.1])
    assert p.P[0] == 0.4


def test_confusion_shape_mismatch():
    with pytest.raises(DataError):
        confusion(np.ones((3, 1)), np.ones((4, 1)))


def test_error_profile_layout_m2():
    c = ConfusionCounts(tp=[3, 4], fp=[2, 1], fn=[1, 2], tn=[4, 3], n=10)
    p = error_profile(c)
    np.testing.assert_allclose(p.e, [0.1, 0.2, 0.2, 0.1])
    np.testing.assert_allclose(p.P, [0.4, 0.6])
    z = error_profile(ConfusionCounts([4], [0], [0], [6], 10))
    assert np.all(z.e == 0)


def test_counts_must_sum_to_n():
    with pytest.raises(DataError):
        ConfusionCounts([1], [1], [1], [1], 5)


# --- F values


def test_binary_examples():
    assert f_beta_binary(prof((0, 0), (0.4,))) == 1.0
    assert f_beta_binary(prof((0.1, 0.1), (0.4,))) == pytest.approx(classic_f(3, 1, 1))
    assert f_beta_binary(prof((0.1, 0.1), (0.4,))) == pytest.approx(0.75, abs=1e-15)
    assert f_beta_binary(prof((0.4, 0.2), (0.4,))) == 0.0


def test_binary_undefined():
    with pytest.raises(UndefinedMeasureError):
        f_beta_binary(prof((0, 0), (0.0,)))


def test_binary_beta_matches_counts():
    assert f_beta_binary(prof((0.1, 0.1), (0.4,)), beta=2.0) == pytest.approx(classic_f(3, 1, 1, 2.0))


def test_ml_micro_examples():
    p = prof((0.1, 0.1, 0.05, 0.05), (0.4, 0.3))
    assert ml_micro_f(p) == pytest.approx(1.1 / 1.4, abs=1e-15)
    assert ml_micro_f(prof((0, 0, 0, 0), (0.4, 0.3))) == 1.0


def test_ml_micro_matches_pooled_counts():
    true = np.array([[1, -1], [1, 1], [-1, 1], [-1, -1], [1, -1], [-1, 1]])
    pred = np.array([[1, 1], [-1, 1], [-1, 1], [1, -1], [1, -1], [-1, -1]])
    c = confusion(pred, true)
    assert ml_micro_f(error_profile(c)) == pytest.approx(classic_f(c.tp.sum(), c.fp.sum(), c.fn.sum()))


def test_mc_micro_examples():
    assert mc_micro_f(prof((0, 0, 0, 0), (0.6, 0.4)), ref_class=0) == 1.0
    p = prof((0.1, 0.05, 0.05, 0.1), (0.6, 0.4))
    assert mc_micro_f(p, ref_class=0) == pytest.approx(0.7 / 0.85, abs=1e-15)
    assert mc_micro_f(prof((0.0, 0.4, 0.4, 0.0), (0.6, 0.4)), ref_class=0) == 0.0
    with pytest.raises(DataError):
        mc_micro_f(p, ref_class=2)


def test_mc_default_ref_is_largest_prior():
    p = prof((0.05, 0.0, 0.1, 0.0), (0.4, 0.6))
    assert mc_micro_f(p) == mc_micro_f(p, ref_class=1)


def test_macro_examples():
    assert macro_f(ConfusionCounts([4, 6], [0, 0], [0, 0], [6, 4], 10)) == 1.0
    # class F values 0.75 (tp3 fp1 fn1) and 0.25 (tp1 fp3 fn3)
    c = ConfusionCounts([3, 1], [1, 3], [1, 3], [5, 3], 10)
    assert macro_f(c) == pytest.approx(0.5)
    c1 = ConfusionCounts([3], [1], [1], [5], 10)
    assert macro_f(c1) == f_beta_binary(error_profile(c1))


def test_total_cost_examples():
    p = prof((0.1, 0.1), (0.4,))
    assert total_cost(np.array([1.5, 0.5]), p) == pytest.approx(0.2)
    assert total_cost(np.array([1.0, 1.0]), p) == pytest.approx(0.2)
    assert total_cost(np.array([1.5, 0.5]), prof((0, 0), (0.4,))) == 0.0
    with pytest.raises(DataError):
        total_cost(np.array([1.0, 1.0, 1.0]), p)


# --- properties


@settings(max_examples=300, deadline=None)
@given(multi_profiles(), st.sampled_from([0.5, 1.0, 2.0]))
def test_range_ml(p, beta):
    assume(np.sum(p.P - p.fn) > 0)
    assert -1e-12 <= ml_micro_f(p, beta) <= 1.0 + 1e-12


@settings(max_examples=300, deadline=None)
@given(binary_profiles(), st.sampled_from([0.5, 1.0, 2.0]))
def test_range_binary_and_ml_reduction(p, beta):
    f = f_beta_binary(p, beta)
    assert -1e-12 <= f <= 1.0 + 1e-12
    assert ml_micro_f(p, beta) == f


@settings(max_examples=300, deadline=None)
@given(multiclass_profiles(), st.sampled_from([0.5, 1.0, 2.0]), st.data())
def test_range_mc(p, beta, data):
    ref = data.draw(st.integers(0, p.m - 1))
    assert -1e-12 <= mc_micro_f(p, beta, ref) <= 1.0 + 1e-12


@settings(max_examples=300, deadline=None)
@given(multiclass_profiles(m=2), st.sampled_from([0.5, 1.0, 2.0]))
def test_mc_two_class_is_binary_f_of_class_two(p, beta):
    # in multi-class data a missed class-1 sample is a false class-2 positive
    fn1, fn2 = p.fn
    as_binary = prof((fn2, fn1), (p.P[1],))
    assert mc_micro_f(p, beta, ref_class=0) == pytest.approx(f_beta_binary(as_binary, beta), rel=1e-12)


def test_level_set_worked_point():
    p = prof((0.1, 0.1), (0.4,))
    r = 0.75
    a = cost_fn_binary(r)
    assert total_cost(a, p) == pytest.approx(0.2, abs=1e-15)
    assert 2 * 0.4 * (1 - r) == pytest.approx(0.2, abs=1e-15)


@settings(max_examples=500, deadline=None)
@given(binary_profiles(), st.floats(0.01, 1.99), st.sampled_from([1.0]))
def test_cost_below_threshold_iff_f_above(p, r, beta):
    b2 = 1 + beta * beta
    r = r * b2 / 2
    f = f_beta_binary(p, beta)
    cost = total_cost(cost_fn_binary(r, beta), p)
    bound = b2 * p.P[0] * (1 - r)
    tol = 1e-12
    if f > r + tol:
        assert cost < bound + tol
    elif f < r - tol:
        assert cost > bound - tol
