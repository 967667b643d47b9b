"""Confusion counts, error profiles and F-measures.

An error profile is the length-2m vector
``(FN_1, FP_1, ..., FN_m, FP_m)`` of per-class false negative and false
positive probabilities, kept together with the class priors ``P``.  All
F-measures here are fractional-linear in that vector.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import ClassPriors
from .errors import DataError, UndefinedMeasureError


@dataclass(frozen=True, eq=False)
class ConfusionCounts:
    tp: np.ndarray
    fp: np.ndarray
    fn: np.ndarray
    tn: np.ndarray
    n: int

    def __post_init__(self):
        for name in ("tp", "fp", "fn", "tn"):
            a = np.array(getattr(self, name), dtype=np.int64).ravel()
            if np.any(a < 0):
                raise DataError(f"negative {name} count")
            a.setflags(write=False)
            object.__setattr__(self, name, a)
        if not (self.tp.size == self.fp.size == self.fn.size == self.tn.size):
            raise DataError("per-class count vectors differ in length")
        if np.any(self.tp + self.fp + self.fn + self.tn != self.n):
            raise DataError("tp + fp + fn + tn must equal n for every class")

    @property
    def m(self) -> int:
        return self.tp.size


@dataclass(frozen=True, eq=False)
class ErrorProfile:
    e: np.ndarray
    priors: ClassPriors

    def __post_init__(self):
        e = np.array(self.e, dtype=float).ravel()
        if e.size != 2 * len(self.priors):
            raise DataError(f"profile length {e.size} != 2m = {2 * len(self.priors)}")
        e.setflags(write=False)
        object.__setattr__(self, "e", e)

    @property
    def m(self) -> int:
        return len(self.priors)

    @property
    def fn(self) -> np.ndarray:
        return self.e[0::2]

    @property
    def fp(self) -> np.ndarray:
        return self.e[1::2]

    @property
    def P(self) -> np.ndarray:
        return self.priors.as_array()

    def is_valid(self, atol: float = 1e-12) -> bool:
        """Check 0 <= FN_k <= P_k and 0 <= FP_k <= 1 - P_k."""
        P = self.P
        return bool(
            np.all(self.fn >= -atol)
            and np.all(self.fn <= P + atol)
            and np.all(self.fp >= -atol)
            and np.all(self.fp <= 1 - P + atol)
        )


def confusion(predictions, labels) -> ConfusionCounts:
    """Per-class confusion counts from two {-1, +1} label matrices."""
    pred = np.asarray(predictions)
    true = np.asarray(labels)
    if pred.ndim == 1:
        pred = pred.reshape(-1, 1)
    if true.ndim == 1:
        true = true.reshape(-1, 1)
    if pred.shape != true.shape:
        raise DataError(f"shape mismatch: predictions {pred.shape} vs labels {true.shape}")
    if not (np.all(np.isin(pred, (-1, 1))) and np.all(np.isin(true, (-1, 1)))):
        raise DataError("entries must be -1 or +1")
    pp, tp_ = pred == 1, true == 1
    return ConfusionCounts(
        tp=(pp & tp_).sum(axis=0),
        fp=(pp & ~tp_).sum(axis=0),
        fn=(~pp & tp_).sum(axis=0),
        tn=(~pp & ~tp_).sum(axis=0),
        n=true.shape[0],
    )


def error_profile(counts: ConfusionCounts) -> ErrorProfile:
    if counts.n <= 0:
        raise DataError("cannot build an error profile from n = 0 samples")
    n = counts.n
    e = np.empty(2 * counts.m)
    e[0::2] = counts.fn / n
    e[1::2] = counts.fp / n
    return ErrorProfile(e, ClassPriors(tuple((counts.tp + counts.fn) / n)))


def _ratio(num: float, den: float, what: str) -> float:
    if not den > 0:
        raise UndefinedMeasureError(f"{what} undefined: denominator {den!r} is not positive")
    return float(num / den)


def f_beta_binary(e: ErrorProfile, beta: float = 1.0) -> float:
    """Binary F-beta of class 1 written in terms of the error profile."""
    if e.m != 1:
        raise DataError(f"binary F needs m = 1, got m = {e.m}")
    b2 = 1.0 + beta * beta
    P1 = e.P[0]
    fn, fp = e.e[0], e.e[1]
    return _ratio(b2 * (P1 - fn), b2 * P1 + fp - fn, "F_beta")


def ml_micro_f(e: ErrorProfile, beta: float = 1.0) -> float:
    """Multi-label micro F-beta (pooled over classes)."""
    b2 = 1.0 + beta * beta
    P = e.P
    num = b2 * np.sum(P - e.fn)
    den = np.sum(b2 * P + e.fp - e.fn)
    return _ratio(num, den, "multi-label micro-F")


def default_ref_class(priors: ClassPriors) -> int:
    """Class with the largest prior; ties go to the lowest index."""
    return int(np.argmax(priors.as_array()))


def mc_micro_f(e: ErrorProfile, beta: float = 1.0, ref_class: int | None = None) -> float:
    """Multi-class micro F-beta with ``ref_class`` in the privileged slot.

    The reference class plays the role of the excluded/background class: the
    measure pools the true positives of every other class.  ``ref_class`` is
    0-based and defaults to the class with the largest prior.
    """
    m = e.m
    if m < 2:
        raise DataError("multi-class micro-F needs m >= 2")
    if ref_class is None:
        ref_class = default_ref_class(e.priors)
    if not 0 <= ref_class < m:
        raise DataError(f"ref_class {ref_class} out of range for m = {m}")
    b2 = 1.0 + beta * beta
    others = [k for k in range(m) if k != ref_class]
    P1 = e.P[ref_class]
    fn_ref = e.fn[ref_class]
    fn_others = e.fn[others].sum()
    return _ratio(b2 * (1.0 - P1 - fn_others), b2 * (1.0 - P1) - fn_others + fn_ref, "multi-class micro-F")


def per_class_f(counts: ConfusionCounts, beta: float = 1.0) -> np.ndarray:
    """Binary F-beta of each class treated one-vs-rest."""
    prof = error_profile(counts)
    return np.array(
        [
            f_beta_binary(ErrorProfile(prof.e[2 * k : 2 * k + 2], ClassPriors((prof.P[k],))), beta)
            for k in range(counts.m)
        ]
    )


def macro_f(counts: ConfusionCounts, beta: float = 1.0) -> float:
    """Unweighted mean of the per-class binary F-beta values."""
    return float(np.mean(per_class_f(counts, beta)))


def total_cost(a, e: ErrorProfile) -> float:
    """Inner product of a cost vector and an error profile."""
    av = np.asarray(getattr(a, "a", a), dtype=float).ravel()
    if av.size != e.e.size:
        raise DataError(f"cost vector length {av.size} != profile length {e.e.size}")
    if np.any(av < 0):
        raise DataError("cost vector has negative entries")
    return float(av @ e.e)
