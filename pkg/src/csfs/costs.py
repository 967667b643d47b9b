"""Cost vectors generated from a discretized F-measure value.

For a target value ``r`` of an F-measure, the level set ``F(e) = r`` is a
hyperplane in error-profile space; its normal gives per-class false negative
and false positive costs.  Layout matches ``ErrorProfile``: even 0-based
positions are FN costs, odd positions FP costs.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import CostDomainError, DataError


class Variant(str, enum.Enum):
    BINARY = "binary"
    MULTILABEL_MICRO = "multilabel_micro"
    MULTICLASS_MICRO = "multiclass_micro"


@dataclass(frozen=True, eq=False)
class CostVector:
    a: np.ndarray
    r: float
    beta: float
    variant: Variant

    def __post_init__(self):
        a = np.array(self.a, dtype=float).ravel()
        a.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "variant", Variant(self.variant))

    @property
    def m(self) -> int:
        return self.a.size // 2

    @property
    def fn_costs(self) -> np.ndarray:
        return self.a[0::2]

    @property
    def fp_costs(self) -> np.ndarray:
        return self.a[1::2]

    def __eq__(self, other):
        if not isinstance(other, CostVector):
            return NotImplemented
        return (
            np.array_equal(self.a, other.a)
            and self.r == other.r
            and self.beta == other.beta
            and self.variant is other.variant
        )


def _check_r(r: float, beta: float) -> float:
    if not beta > 0:
        raise CostDomainError(f"beta must be positive, got {beta}")
    hi = 1.0 + beta * beta
    if not 0.0 <= r <= hi:
        raise CostDomainError(f"r = {r} outside [0, {hi}] would give a negative cost")
    return hi


def discretize(T: int = 20, beta: float = 1.0) -> list[float]:
    """``T`` evenly spaced values strictly inside (0, 1 + beta^2)."""
    if int(T) != T or T < 1:
        raise DataError(f"T must be a positive integer, got {T}")
    if not beta > 0:
        raise CostDomainError(f"beta must be positive, got {beta}")
    hi = 1.0 + beta * beta
    return [i * hi / (T + 1) for i in range(1, int(T) + 1)]


def cost_fn_binary(r: float, beta: float = 1.0) -> CostVector:
    hi = _check_r(r, beta)
    return CostVector(np.array([hi - r, r]), r, beta, Variant.BINARY)


def cost_fn_multilabel(r: float, beta: float = 1.0, m: int = 1) -> CostVector:
    hi = _check_r(r, beta)
    if m < 1:
        raise DataError(f"m must be >= 1, got {m}")
    a = np.empty(2 * m)
    a[0::2] = hi - r
    a[1::2] = r
    return CostVector(a, r, beta, Variant.MULTILABEL_MICRO)


def cost_fn_multiclass(r: float, beta: float = 1.0, m: int = 2, ref_class: int = 0) -> CostVector:
    """FN of ``ref_class`` costs ``r``, other FNs ``1 + beta^2 - r``, FPs 0.

    ``ref_class`` is 0-based.
    """
    hi = _check_r(r, beta)
    if m < 2:
        raise DataError(f"multi-class costs need m >= 2, got {m}")
    if not 0 <= ref_class < m:
        raise DataError(f"ref_class {ref_class} out of range for m = {m}")
    a = np.zeros(2 * m)
    a[0::2] = hi - r
    a[2 * ref_class] = r
    return CostVector(a, r, beta, Variant.MULTICLASS_MICRO)


def cost_vector(variant, r: float, beta: float = 1.0, m: int = 1, ref_class: int = 0) -> CostVector:
    """Dispatch to the cost function of ``variant``."""
    variant = Variant(variant)
    if variant is Variant.BINARY:
        if m != 1:
            raise DataError(f"binary costs need m = 1, got {m}")
        return cost_fn_binary(r, beta)
    if variant is Variant.MULTILABEL_MICRO:
        return cost_fn_multilabel(r, beta, m)
    return cost_fn_multiclass(r, beta, m, ref_class)


def build_cost_matrix(labels, a) -> np.ndarray:
    """Per-sample cost matrix: FN cost where the label is +1, FP cost otherwise."""
    Y = np.asarray(labels)
    if Y.ndim == 1:
        Y = Y.reshape(-1, 1)
    av = np.asarray(getattr(a, "a", a), dtype=float).ravel()
    if av.size != 2 * Y.shape[1]:
        raise DataError(f"cost vector length {av.size} does not match m = {Y.shape[1]}")
    return np.where(Y == 1, av[0::2][None, :], av[1::2][None, :])
