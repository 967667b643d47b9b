"""Iteratively reweighted solver for cost-sensitive joint l2,1 regression.

Minimizes

    ||(X^T W - Y) * C||_{2,1} + lam * ||W||_{2,1}

over the projection matrix ``W`` (d x m), where ``*`` is the elementwise
product and ``||A||_{2,1}`` is the sum of the l2 norms of the rows of ``A``.
Both norms are smoothed with ``sqrt(||.||^2 + zeta)`` so the reweighting
matrices stay finite; each iteration is a majorize-minimize step on the
smoothed objective and therefore never increases it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import linalg

from .errors import DataError, NumericalError, ParseError


@dataclass(frozen=True)
class SolverConfig:
    lam: float = 1.0
    zeta: float = 1e-8
    max_iter: int = 100
    rel_tol: float = 1e-6
    seed: int = 0
    init_scale: float = 0.01

    def __post_init__(self):
        if not self.lam > 0:
            raise DataError(f"lambda must be positive, got {self.lam}")
        if not self.zeta > 0:
            raise DataError(f"zeta must be positive, got {self.zeta}")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise DataError(f"max_iter must be a positive integer, got {self.max_iter}")
        if not self.rel_tol > 0:
            raise DataError(f"rel_tol must be positive, got {self.rel_tol}")


@dataclass(frozen=True, eq=False)
class FitResult:
    W: np.ndarray
    objective_trace: list
    iterations_used: int
    converged: bool
    initial_objective: float = math.nan
    meta: dict = field(default_factory=dict)

    def row_norms(self) -> np.ndarray:
        return np.linalg.norm(self.W, axis=1)


def _check_shapes(W, X, Y, C):
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    C = np.asarray(C, dtype=float)
    if Y.ndim == 1:
        Y = Y.reshape(-1, 1)
    if C.ndim == 1:
        C = C.reshape(-1, 1)
    if X.ndim != 2:
        raise DataError(f"X must be 2-D (d x n), got shape {X.shape}")
    d, n = X.shape
    if Y.shape[0] != n or Y.ndim != 2:
        raise DataError(f"Y shape {Y.shape} incompatible with n = {n}")
    if C.shape != Y.shape:
        raise DataError(f"C shape {C.shape} != Y shape {Y.shape}")
    if W is not None:
        W = np.asarray(W, dtype=float)
        if W.ndim == 1:
            W = W.reshape(-1, 1)
        if W.shape != (d, Y.shape[1]):
            raise DataError(f"W shape {W.shape} != ({d}, {Y.shape[1]})")
    return W, X, Y, C


def weighted_residual(W, X, Y, C) -> np.ndarray:
    """``(X^T W - Y) * C``, an n x m matrix."""
    return (X.T @ W - Y) * C


def l21(A) -> float:
    """Sum of row l2 norms."""
    return float(np.linalg.norm(np.asarray(A, dtype=float), axis=1).sum())


def objective(W, X, Y, C, lam: float) -> float:
    W, X, Y, C = _check_shapes(W, X, Y, C)
    return l21(weighted_residual(W, X, Y, C)) + lam * l21(W)


def smoothed_objective(W, X, Y, C, lam: float, zeta: float) -> float:
    if not zeta > 0:
        raise DataError(f"zeta must be positive, got {zeta}")
    W, X, Y, C = _check_shapes(W, X, Y, C)
    R = weighted_residual(W, X, Y, C)
    loss = np.sqrt(np.einsum("ij,ij->i", R, R) + zeta).sum()
    reg = np.sqrt(np.einsum("ij,ij->i", W, W) + zeta).sum()
    return float(loss + lam * reg)


def update_D(W, zeta: float) -> np.ndarray:
    """Diagonal of the regularizer reweighting matrix, one entry per feature."""
    W = np.asarray(W, dtype=float)
    if W.ndim == 1:
        W = W.reshape(-1, 1)
    return 0.5 / np.sqrt(np.einsum("ij,ij->i", W, W) + zeta)


def update_G(W, X, Y, C, zeta: float) -> np.ndarray:
    """Diagonal of the loss reweighting matrix, one entry per sample."""
    W, X, Y, C = _check_shapes(W, X, Y, C)
    R = weighted_residual(W, X, Y, C)
    return 0.5 / np.sqrt(np.einsum("ij,ij->i", R, R) + zeta)


def solve_column(k: int, X, Y, C, D, G, lam: float) -> np.ndarray:
    """Closed-form update of column ``k`` of W for frozen D and G.

    Solves ``(lam*diag(D) + X U G U X^T) w = X U G U y_k`` with
    ``U = diag(C[:, k])`` by Cholesky factorization.

    Raises:
        NumericalError: the system matrix is not numerically positive
            definite (message carries a condition estimate).
    """
    _, X, Y, C = _check_shapes(None, X, Y, C)
    s = np.asarray(G, dtype=float) * C[:, k] ** 2
    A = (X * s) @ X.T
    A[np.diag_indices_from(A)] += lam * np.asarray(D, dtype=float)
    b = X @ (s * Y[:, k])
    try:
        factor = linalg.cho_factor(A, lower=False, check_finite=True)
        return linalg.cho_solve(factor, b, check_finite=False)
    except (linalg.LinAlgError, ValueError) as exc:
        with np.errstate(all="ignore"):
            cond = np.linalg.cond(A) if np.all(np.isfinite(A)) else math.inf
        raise NumericalError(f"column {k}: singular system (condition ~ {cond:.3g}): {exc}") from None


def initial_W(d: int, m: int, seed: int, scale: float = 0.01) -> np.ndarray:
    return scale * np.random.default_rng(seed).standard_normal((d, m))


def fit(X, Y, C, config: SolverConfig | None = None, W0=None) -> FitResult:
    """Run the reweighting iterations until the smoothed objective settles.

    Stops when the relative decrease of the smoothed objective falls below
    ``config.rel_tol`` or after ``config.max_iter`` iterations.  ``W0``
    overrides the seeded random start (warm start).

    Raises:
        NumericalError: the objective became non-finite; ``trace`` holds the
            values recorded so far.
    """
    cfg = config or SolverConfig()
    W0, X, Y, C = _check_shapes(W0, X, Y, C)
    if np.any(C < 0):
        raise DataError("cost matrix has negative entries")
    d, m = X.shape[0], Y.shape[1]
    W = initial_W(d, m, cfg.seed, cfg.init_scale) if W0 is None else W0.copy()
    lam, zeta = cfg.lam, cfg.zeta

    prev = smoothed_objective(W, X, Y, C, lam, zeta)
    start = prev
    if not math.isfinite(prev):
        raise NumericalError("initial objective is not finite")
    trace = []
    converged = False
    C2 = C * C
    for _ in range(int(cfg.max_iter)):
        D = update_D(W, zeta)
        G = update_G(W, X, Y, C, zeta)
        W_new = np.empty_like(W)
        for k in range(m):
            s = G * C2[:, k]
            A = (X * s) @ X.T
            A[np.diag_indices_from(A)] += lam * D
            b = X @ (s * Y[:, k])
            try:
                W_new[:, k] = linalg.cho_solve(linalg.cho_factor(A, check_finite=False), b, check_finite=False)
            except linalg.LinAlgError:
                W_new[:, k] = solve_column(k, X, Y, C, D, G, lam)
        W = W_new
        obj = smoothed_objective(W, X, Y, C, lam, zeta)
        if not math.isfinite(obj):
            raise NumericalError("objective became non-finite", trace)
        trace.append(obj)
        if abs(prev - obj) < cfg.rel_tol * abs(prev):
            converged = True
            break
        prev = obj
    return FitResult(W, trace, len(trace), converged, start)


def rank_rows(W, exclude_last: bool = False) -> list[tuple[int, float]]:
    """(index, row norm) pairs sorted by descending norm, ties by index."""
    norms = np.linalg.norm(np.asarray(W, dtype=float).reshape(len(W), -1), axis=1)
    if exclude_last:
        norms = norms[:-1]
    order = np.lexsort((np.arange(norms.size), -norms))
    return [(int(i), float(norms[i])) for i in order]


# --------------------------------------------------------------------------
# model files


def save_model(path, W, meta: dict | None = None) -> None:
    """Header ``d m``, d rows of m decimals, then a ``[metadata]`` block."""
    W = np.asarray(W, dtype=float)
    if W.ndim == 1:
        W = W.reshape(-1, 1)
    lines = [f"{W.shape[0]} {W.shape[1]}"]
    lines += [" ".join(repr(float(v)) for v in row) for row in W]
    lines.append("[metadata]")
    for key, val in (meta or {}).items():
        lines.append(f"{key} = {val}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_model(path) -> tuple[np.ndarray, dict]:
    text = Path(path).read_text(encoding="utf-8").splitlines()
    if not text:
        raise ParseError("empty model file", 1)
    try:
        d, m = (int(t) for t in text[0].split())
    except ValueError:
        raise ParseError("header must be 'd m'", 1) from None
    if len(text) < 1 + d:
        raise ParseError(f"expected {d} matrix rows", len(text))
    rows = []
    for i in range(1, d + 1):
        toks = text[i].split()
        if len(toks) != m:
            raise ParseError(f"expected {m} values, got {len(toks)}", i + 1)
        try:
            rows.append([float(t) for t in toks])
        except ValueError:
            raise ParseError("non-numeric matrix entry", i + 1) from None
    meta = {}
    rest = text[1 + d :]
    if rest and rest[0].strip() == "[metadata]":
        for line in rest[1:]:
            key, sep, val = line.partition("=")
            if sep:
                meta[key.strip()] = val.strip()
    return np.array(rows, dtype=float).reshape(d, m), meta
