"""Cost sweep: one cost-sensitive fit per discretized F value, validation-based
model selection and feature ranking by projection row norms."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import costs
from .data import Dataset, Splits, Task, class_priors
from .errors import DataError, NumericalError, SweepError, UndefinedMeasureError
from .fmeasure import (
    confusion,
    default_ref_class,
    error_profile,
    f_beta_binary,
    mc_micro_f,
    ml_micro_f,
)
from .solver import FitResult, SolverConfig, fit, rank_rows

log = logging.getLogger(__name__)

_VARIANT_FOR_TASK = {
    Task.BINARY: costs.Variant.BINARY,
    Task.MULTILABEL: costs.Variant.MULTILABEL_MICRO,
    Task.MULTICLASS: costs.Variant.MULTICLASS_MICRO,
}


def variant_for(task: Task) -> costs.Variant:
    return _VARIANT_FOR_TASK[Task(task)]


def predict(W, X, task: Task) -> np.ndarray:
    """Label matrix from linear scores ``X^T W``.

    Binary and multi-label use the sign with sign(0) = +1; multi-class puts
    +1 on the highest-scoring class (ties to the lowest index).
    """
    W = np.asarray(W, dtype=float)
    if W.ndim == 1:
        W = W.reshape(-1, 1)
    X = np.asarray(X, dtype=float)
    if X.shape[0] != W.shape[0]:
        raise DataError(f"X has {X.shape[0]} rows but W has {W.shape[0]}")
    scores = X.T @ W
    if Task(task) is Task.MULTICLASS:
        out = -np.ones(scores.shape, dtype=np.int64)
        out[np.arange(scores.shape[0]), np.argmax(scores, axis=1)] = 1
        return out
    return np.where(scores >= 0, 1, -1).astype(np.int64)


def task_f(pred, labels, task: Task, beta: float = 1.0, ref_class: int | None = None) -> float:
    """F-measure matched to the task: binary, multi-label micro or multi-class micro."""
    prof = error_profile(confusion(pred, labels))
    task = Task(task)
    if task is Task.BINARY:
        return f_beta_binary(prof, beta)
    if task is Task.MULTILABEL:
        return ml_micro_f(prof, beta)
    return mc_micro_f(prof, beta, ref_class)


def rank_features(W, bias_flag: bool = False) -> list[tuple[int, float]]:
    """Features by descending row norm of ``W``; ties go to the lower index.

    With ``bias_flag`` the last row (the bias) is left out.
    """
    return rank_rows(W, exclude_last=bias_flag)


def select_top_k(ranking, k: int) -> list[int]:
    if not 1 <= k <= len(ranking):
        raise DataError(f"k = {k} outside 1..{len(ranking)}")
    return [int(i) for i, _ in ranking[:k]]


@dataclass(frozen=True, eq=False)
class SweepRecord:
    r: float
    fit: FitResult | None
    validation_f: float | None
    error: str | None = None

    @property
    def failed(self) -> bool:
        return self.validation_f is None


@dataclass(frozen=True, eq=False)
class SweepResult:
    records: list
    best_r: float
    best_W: np.ndarray
    ranking: list
    lam: float
    beta: float
    variant: costs.Variant
    ref_class: int = 0
    meta: dict = field(default_factory=dict)

    @property
    def best_record(self) -> SweepRecord:
        return next(rec for rec in self.records if rec.r == self.best_r)

    @property
    def best_f(self) -> float:
        return self.best_record.validation_f


def _select(records) -> SweepRecord:
    ok = [rec for rec in records if not rec.failed]
    if not ok:
        raise SweepError("every r value failed; no model to select")
    # highest F, ties to the smallest r
    return min(ok, key=lambda rec: (-rec.validation_f, rec.r))


def run_sweep(
    ds: Dataset,
    splits: Splits,
    T: int = 20,
    beta: float = 1.0,
    config: SolverConfig | None = None,
    variant=None,
    ref_class: int | None = None,
    workers: int = 1,
    warm_start: bool = False,
) -> SweepResult:
    """Fit one model per ``r`` in ``discretize(T, beta)`` and keep the best.

    Each model is trained on ``splits.train_idx`` with costs built from the
    training labels and scored on ``splits.validation_idx``.  An ``r`` whose
    validation F is undefined, or whose fit fails numerically, is recorded
    as failed and skipped during selection.

    ``ref_class`` (0-based) only matters for multi-class; it defaults to the
    training class with the largest prior.  ``warm_start`` starts each fit
    from the previous ``r``'s solution and forces sequential execution.
    """
    config = config or SolverConfig()
    splits.check(ds.n)
    variant = variant_for(ds.task) if variant is None else costs.Variant(variant)
    rs = costs.discretize(T, beta)
    train, val = ds.subset(splits.train_idx), ds.subset(splits.validation_idx)
    if ref_class is None:
        ref_class = default_ref_class(class_priors(train)) if ds.m > 1 else 0
    X, Y = train.features, train.labels

    def one(r, W0=None):
        a = costs.cost_vector(variant, r, beta, ds.m, ref_class)
        C = costs.build_cost_matrix(Y, a)
        try:
            res = fit(X, Y, C, config, W0=W0)
        except NumericalError as exc:
            log.warning("r=%g: fit failed: %s", r, exc)
            return SweepRecord(r, None, None, str(exc))
        try:
            f = task_f(predict(res.W, val.features, ds.task), val.labels, ds.task, beta, ref_class)
        except UndefinedMeasureError as exc:
            log.info("r=%g: validation F undefined: %s", r, exc)
            return SweepRecord(r, res, None, str(exc))
        return SweepRecord(r, res, f)

    if warm_start:
        records, W0 = [], None
        for r in rs:
            rec = one(r, W0)
            records.append(rec)
            if rec.fit is not None:
                W0 = rec.fit.W
    elif workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(one, rs))
    else:
        records = [one(r) for r in rs]

    best = _select(records)
    ranking = rank_features(best.fit.W, ds.has_bias_row)
    return SweepResult(
        records=records,
        best_r=best.r,
        best_W=best.fit.W,
        ranking=ranking,
        lam=config.lam,
        beta=beta,
        variant=variant,
        ref_class=ref_class,
        meta={"T": T, "zeta": config.zeta, "seed": config.seed},
    )


def fmt(x) -> str:
    return repr(float(x))


def write_sweep_report(path, result: SweepResult, feature_names, header: dict | None = None) -> None:
    """Tab-separated sweep report.

    Comment lines (``#``) carry run settings.  The record section has columns
    ``r, iterations, final_objective, validation_f``; the ranking section has
    ``rank, feature_index, feature_name, score``.  Feature indices are
    0-based, ranks 1-based.  Failed values print ``failed``.
    """
    lines = [f"# {k} = {v}" for k, v in (header or {}).items()]
    lines.append(f"# lambda = {fmt(result.lam)}")
    lines.append(f"# beta = {fmt(result.beta)}")
    lines.append(f"# best_r = {fmt(result.best_r)}")
    lines.append("r\titerations\tfinal_objective\tvalidation_f")
    for rec in result.records:
        it = str(rec.fit.iterations_used) if rec.fit is not None else "failed"
        obj = fmt(rec.fit.objective_trace[-1]) if rec.fit is not None else "failed"
        f = fmt(rec.validation_f) if not rec.failed else "failed"
        lines.append(f"{fmt(rec.r)}\t{it}\t{obj}\t{f}")
    lines.append("")
    lines.append("rank\tfeature_index\tfeature_name\tscore")
    for rank, (idx, score) in enumerate(result.ranking, start=1):
        lines.append(f"{rank}\t{idx}\t{feature_names[idx]}\t{fmt(score)}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_sweep_ranking(path) -> list[tuple[int, float]]:
    """Ranked (feature index, score) pairs from a sweep report."""
    out, in_rank = [], False
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.startswith("rank\t"):
            in_rank = True
            continue
        if in_rank and line.strip():
            _, idx, _, score = line.split("\t")
            out.append((int(idx), float(score)))
    return out
