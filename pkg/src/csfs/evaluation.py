"""Downstream evaluation of selected feature subsets.

A ridge least-squares linear classifier is trained on the selected features
(plus a bias) and scored on held-out test samples.  The same plumbing serves
the cost-sensitive selector and the equal-cost baseline, so any difference
between the two comes from the features they pick.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .costs import build_cost_matrix
from .data import Dataset, Splits, append_bias, split
from .errors import DataError
from .solver import SolverConfig, fit
from .sweep import fmt, predict, rank_features, run_sweep, select_top_k, task_f

DEFAULT_RIDGE = 1e-3
SPLIT_NAMES = ("train", "test")


@dataclass(frozen=True, eq=False)
class EvalReport:
    """Per-repeat downstream metrics for one selector at one ``k``.

    ``metrics[split][metric]`` is a list with one value per repeat, for
    split in ("train", "test") and metric in ("accuracy", "f").
    """

    method: str
    k: int
    selected: tuple
    seeds: tuple
    metrics: dict
    ridge: float = DEFAULT_RIDGE
    beta: float = 1.0
    audit: dict = field(default_factory=dict)

    @property
    def repeats(self) -> int:
        return len(self.seeds)

    def values(self, metric: str, split_name: str = "test") -> np.ndarray:
        return np.asarray(self.metrics[split_name][metric], dtype=float)

    def mean(self, metric: str, split_name: str = "test") -> float:
        return float(self.values(metric, split_name).mean())

    def std(self, metric: str, split_name: str = "test") -> float:
        return float(self.values(metric, split_name).std())


def ridge_classifier(X, Y, ridge: float = DEFAULT_RIDGE) -> np.ndarray:
    """Solve ``(X X^T + ridge I) W = X Y`` for a d x m weight matrix."""
    X = np.asarray(X, dtype=float)
    A = X @ X.T + ridge * np.eye(X.shape[0])
    return np.linalg.solve(A, X @ np.asarray(Y, dtype=float))


def _resplit_like(ds: Dataset, splits: Splits, seed: int) -> Splits:
    n_test = splits.test_idx.size
    n_val = splits.validation_idx.size
    return split(ds, n_val / (ds.n - n_test), n_test / ds.n, seed=seed, stratified=True)


def downstream_eval(
    ds: Dataset,
    splits: Splits,
    selected,
    repeats: int = 10,
    seed: int = 0,
    beta: float = 1.0,
    ridge: float = DEFAULT_RIDGE,
    method: str = "CSFS",
    ref_class: int | None = None,
) -> EvalReport:
    """Train on the selected features and report accuracy and task F.

    Repeat 0 uses ``splits`` as given; repeat ``i > 0`` uses a stratified
    re-split with seed ``seed + i`` and the same split sizes.  In every
    repeat the classifier sees train + validation samples only and metrics
    on "test" use test samples only.
    """
    selected = tuple(int(i) for i in selected)
    if not selected:
        raise DataError("empty feature selection")
    if repeats < 1:
        raise DataError(f"repeats must be >= 1, got {repeats}")
    if any(not 0 <= i < ds.n_features for i in selected) or len(set(selected)) != len(selected):
        raise DataError(f"selected indices must be distinct and within 0..{ds.n_features - 1}")
    splits.check(ds.n)
    base = ds.select_features(selected)
    if not base.has_bias_row:
        base = append_bias(base)

    seeds = tuple(seed + i for i in range(repeats))
    metrics = {s: {"accuracy": [], "f": []} for s in SPLIT_NAMES}
    audit = {"fit_idx": [], "test_idx": []}
    for i, s in enumerate(seeds):
        sp = splits if i == 0 else _resplit_like(ds, splits, s)
        fit_idx, test_idx = sp.fit_idx, sp.test_idx
        if np.intersect1d(fit_idx, test_idx).size:
            raise DataError("test samples overlap training samples")
        tr, te = base.subset(fit_idx), base.subset(test_idx)
        if np.all(tr.labels == tr.labels[0]):
            raise DataError("degenerate split: training labels have a single class")
        W = ridge_classifier(tr.features, tr.labels, ridge)
        audit["fit_idx"].append(fit_idx)
        audit["test_idx"].append(test_idx)
        for name, part in (("train", tr), ("test", te)):
            pred = predict(W, part.features, ds.task)
            metrics[name]["accuracy"].append(float(np.mean(np.all(pred == part.labels, axis=1))))
            metrics[name]["f"].append(task_f(pred, part.labels, ds.task, beta, ref_class))
    return EvalReport(method, len(selected), selected, seeds, metrics, ridge, beta, audit)


def equal_cost_ranking(ds: Dataset, splits: Splits, config: SolverConfig | None = None):
    """Ranking from the cost-blind problem (all costs 1) fitted on the training split."""
    config = config or SolverConfig()
    splits.check(ds.n)
    train = ds.subset(splits.train_idx)
    C = np.ones(train.labels.shape)
    res = fit(train.features, train.labels, C, config)
    return rank_features(res.W, ds.has_bias_row), res


def baseline_equal_cost(
    ds: Dataset,
    splits: Splits,
    k: int,
    config: SolverConfig | None = None,
    repeats: int = 10,
    seed: int = 0,
    beta: float = 1.0,
    ridge: float = DEFAULT_RIDGE,
) -> EvalReport:
    """Equal-cost selector: fit with unit costs, take the top ``k``, evaluate."""
    ranking, _ = equal_cost_ranking(ds, splits, config)
    selected = select_top_k(ranking, k)
    return downstream_eval(ds, splits, selected, repeats, seed, beta, ridge, method="EqualCost")


def csfs_eval(
    ds: Dataset,
    splits: Splits,
    k: int,
    config: SolverConfig | None = None,
    T: int = 20,
    repeats: int = 10,
    seed: int = 0,
    beta: float = 1.0,
    ridge: float = DEFAULT_RIDGE,
    sweep=None,
) -> EvalReport:
    """Cost-sensitive selector: run (or reuse) a sweep, take the top ``k``, evaluate."""
    if sweep is None:
        sweep = run_sweep(ds, splits, T, beta, config)
    selected = select_top_k(sweep.ranking, k)
    ref = sweep.ref_class if ds.m > 1 else None
    return downstream_eval(ds, splits, selected, repeats, seed, beta, ridge, method="CSFS", ref_class=ref)


@dataclass(frozen=True, eq=False)
class Comparison:
    method_a: str
    method_b: str
    k: int
    seeds: tuple
    f_diff: np.ndarray
    accuracy_diff: np.ndarray

    @property
    def mean_f_gap(self) -> float:
        return float(self.f_diff.mean())

    @property
    def mean_accuracy_gap(self) -> float:
        return float(self.accuracy_diff.mean())

    def sign_counts(self, metric: str = "f") -> dict:
        diff = self.f_diff if metric == "f" else self.accuracy_diff
        return {
            "wins": int((diff > 0).sum()),
            "losses": int((diff < 0).sum()),
            "ties": int((diff == 0).sum()),
        }


def compare_report(a: EvalReport, b: EvalReport) -> Comparison:
    """Paired per-seed test differences ``a - b``."""
    if a.k != b.k:
        raise DataError(f"cannot compare reports with k = {a.k} and k = {b.k}")
    if a.seeds != b.seeds:
        raise DataError("reports were produced with different seeds")
    if a.ridge != b.ridge or a.beta != b.beta:
        raise DataError("reports use different downstream settings")
    return Comparison(
        a.method,
        b.method,
        a.k,
        a.seeds,
        a.values("f") - b.values("f"),
        a.values("accuracy") - b.values("accuracy"),
    )


# --------------------------------------------------------------------------
# report files


def write_eval_tsv(path, reports) -> None:
    """Columns: method, k, split, metric, mean, std."""
    lines = [f"# ridge = {fmt(reports[0].ridge)}" if reports else "# ridge = nan"]
    lines.append("method\tk\tsplit\tmetric\tmean\tstd")
    for rep in reports:
        for split_name in SPLIT_NAMES:
            for metric in ("accuracy", "f"):
                lines.append(
                    f"{rep.method}\t{rep.k}\t{split_name}\t{metric}\t"
                    f"{fmt(rep.mean(metric, split_name))}\t{fmt(rep.std(metric, split_name))}"
                )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_curve_tsv(path, reports) -> None:
    """One row per (method, k) with test F and accuracy means, for plotting."""
    lines = ["method\tk\tf_mean\tf_std\taccuracy_mean\taccuracy_std"]
    for rep in sorted(reports, key=lambda r: (r.method, r.k)):
        lines.append(
            f"{rep.method}\t{rep.k}\t{fmt(rep.mean('f'))}\t{fmt(rep.std('f'))}\t"
            f"{fmt(rep.mean('accuracy'))}\t{fmt(rep.std('accuracy'))}"
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_compare_tsv(path, comparisons) -> None:
    """Per-seed paired differences followed by a summary row per k."""
    lines = ["k\tseed\tf_diff\taccuracy_diff"]
    for cmp in comparisons:
        for s, df, da in zip(cmp.seeds, cmp.f_diff, cmp.accuracy_diff):
            lines.append(f"{cmp.k}\t{s}\t{fmt(df)}\t{fmt(da)}")
    lines.append("")
    lines.append("k\tmethod_a\tmethod_b\tmean_f_gap\tmean_accuracy_gap\tf_wins\tf_losses\tf_ties")
    for cmp in comparisons:
        sc = cmp.sign_counts("f")
        lines.append(
            f"{cmp.k}\t{cmp.method_a}\t{cmp.method_b}\t{fmt(cmp.mean_f_gap)}\t"
            f"{fmt(cmp.mean_accuracy_gap)}\t{sc['wins']}\t{sc['losses']}\t{sc['ties']}"
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
