"""Datasets, splits, class priors, CSV ingestion and synthetic data.

Features are stored feature-major: ``features`` has shape ``(d, n)`` so that
column ``i`` is sample ``i``.  Labels are ``(n, m)`` with entries in
{-1, +1}.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DataError, LabelDomainError, ParseError

BIAS_NAME = "__bias__"


class Task(str, enum.Enum):
    BINARY = "binary"
    MULTICLASS = "multiclass"
    MULTILABEL = "multilabel"


def _frozen(a, dtype):
    a = np.array(a, dtype=dtype, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Dataset:
    """Feature matrix (d x n), label matrix (n x m) and task kind.

    Arrays are copied and made read-only on construction.
    """

    features: np.ndarray
    labels: np.ndarray
    task: Task = Task.BINARY
    feature_names: tuple = ()
    has_bias_row: bool = False
    label_names: tuple = ()

    def __post_init__(self):
        X = _frozen(self.features, float)
        Y = np.asarray(self.labels)
        if Y.ndim == 1:
            Y = Y.reshape(-1, 1)
        Y = _frozen(Y, np.int64)
        task = Task(self.task)
        if X.ndim != 2:
            raise DataError(f"features must be 2-D (d x n), got shape {X.shape}")
        d, n = X.shape
        if Y.ndim != 2 or Y.shape[0] != n:
            raise DataError(f"labels shape {Y.shape} does not match n={n} samples")
        m = Y.shape[1]
        if d < 1 or n < 2 or m < 1:
            raise DataError(f"need d >= 1, n >= 2, m >= 1 (got d={d}, n={n}, m={m})")
        if not np.all(np.isfinite(X)):
            raise DataError("features contain non-finite values")
        if not np.all(np.isin(Y, (-1, 1))):
            raise LabelDomainError("label entries must be -1 or +1")
        if task is Task.BINARY and m != 1:
            raise DataError(f"binary task requires m = 1, got m = {m}")
        if task is Task.MULTICLASS and not np.all((Y == 1).sum(axis=1) == 1):
            raise DataError("multi-class rows must contain exactly one +1 entry")
        names = tuple(self.feature_names) or tuple(f"x{j + 1}" for j in range(d))
        if len(names) != d:
            raise DataError(f"{len(names)} feature names for {d} features")
        if self.has_bias_row:
            if names[-1] != BIAS_NAME or not np.all(X[-1] == 1.0):
                raise DataError("bias row must be the last row, all ones, named __bias__")
        lnames = tuple(self.label_names) or (
            ("label",) if m == 1 else tuple(f"label{k + 1}" for k in range(m))
        )
        if len(lnames) != m:
            raise DataError(f"{len(lnames)} label names for {m} label columns")
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "labels", Y)
        object.__setattr__(self, "task", task)
        object.__setattr__(self, "feature_names", names)
        object.__setattr__(self, "label_names", lnames)

    @property
    def d(self) -> int:
        return self.features.shape[0]

    @property
    def n(self) -> int:
        return self.features.shape[1]

    @property
    def m(self) -> int:
        return self.labels.shape[1]

    @property
    def n_features(self) -> int:
        """Number of real features, excluding the bias row."""
        return self.d - int(self.has_bias_row)

    def subset(self, idx) -> "Dataset":
        """Dataset restricted to the samples in ``idx`` (order preserved)."""
        idx = np.asarray(idx, dtype=np.int64)
        return Dataset(
            self.features[:, idx],
            self.labels[idx],
            self.task,
            self.feature_names,
            self.has_bias_row,
            self.label_names,
        )

    def select_features(self, idx) -> "Dataset":
        """Dataset restricted to feature rows ``idx``; the bias row is kept."""
        idx = [int(i) for i in idx]
        if self.has_bias_row:
            idx = [i for i in idx if i != self.d - 1] + [self.d - 1]
        return Dataset(
            self.features[idx],
            self.labels,
            self.task,
            tuple(self.feature_names[i] for i in idx),
            self.has_bias_row,
            self.label_names,
        )


@dataclass(frozen=True, eq=False)
class Splits:
    train_idx: np.ndarray
    validation_idx: np.ndarray
    test_idx: np.ndarray
    seed: int | None = None

    def __post_init__(self):
        parts = []
        for name in ("train_idx", "validation_idx", "test_idx"):
            a = _frozen(np.asarray(getattr(self, name)).ravel(), np.int64)
            if a.size == 0:
                raise DataError(f"{name} is empty")
            if np.unique(a).size != a.size:
                raise DataError(f"{name} contains duplicate indices")
            object.__setattr__(self, name, a)
            parts.append(a)
        allidx = np.concatenate(parts)
        if np.unique(allidx).size != allidx.size:
            raise DataError("splits are not pairwise disjoint")
        if allidx.min() < 0:
            raise DataError("negative sample index in splits")

    def __eq__(self, other):
        if not isinstance(other, Splits):
            return NotImplemented
        return all(
            np.array_equal(getattr(self, k), getattr(other, k))
            for k in ("train_idx", "validation_idx", "test_idx")
        )

    def check(self, n: int) -> None:
        top = max(self.train_idx.max(), self.validation_idx.max(), self.test_idx.max())
        if top >= n:
            raise DataError(f"split index {top} out of range for n={n}")

    @property
    def fit_idx(self) -> np.ndarray:
        """Training plus validation indices, sorted."""
        return np.sort(np.concatenate([self.train_idx, self.validation_idx]))


@dataclass(frozen=True)
class ClassPriors:
    P: tuple

    def __post_init__(self):
        P = tuple(float(p) for p in self.P)
        if any(not 0.0 <= p <= 1.0 for p in P):
            raise DataError(f"priors must lie in [0, 1]: {P}")
        object.__setattr__(self, "P", P)

    def __len__(self):
        return len(self.P)

    def __getitem__(self, k):
        return self.P[k]

    def as_array(self) -> np.ndarray:
        return np.array(self.P)


def class_priors(ds: Dataset) -> ClassPriors:
    """Empirical marginal probability of each label being +1."""
    return ClassPriors(tuple((ds.labels == 1).mean(axis=0)))


def append_bias(ds: Dataset) -> Dataset:
    """Return a copy of ``ds`` with a constant row of ones appended."""
    if ds.has_bias_row:
        raise DataError("dataset already has a bias row")
    X = np.vstack([ds.features, np.ones((1, ds.n))])
    return Dataset(X, ds.labels, ds.task, ds.feature_names + (BIAS_NAME,), True, ds.label_names)


def infer_task(Y: np.ndarray) -> Task:
    if Y.shape[1] == 1:
        return Task.BINARY
    if np.all((Y == 1).sum(axis=1) == 1):
        return Task.MULTICLASS
    return Task.MULTILABEL


# --------------------------------------------------------------------------
# CSV


@dataclass(frozen=True)
class CsvSchema:
    """Which CSV columns hold labels and features.

    Attributes:
        label_columns: header names of the label columns.  Defaults to the
            last column.
        feature_columns: header names of the feature columns.  Defaults to
            every column that is not a label, in file order.
        task: force the task kind; inferred from the labels when None.
    """

    label_columns: tuple = ()
    feature_columns: tuple = ()
    task: Task | None = None


def _parse_label(tok, lineno):
    try:
        v = float(tok)
    except ValueError:
        raise ParseError(f"label {tok!r} is not numeric", lineno) from None
    if v not in (-1.0, 0.0, 1.0):
        raise LabelDomainError(f"line {lineno}: label {tok!r} not in {{-1, 0, 1}}")
    return int(v)


def load_csv(path, schema: CsvSchema | None = None) -> Dataset:
    """Read a header-first CSV with samples as rows.

    Labels may use {-1, +1} or {0, 1}; a column whose values are all in
    {0, 1} is remapped with 0 -> -1.  A trailing ``__bias__`` feature column
    restores ``has_bias_row``.

    Raises:
        ParseError: wrong number of fields or a non-numeric feature, with
            the offending line number.
        DataError: non-finite feature values, unknown column names.
        LabelDomainError: a label outside {-1, 0, 1}.
    """
    schema = schema or CsvSchema()
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ParseError("empty file", 1)
    header = [h.strip() for h in rows[0]]
    if len(set(header)) != len(header):
        raise ParseError("duplicate column names in header", 1)
    label_cols = list(schema.label_columns) or [header[-1]]
    feat_cols = list(schema.feature_columns) or [h for h in header if h not in label_cols]
    for c in label_cols + feat_cols:
        if c not in header:
            raise DataError(f"column {c!r} not found in header")
    if set(label_cols) & set(feat_cols):
        raise DataError("a column cannot be both feature and label")
    if not feat_cols:
        raise DataError("no feature columns")
    li = [header.index(c) for c in label_cols]
    fi = [header.index(c) for c in feat_cols]

    feats, labs = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not t.strip() for t in row):
            continue
        if len(row) != len(header):
            raise ParseError(f"expected {len(header)} fields, got {len(row)}", lineno)
        try:
            fv = [float(row[j]) for j in fi]
        except ValueError as exc:
            raise ParseError(f"non-numeric feature value ({exc})", lineno) from None
        if not all(math.isfinite(v) for v in fv):
            raise DataError(f"line {lineno}: non-finite feature value")
        feats.append(fv)
        labs.append([_parse_label(row[j], lineno) for j in li])

    if len(feats) < 2:
        raise DataError("need at least two data rows")
    Y = np.array(labs, dtype=np.int64)
    for k in range(Y.shape[1]):
        col = Y[:, k]
        if np.any(col == 0):
            if np.any(col == -1):
                raise LabelDomainError(f"label column {label_cols[k]!r} mixes 0 and -1")
            Y[:, k] = np.where(col == 0, -1, 1)
    X = np.array(feats, dtype=float).T
    has_bias = bool(feat_cols[-1] == BIAS_NAME)
    task = Task(schema.task) if schema.task is not None else infer_task(Y)
    return Dataset(X, Y, task, tuple(feat_cols), has_bias, tuple(label_cols))


def save_csv(ds: Dataset, path) -> None:
    """Write ``ds`` so that ``load_csv`` reproduces it exactly."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(list(ds.feature_names) + list(ds.label_names))
        for i in range(ds.n):
            w.writerow([repr(float(v)) for v in ds.features[:, i]] + [int(v) for v in ds.labels[i]])


# --------------------------------------------------------------------------
# splitting


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def _strata(ds: Dataset) -> np.ndarray:
    """Integer stratum per sample."""
    if ds.task is Task.BINARY:
        return (ds.labels[:, 0] == 1).astype(np.int64)
    if ds.task is Task.MULTICLASS:
        return np.argmax(ds.labels, axis=1)
    # multi-label: label patterns, with patterns rarer than 3 pooled together
    _, inv, counts = np.unique(ds.labels, axis=0, return_inverse=True, return_counts=True)
    inv = inv.ravel()
    rare = counts[inv] < 3
    inv = inv.copy()
    inv[rare] = -1
    return inv


def _apportion(total: int, weights: np.ndarray, caps: np.ndarray) -> np.ndarray:
    """Split ``total`` across groups proportionally to ``weights`` (largest
    remainder), with at least one per group and at most ``caps``."""
    quota = total * weights / weights.sum()
    out = np.clip(np.floor(quota).astype(np.int64), 1, caps)
    order = list(np.argsort(-(quota - np.floor(quota)), kind="stable"))
    while out.sum() < total and any(out < caps):
        g = next(g for g in order if out[g] < caps[g])
        out[g] += 1
        order.remove(g)
        order.append(g)
    while out.sum() > total and any(out > 1):
        g = next(g for g in reversed(order) if out[g] > 1)
        out[g] -= 1
        order.remove(g)
        order.insert(0, g)
    return out


def split(
    ds: Dataset,
    val_fraction: float = 1 / 3,
    test_fraction: float = 1 / 4,
    seed: int = 0,
    stratified: bool = True,
) -> Splits:
    """Random train/validation/test split.

    The test set takes ``round(test_fraction * n)`` samples; validation takes
    ``round(val_fraction * remaining)`` of what is left.  With
    ``stratified`` the per-class allocation follows the class proportions and
    every class appears in every split.
    """
    if not (0 < val_fraction and 0 < test_fraction and val_fraction + test_fraction < 1):
        raise DataError(
            f"fractions must be positive with sum < 1 (val={val_fraction}, test={test_fraction})"
        )
    n = ds.n
    n_test = _round_half_up(test_fraction * n)
    n_val = _round_half_up(val_fraction * (n - n_test))
    n_train = n - n_test - n_val
    if min(n_test, n_val, n_train) < 1:
        raise DataError(f"n={n} too small for the requested fractions")
    rng = np.random.default_rng(seed)

    if not stratified:
        perm = rng.permutation(n)
        return Splits(
            np.sort(perm[n_test + n_val :]),
            np.sort(perm[n_test : n_test + n_val]),
            np.sort(perm[:n_test]),
            seed,
        )

    strata = _strata(ds)
    groups = np.unique(strata)
    sizes = np.array([(strata == g).sum() for g in groups])
    if sizes.min() < 3:
        g = groups[np.argmin(sizes)]
        raise DataError(f"stratification impossible: class {g} has {sizes.min()} < 3 samples")
    if len(groups) > min(n_test, n_val, n_train):
        raise DataError("too few samples per split to place every class in each split")
    t_alloc = _apportion(n_test, sizes, sizes - 2)
    v_alloc = _apportion(n_val, sizes - t_alloc, sizes - t_alloc - 1)
    tr, va, te = [], [], []
    for g, nt, nv in zip(groups, t_alloc, v_alloc):
        members = rng.permutation(np.flatnonzero(strata == g))
        te.append(members[:nt])
        va.append(members[nt : nt + nv])
        tr.append(members[nt + nv :])
    return Splits(np.sort(np.concatenate(tr)), np.sort(np.concatenate(va)), np.sort(np.concatenate(te)), seed)


def write_manifest(splits: Splits, path) -> None:
    lines = []
    if splits.seed is not None:
        lines.append(f"seed: {splits.seed}")
    for key, a in (("train", splits.train_idx), ("val", splits.validation_idx), ("test", splits.test_idx)):
        lines.append(f"{key}: " + " ".join(str(int(i)) for i in a))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_manifest(path) -> Splits:
    parts = {}
    seed = None
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        key, sep, rest = line.partition(":")
        key = key.strip()
        if not sep or key not in ("seed", "train", "val", "test"):
            raise ParseError(f"unrecognised manifest line {line[:40]!r}", lineno)
        try:
            if key == "seed":
                seed = int(rest)
            else:
                parts[key] = [int(t) for t in rest.split()]
        except ValueError:
            raise ParseError("non-integer index", lineno) from None
    missing = {"train", "val", "test"} - parts.keys()
    if missing:
        raise ParseError(f"manifest lacks {sorted(missing)}")
    return Splits(parts["train"], parts["val"], parts["test"], seed)


# --------------------------------------------------------------------------
# synthetic data


@dataclass(frozen=True)
class FeatureBox:
    """Per-class uniform ranges for one informative feature.

    Each class range may also be a tuple of ranges, in which case a sample
    picks one of them uniformly at random (a mixture of boxes).
    """

    majority: tuple
    minority: tuple

    def ranges(self, which: str) -> tuple:
        r = self.majority if which == "majority" else self.minority
        return (tuple(r),) if np.ndim(r) == 1 else tuple(tuple(x) for x in r)


@dataclass(frozen=True)
class InformativeSpec:
    """Generator configuration for ``gen_synthetic_binary``.

    Attributes:
        boxes: one ``FeatureBox`` per informative feature.  Informative
            features occupy the first ``len(boxes)`` rows, or the rows listed
            in ``positions``.
        noise: uniform range used for every remaining (pure noise) feature,
            identically for both classes.
        positions: optional feature indices for the informative boxes.
    """

    boxes: tuple = (FeatureBox((0.0, 1.0), (0.5, 1.5)),)
    noise: tuple = (0.0, 1.0)
    positions: tuple | None = None

    @classmethod
    def overlapping(cls, n_informative: int = 1, overlap: float = 0.5, noise=(0.0, 1.0)):
        """Unit boxes shifted so the classes share ``overlap`` of their width."""
        if not 0.0 <= overlap <= 1.0:
            raise DataError(f"overlap must be in [0, 1], got {overlap}")
        box = FeatureBox((0.0, 1.0), (1.0 - overlap, 2.0 - overlap))
        return cls(tuple([box] * n_informative), tuple(noise))


def _draw(rng, ranges, size):
    ranges = np.asarray(ranges, dtype=float)
    pick = rng.integers(len(ranges), size=size) if len(ranges) > 1 else np.zeros(size, dtype=np.int64)
    u = rng.random(size)
    lo, hi = ranges[pick, 0], ranges[pick, 1]
    return lo + u * (hi - lo)


def gen_synthetic_binary(
    n_minority: int,
    ratio: float,
    d: int = 2,
    informative_spec: InformativeSpec | None = None,
    seed: int = 0,
    positive: str = "majority",
) -> Dataset:
    """Two-class data drawn from axis-aligned uniform boxes.

    The majority class has ``round(ratio * n_minority)`` samples.  By default
    it is labelled +1 and the minority -1; ``positive="minority"`` swaps the
    polarity.
    """
    spec = informative_spec or InformativeSpec()
    if n_minority < 2:
        raise DataError(f"n_minority must be >= 2, got {n_minority}")
    if d < 2:
        raise DataError(f"d must be >= 2, got {d}")
    if ratio < 1:
        raise DataError(f"ratio must be >= 1, got {ratio}")
    if positive not in ("majority", "minority"):
        raise DataError(f"positive must be 'majority' or 'minority', got {positive!r}")
    positions = tuple(spec.positions) if spec.positions is not None else tuple(range(len(spec.boxes)))
    if len(positions) != len(spec.boxes) or len(set(positions)) != len(positions):
        raise DataError("positions must list one distinct index per box")
    if any(not 0 <= p < d for p in positions):
        raise DataError(f"informative position outside 0..{d - 1}")
    separating = [b for b in spec.boxes if b.ranges("majority") != b.ranges("minority")]
    if not separating:
        raise DataError("degenerate generator: no feature separates the classes (all noise)")
    for b in spec.boxes:
        for rr in b.ranges("majority") + b.ranges("minority"):
            if not rr[0] <= rr[1]:
                raise DataError(f"invalid range {rr}")

    n_maj = _round_half_up(ratio * n_minority)
    rng = np.random.default_rng(seed)
    n = n_maj + n_minority
    X = np.empty((d, n))
    lo, hi = spec.noise
    X[:] = lo + rng.random((d, n)) * (hi - lo)
    for p, box in zip(positions, spec.boxes):
        X[p, :n_maj] = _draw(rng, box.ranges("majority"), n_maj)
        X[p, n_maj:] = _draw(rng, box.ranges("minority"), n_minority)
    maj_label = 1 if positive == "majority" else -1
    y = np.concatenate([np.full(n_maj, maj_label), np.full(n_minority, -maj_label)])
    perm = rng.permutation(n)
    return Dataset(X[:, perm], y[perm].reshape(-1, 1), Task.BINARY)
