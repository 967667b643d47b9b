"""Command-line front end: ``csfs gen | sweep | eval``.

Artifacts live under ``--out``: dataset.csv, splits.manifest, sweep.tsv,
model.txt, eval.tsv, curve.tsv and compare.tsv.  Settings can come from a
``key = value`` file given with ``--config``; command-line flags win.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import zlib
from pathlib import Path

import numpy as np

from .data import (
    CsvSchema,
    InformativeSpec,
    Task,
    append_bias,
    gen_synthetic_binary,
    load_csv,
    read_manifest,
    save_csv,
    split,
    write_manifest,
)
from .errors import CSFSError, DataError, NumericalError, SweepError
from .evaluation import (
    DEFAULT_RIDGE,
    baseline_equal_cost,
    compare_report,
    downstream_eval,
    write_compare_tsv,
    write_curve_tsv,
    write_eval_tsv,
)
from .solver import SolverConfig, load_model, save_model
from .sweep import fmt, rank_features, run_sweep, select_top_k, write_sweep_report

log = logging.getLogger("csfs")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERICAL = 0, 1, 2, 3
DEFAULT_LAMBDAS = tuple(10.0**p for p in range(-6, 7))
DEFAULT_KS = tuple(range(20, 121, 10))
WORKERS_ENV = "CSFS_WORKERS"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def derive_seed(seed: int, tag: str) -> int:
    """Deterministic per-subtask seed from the top-level seed."""
    ss = np.random.SeedSequence([int(seed), zlib.crc32(tag.encode())])
    return int(ss.generate_state(1)[0])


def _float_list(text: str) -> tuple:
    try:
        vals = tuple(float(t) for t in str(text).split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _int_list(text: str) -> tuple:
    try:
        vals = tuple(int(t) for t in str(text).split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of integers: {text!r}") from None
    if not vals or any(v < 1 for v in vals):
        raise argparse.ArgumentTypeError(f"k values must be positive integers: {text!r}")
    return vals


def read_config(path) -> dict:
    """Parse a ``key = value`` file; ``#`` starts a comment."""
    out = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        if not sep:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        out[key.strip().replace("-", "_")] = val.strip()
    return out


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="csfs", description="Cost-sensitive l2,1 feature selection for F-measures.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--config", help="key = value settings file")
        sp.add_argument("--out", default="csfs_out", help="artifact directory")
        sp.add_argument("--seed", type=int, default=0, help="top-level seed")

    g = sub.add_parser("gen", help="synthesize an imbalanced binary dataset and split it")
    common(g)
    g.add_argument("--n-min", dest="n_min", type=int, required=True, help="minority class size")
    g.add_argument("--ratio", type=float, required=True, help="majority : minority ratio")
    g.add_argument("--d", type=int, default=2, help="number of features")
    g.add_argument("--informative", type=int, default=1, help="number of informative features")
    g.add_argument("--overlap", type=float, default=0.5, help="class overlap on informative axes")
    g.add_argument("--positive", choices=("majority", "minority"), default="majority")
    g.add_argument("--val-fraction", dest="val_fraction", type=float, default=1 / 3)
    g.add_argument("--test-fraction", dest="test_fraction", type=float, default=1 / 4)

    s = sub.add_parser("sweep", help="run the cost sweep over a lambda grid")
    common(s)
    s.add_argument("--data", help="dataset CSV (default OUT/dataset.csv)")
    s.add_argument("--manifest", help="split manifest (default OUT/splits.manifest)")
    s.add_argument("--label-columns", dest="label_columns", default="", help="comma-separated label columns")
    s.add_argument("--task", choices=[t.value for t in Task])
    s.add_argument("--beta", type=float, default=1.0)
    s.add_argument("--T", dest="T", type=int, default=20, help="number of discretized F values")
    s.add_argument("--lambdas", type=_float_list, default=DEFAULT_LAMBDAS, help="comma-separated lambda grid")
    s.add_argument("--zeta", type=float, default=1e-8)
    s.add_argument("--max-iter", dest="max_iter", type=int, default=100)
    s.add_argument("--rel-tol", dest="rel_tol", type=float, default=1e-6)
    s.add_argument("--warm-start", dest="warm_start", action="store_true")
    s.add_argument("--no-bias", dest="no_bias", action="store_true", help="do not append a bias row")

    e = sub.add_parser("eval", help="evaluate CSFS-selected features against the equal-cost baseline")
    common(e)
    e.add_argument("--data", help="dataset CSV (default OUT/dataset.csv)")
    e.add_argument("--manifest", help="split manifest (default OUT/splits.manifest)")
    e.add_argument("--model", help="model file (default OUT/model.txt)")
    e.add_argument("--label-columns", dest="label_columns", default="")
    e.add_argument("--task", choices=[t.value for t in Task])
    e.add_argument("--k", type=_int_list, default=DEFAULT_KS, help="comma-separated numbers of features")
    e.add_argument("--repeats", type=int, default=10)
    e.add_argument("--ridge", type=float, default=DEFAULT_RIDGE)
    return p


def parse_args(argv) -> argparse.Namespace:
    parser = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    command = next((a for a in argv if a in COMMANDS), None)
    if known.config and command:
        try:
            cfg = read_config(known.config)
        except OSError as exc:
            parser.error(f"cannot read config: {exc}")
        except UsageError as exc:
            parser.error(str(exc))
        sub = parser._subparsers._group_actions[0].choices[command]
        actions = {a.dest: a for a in sub._actions}
        defaults = {}
        for key, val in cfg.items():
            if key not in actions or key in ("config", "help"):
                parser.error(f"unknown config key {key!r}")
            act = actions[key]
            if isinstance(act, argparse._StoreTrueAction):
                val = val.lower() in ("1", "true", "yes", "on")
            elif act.type is not None:
                try:
                    val = act.type(val)
                except (argparse.ArgumentTypeError, ValueError) as exc:
                    parser.error(f"config key {key!r}: {exc}")
            defaults[key] = val
            act.required = False
        sub.set_defaults(**defaults)
    return parser.parse_args(argv)


def _workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        raise UsageError(f"{WORKERS_ENV} must be an integer") from None


def _schema(args) -> CsvSchema:
    labels = tuple(c.strip() for c in args.label_columns.split(",") if c.strip())
    return CsvSchema(label_columns=labels, task=Task(args.task) if args.task else None)


def _inputs(args):
    out = Path(args.out)
    data = Path(args.data) if args.data else out / "dataset.csv"
    manifest = Path(args.manifest) if args.manifest else out / "splits.manifest"
    ds = load_csv(data, _schema(args))
    splits = read_manifest(manifest)
    splits.check(ds.n)
    return ds, splits


def cmd_gen(args) -> int:
    if args.informative < 1 or args.informative > args.d:
        raise UsageError("--informative must lie in 1..d")
    spec = InformativeSpec.overlapping(args.informative, args.overlap)
    ds = gen_synthetic_binary(
        args.n_min, args.ratio, args.d, spec, derive_seed(args.seed, "data"), positive=args.positive
    )
    sp = split(ds, args.val_fraction, args.test_fraction, derive_seed(args.seed, "split"))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    save_csv(ds, out / "dataset.csv")
    write_manifest(sp, out / "splits.manifest")
    log.info("wrote %d samples x %d features to %s", ds.n, ds.d, out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    ds, splits = _inputs(args)
    if not ds.has_bias_row and not args.no_bias:
        ds = append_bias(ds)
    if args.T < 1:
        raise UsageError("--T must be >= 1")
    solver_seed = derive_seed(args.seed, "solver")
    workers = _workers()
    best = None
    for lam in sorted(args.lambdas):
        cfg = SolverConfig(lam=lam, zeta=args.zeta, max_iter=args.max_iter, rel_tol=args.rel_tol, seed=solver_seed)
        try:
            res = run_sweep(ds, splits, args.T, args.beta, cfg, workers=workers, warm_start=args.warm_start)
        except SweepError as exc:
            log.warning("lambda=%g: %s", lam, exc)
            continue
        # strict '>' keeps the smallest lambda on ties
        if best is None or res.best_f > best.best_f:
            best = res
    if best is None:
        raise SweepError("every (lambda, r) combination failed")

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    header = {
        "task": ds.task.value,
        "T": args.T,
        "lambda_grid": ",".join(fmt(x) for x in sorted(args.lambdas)),
        "seed": args.seed,
    }
    write_sweep_report(out / "sweep.tsv", best, ds.feature_names, header)
    rec = best.best_record
    meta = {
        "lambda": fmt(best.lam),
        "r": fmt(best.best_r),
        "beta": fmt(best.beta),
        "zeta": fmt(args.zeta),
        "seed": solver_seed,
        "iterations": rec.fit.iterations_used,
        "final_objective": fmt(rec.fit.objective_trace[-1]),
        "validation_f": fmt(rec.validation_f),
        "max_iter": args.max_iter,
        "rel_tol": fmt(args.rel_tol),
        "T": args.T,
        "task": ds.task.value,
        "variant": best.variant.value,
        "ref_class": best.ref_class,
        "has_bias_row": int(ds.has_bias_row),
    }
    save_model(out / "model.txt", best.best_W, meta)
    log.info("best lambda=%g r=%g validation F=%.4f", best.lam, best.best_r, rec.validation_f)
    return EXIT_OK


def cmd_eval(args) -> int:
    ds, splits = _inputs(args)
    out = Path(args.out)
    W, meta = load_model(Path(args.model) if args.model else out / "model.txt")
    try:
        has_bias = bool(int(meta.get("has_bias_row", "1")))
        cfg = SolverConfig(
            lam=float(meta["lambda"]),
            zeta=float(meta.get("zeta", 1e-8)),
            max_iter=int(meta.get("max_iter", 100)),
            rel_tol=float(meta.get("rel_tol", 1e-6)),
            seed=int(meta.get("seed", 0)),
        )
        beta = float(meta.get("beta", 1.0))
        ref_class = int(meta.get("ref_class", 0))
    except (KeyError, ValueError) as exc:
        raise DataError(f"model metadata incomplete: {exc}") from None
    if has_bias and not ds.has_bias_row:
        ds = append_bias(ds)
    if W.shape[0] != ds.d:
        raise DataError(f"model has {W.shape[0]} rows but the dataset has {ds.d} features")
    ranking = rank_features(W, ds.has_bias_row)
    if any(k > len(ranking) for k in args.k):
        raise UsageError(f"k exceeds the {len(ranking)} available features")
    if args.repeats < 1:
        raise UsageError("--repeats must be >= 1")
    eval_seed = derive_seed(args.seed, "eval")
    ref = ref_class if ds.m > 1 else None
    reports, comparisons = [], []
    for k in args.k:
        a = downstream_eval(
            ds, splits, select_top_k(ranking, k), args.repeats, eval_seed, beta, args.ridge, "CSFS", ref
        )
        b = baseline_equal_cost(ds, splits, k, cfg, args.repeats, eval_seed, beta, args.ridge)
        reports += [a, b]
        comparisons.append(compare_report(a, b))
    out.mkdir(parents=True, exist_ok=True)
    write_eval_tsv(out / "eval.tsv", reports)
    write_curve_tsv(out / "curve.tsv", reports)
    write_compare_tsv(out / "compare.tsv", comparisons)
    return EXIT_OK


COMMANDS = {"gen": cmd_gen, "sweep": cmd_sweep, "eval": cmd_eval}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"csfs: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericalError, SweepError) as exc:
        print(f"csfs: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (DataError, OSError) as exc:
        print(f"csfs: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except CSFSError as exc:
        print(f"csfs: error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
