"""Command-line front end.

Every command is a deterministic function of its inputs, flags and seed.
Results go to standard output as single-line JSON (or CSV where noted);
failures print exactly one line ``rulsif: error[<code>]: <message>`` to
standard error and exit with 2 (usage), 3 (data) or 4 (numerical).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import List, Optional

import numpy as np

from . import experiments
from .csvio import read_csv, write_csv
from .divergence import estimate
from .errors import DataError, RulsifError
from .estimator import LAMBDA_GRID, RulsifConfig, RulsifModel, fit
from .homogeneity import DIRECTIONS, ESTIMATORS, TestConfig, lstt
from .outlier import auc, outlier_scores
from .parallel import resolve_threads
from .synthdata import benchmark_dataset, outlier_dataset, sinc_dataset

EXIT_USAGE = 2

DEFAULT_RUNS = {
    "ratio-curves": 10,
    "pe-convergence": 30,
    "type1": 100,
    "power": 50,
    "outlier-auc": 200,
    "covshift": 50,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse, but usage problems raise instead of printing a usage block."""

    def error(self, message):
        raise UsageError(message)


def _dumps(doc) -> str:
    return json.dumps(doc, separators=(",", ":"), allow_nan=False)


def _emit(doc, out) -> None:
    out.write(_dumps(doc) + "\n")


def _float_list(text: str) -> tuple:
    try:
        values = tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _unit_open(text: str) -> float:
    v = float(text)
    if not 0.0 < v < 1.0:
        raise argparse.ArgumentTypeError(f"must lie strictly between 0 and 1, got {v}")
    return v


def _alpha(text: str) -> float:
    v = float(text)
    if not 0.0 <= v < 1.0:
        raise argparse.ArgumentTypeError(f"alpha must lie in [0, 1), got {v}")
    return v


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _read(path: str, args) -> np.ndarray:
    return read_csv(path, header=args.header)


def _rulsif_config(args) -> RulsifConfig:
    return RulsifConfig(
        alpha=args.alpha,
        sigma_grid=args.sigma_grid,
        lambda_grid=args.lambda_grid,
        cv_folds=args.folds,
        max_centers=args.max_centers,
        seed=args.seed,
    )


# commands ------------------------------------------------------------------


def cmd_fit(args, out) -> int:
    num = _read(args.numerator, args)
    den = _read(args.denominator, args)
    model = fit(num, den, _rulsif_config(args))
    with open(args.out, "w") as fh:
        fh.write(model.dumps() + "\n")
    cv = model.cv
    _emit({
        "selected": {"sigma": model.sigma, "lambda": model.lam},
        "score": cv.selected_score,
        "entries": [{"sigma": s, "lambda": l, "score": v} for s, l, v in cv.entries],
    }, out)
    return 0


def load_model(path: str) -> RulsifModel:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise DataError(f"{path}: {exc.strerror}") from None
    return RulsifModel.loads(text)


def cmd_pe(args, out) -> int:
    model = load_model(args.model)
    num = _read(args.numerator, args)
    den = _read(args.denominator, args)
    _emit(estimate(model, num, den).to_dict(), out)
    return 0


def cmd_test(args, out) -> int:
    x = _read(args.x, args)
    xp = _read(args.x_prime, args)
    rcfg = RulsifConfig(alpha=args.alpha, cv_folds=args.folds, max_centers=args.max_centers, seed=args.seed)
    cfg = TestConfig(
        alpha=args.alpha,
        permutations=args.permutations,
        significance=args.significance,
        direction=args.direction,
        estimator=args.estimator,
        rulsif=rcfg,
        full_cv=not args.fast,
    )
    _emit(lstt(x, xp, cfg, seed=args.seed).to_dict(), out)
    return 0


def _read_labels(path: str, count: int, args) -> np.ndarray:
    table = _read(path, args)
    if table.shape[1] != 1:
        raise DataError(f"{path}: labels file must have one column, found {table.shape[1]}")
    labels = table[:, 0]
    if not np.all((labels == 0) | (labels == 1)):
        raise DataError(f"{path}: labels must be 0 (inlier) or 1 (outlier)")
    if labels.shape[0] != count:
        raise DataError(f"{path}: {labels.shape[0]} labels for {count} evaluation rows")
    return labels.astype(bool)


def cmd_outlier(args, out) -> int:
    xm = _read(args.model_set, args)
    xe = _read(args.evaluation_set, args)
    labels = None
    if args.labels_in_last_column:
        if xe.shape[1] < 2:
            raise DataError("--labels-in-last-column needs at least two columns")
        labels_col = xe[:, -1]
        if not np.all((labels_col == 0) | (labels_col == 1)):
            raise DataError(f"{args.evaluation_set}: last column must hold 0/1 labels")
        labels, xe = labels_col.astype(bool), xe[:, :-1]
    if args.labels is not None:
        labels = _read_labels(args.labels, xe.shape[0], args)
    cfg = RulsifConfig(alpha=args.alpha, cv_folds=args.folds, max_centers=args.max_centers, seed=args.seed)
    scored = outlier_scores(xm, xe, cfg, labels)
    if labels is None:
        write_csv(args.scores, ((i, s) for i, s in enumerate(scored.scores)), ["index", "score"])
    else:
        rows = ((i, s, int(lab)) for i, (s, lab) in enumerate(zip(scored.scores, labels)))
        write_csv(args.scores, rows, ["index", "score", "label"])
    summary = {}
    if labels is not None:
        summary["auc"] = auc(scored)
    summary.update({
        "n": int(xm.shape[0]),
        "n_prime": int(xe.shape[0]),
        "alpha": scored.model.alpha,
        "sigma": scored.model.sigma,
        "lambda": scored.model.lam,
    })
    _emit(summary, out)
    return 0


def cmd_repro(args, out) -> int:
    runs = args.runs if args.runs is not None else DEFAULT_RUNS[args.experiment]
    threads = resolve_threads(args.threads)
    tables = experiments.run_experiment(
        args.experiment, args.out, runs, seed=args.seed, threads=threads,
        permutations=args.permutations, full_cv=not args.fast,
    )
    _emit({
        "experiment": args.experiment,
        "runs": runs,
        "seed": args.seed,
        "files": {name: len(rows) for name, rows in tables.items()},
    }, out)
    return 0


def _columns(prefix: str, d: int) -> List[str]:
    return [f"{prefix}{j + 1}" for j in range(d)]


def cmd_data(args, out) -> int:
    os.makedirs(args.out, exist_ok=True)
    written = {}

    def dump(name, x, extra=None, extra_name=None):
        path = os.path.join(args.out, name)
        header = _columns("x", x.shape[1])
        rows = x.tolist()
        if extra is not None:
            header.append(extra_name)
            rows = [r + [e] for r, e in zip(rows, extra.tolist())]
        write_csv(path, rows, header)
        written[name] = len(rows)

    n_prime = args.n_prime if args.n_prime is not None else args.n
    if args.kind == "benchmark":
        ds = benchmark_dataset(args.tag, args.n, n_prime, args.seed)
        dump("numerator.csv", ds.numerator)
        dump("denominator.csv", ds.denominator)
    elif args.kind == "outlier":
        model, evaluation, labels = outlier_dataset(args.d, args.n, n_prime, args.seed)
        dump("model.csv", model)
        dump("evaluation.csv", evaluation, labels.astype(int), "label")
    else:
        train, test = sinc_dataset(args.scenario, args.n, n_prime, args.seed)
        dump("train.csv", train.inputs, train.targets, "target")
        dump("test.csv", test.inputs, test.targets, "target")
    _emit({"kind": args.kind, "seed": args.seed, "files": written}, out)
    return 0


# parser --------------------------------------------------------------------


def _add_common(p, alpha=True):
    p.add_argument("--header", choices=("auto", "yes", "no"), default="auto",
                   help="whether input CSVs start with a header line (default: detect)")
    p.add_argument("--seed", type=int, default=0)
    if alpha:
        p.add_argument("--alpha", type=_alpha, default=0.5)
        p.add_argument("--folds", type=int, default=5, help="cross-validation folds")
        p.add_argument("--max-centers", type=_positive_int, default=100)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rulsif", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("fit", help="fit a relative density-ratio model")
    p.add_argument("numerator")
    p.add_argument("denominator")
    _add_common(p)
    p.add_argument("--sigma-grid", type=_float_list, default=None,
                   help="comma-separated kernel widths (default: median heuristic grid)")
    p.add_argument("--lambda-grid", type=_float_list, default=LAMBDA_GRID)
    p.add_argument("--out", required=True, help="where to write model.json")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("pe", help="relative PE divergence from a saved model")
    p.add_argument("model")
    p.add_argument("numerator")
    p.add_argument("denominator")
    _add_common(p, alpha=False)
    p.set_defaults(func=cmd_pe)

    p = sub.add_parser("test", help="permutation two-sample test")
    p.add_argument("x")
    p.add_argument("x_prime")
    _add_common(p)
    p.add_argument("--direction", choices=DIRECTIONS, default="plain")
    p.add_argument("--estimator", choices=ESTIMATORS, default="pe_hat")
    p.add_argument("--permutations", type=_positive_int, default=100)
    p.add_argument("--significance", type=_unit_open, default=0.05)
    p.add_argument("--fast", action="store_true",
                   help="reuse the original (sigma, lambda) in every permutation")
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("outlier", help="score evaluation points against a clean model set")
    p.add_argument("model_set")
    p.add_argument("evaluation_set")
    _add_common(p)
    p.add_argument("--labels", default=None, help="one-column CSV of 0/1 outlier labels")
    p.add_argument("--labels-in-last-column", action="store_true",
                   help="take labels from the last column of the evaluation set")
    p.add_argument("--scores", required=True, help="where to write the per-sample scores CSV")
    p.set_defaults(func=cmd_outlier)

    p = sub.add_parser("repro", help="regenerate a synthetic experiment table")
    p.add_argument("experiment", choices=tuple(experiments.EXPERIMENTS))
    p.add_argument("--runs", type=_positive_int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--threads", type=_positive_int, default=None,
                   help="worker processes (default: $RULSIF_THREADS or 1); output does not depend on it")
    p.add_argument("--permutations", type=_positive_int, default=100)
    p.add_argument("--fast", action="store_true", help="fixed-hyper-parameter permutations")
    p.set_defaults(func=cmd_repro)

    p = sub.add_parser("data", help="dump a generated dataset as CSV")
    p.add_argument("kind", choices=("benchmark", "outlier", "sinc"))
    p.add_argument("--tag", choices=tuple("abcde"), default="a")
    p.add_argument("--d", type=_positive_int, default=1)
    p.add_argument("--scenario", choices=("no-shift", "shift"), default="shift")
    p.add_argument("--n", type=_positive_int, default=300)
    p.add_argument("--n-prime", type=_positive_int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_data)
    return parser


def _fail(code: str, message: str, err) -> None:
    err.write(f"rulsif: error[{code}]: {' '.join(str(message).split())}\n")


def main(argv: Optional[List[str]] = None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args, out)
    except UsageError as exc:
        _fail("usage", exc, err)
        return EXIT_USAGE
    except RulsifError as exc:
        _fail(exc.code, exc, err)
        return exc.exit_code
    except ValueError as exc:
        # configuration values rejected by a dataclass validator
        _fail("usage", exc, err)
        return EXIT_USAGE
    except OSError as exc:
        _fail("io", f"{exc.filename}: {exc.strerror}", err)
        return 3
