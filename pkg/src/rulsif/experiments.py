"""Desk-scale reproductions of the synthetic experiments.

Each experiment returns a list of row dicts with a fixed column order (see
``docs/experiments.md``). Trials are independent tasks seeded from
``(seed, trial keys)``; the same datasets are reused across alpha values and
directions within a run index (common random numbers), so rows are directly
comparable.
"""

from __future__ import annotations

import csv
import os
from typing import Dict, List, Sequence

import numpy as np

from ._random import TRIAL, derive_seed
from .covshift import WeightScheme, covshift_run, summarize_mse
from .csvio import format_value
from .divergence import estimate, true_pe_oracle
from .estimator import RulsifConfig, fit
from .homogeneity import TestConfig, lstt
from .outlier import auc, outlier_scores
from .parallel import pmap
from .synthdata import benchmark_dataset, benchmark_specs, outlier_dataset, true_relative_ratio

TAGS = "abcde"
ALPHAS = (0.0, 0.5, 0.95)
DIRECTIONS = ("plain", "reciprocal", "adaptive")


def _tag_key(tag: str) -> int:
    return TAGS.index(tag)


def _mean_sd(values) -> tuple:
    values = np.asarray(values, dtype=float)
    sd = float(np.std(values, ddof=1)) if values.size > 1 else 0.0
    return float(np.mean(values)), sd


def _check_runs(runs: int) -> int:
    runs = int(runs)
    if runs < 1:
        raise ValueError(f"runs must be >= 1, got {runs}")
    return runs


# ratio curves --------------------------------------------------------------


def _ratio_curve_trial(tag, alpha, n, seed, grid):
    ds = benchmark_dataset(tag, n, n, seed)
    model = fit(ds.numerator, ds.denominator, RulsifConfig(alpha=alpha, seed=seed))
    return model(grid[:, None])


def ratio_curves(runs: int = 1, seed: int = 0, n: int = 300, alphas: Sequence[float] = ALPHAS,
                 tags: str = TAGS, grid=None, threads: int = 1) -> List[dict]:
    runs = _check_runs(runs)
    grid = np.linspace(-5.0, 5.0, 101) if grid is None else np.asarray(grid, dtype=float)
    tasks = [
        (tag, a, n, derive_seed(seed, TRIAL, _tag_key(tag), r), grid)
        for tag in tags for a in alphas for r in range(runs)
    ]
    est = iter(pmap(_ratio_curve_trial, tasks, threads))
    rows = []
    for tag in tags:
        p, pp = benchmark_specs(tag)
        for a in alphas:
            curves = np.array([next(est) for _ in range(runs)])
            truth = true_relative_ratio(p, pp, a, grid)
            sd = curves.std(axis=0, ddof=1) if runs > 1 else np.zeros(grid.shape)
            for i, x in enumerate(grid):
                rows.append({
                    "dataset": tag, "alpha": a, "x": float(x), "true_ratio": float(truth[i]),
                    "mean_estimate": float(curves[:, i].mean()), "sd_estimate": float(sd[i]),
                    "runs": runs,
                })
    return rows


# divergence convergence ----------------------------------------------------


def _pe_trial(tag, alpha, n, seed):
    ds = benchmark_dataset(tag, n, n, seed)
    model = fit(ds.numerator, ds.denominator, RulsifConfig(alpha=alpha, seed=seed))
    e = estimate(model, ds.numerator, ds.denominator)
    return e.pe_hat, e.pe_tilde


def pe_trials(tag: str, alpha: float, n: int, runs: int, seed: int = 0, threads: int = 1) -> np.ndarray:
    """(runs, 2) array of (pe_hat, pe_tilde) on fresh datasets."""
    runs = _check_runs(runs)
    tasks = [(tag, alpha, n, derive_seed(seed, TRIAL, _tag_key(tag), n, r)) for r in range(runs)]
    return np.array(pmap(_pe_trial, tasks, threads))


def pe_convergence(runs: int = 30, seed: int = 0, sizes: Sequence[int] = (125, 250, 500),
                   alphas: Sequence[float] = ALPHAS, tags: str = TAGS, threads: int = 1) -> List[dict]:
    runs = _check_runs(runs)
    tasks = [
        (tag, a, n, derive_seed(seed, TRIAL, _tag_key(tag), n, r))
        for tag in tags for a in alphas for n in sizes for r in range(runs)
    ]
    res = iter(pmap(_pe_trial, tasks, threads))
    rows = []
    for tag in tags:
        p, pp = benchmark_specs(tag)
        for a in alphas:
            truth = true_pe_oracle(p, pp, a)
            for n in sizes:
                vals = np.array([next(res) for _ in range(runs)])
                mh, sh = _mean_sd(vals[:, 0])
                mt, st = _mean_sd(vals[:, 1])
                rows.append({
                    "dataset": tag, "alpha": a, "n": n, "truth": truth,
                    "mean_pe_hat": mh, "sd_pe_hat": sh, "mean_pe_tilde": mt, "sd_pe_tilde": st,
                    "runs": runs,
                })
    return rows


# homogeneity tests ---------------------------------------------------------


def _test_trial(tag, direction, alpha, n, permutations, significance, full_cv, seed):
    ds = benchmark_dataset(tag, n, n, seed)
    cfg = TestConfig(alpha=alpha, permutations=permutations, significance=significance,
                     direction=direction, rulsif=RulsifConfig(alpha=alpha, seed=seed), full_cv=full_cv)
    return lstt(ds.numerator, ds.denominator, cfg, seed=derive_seed(seed, 1)).reject


def trial_rejections(tag: str, direction: str, alpha: float, n: int, runs: int, seed: int = 0,
                     permutations: int = 100, significance: float = 0.05, full_cv: bool = True,
                     threads: int = 1) -> np.ndarray:
    """Boolean rejections of ``runs`` independent tests on fresh datasets."""
    runs = _check_runs(runs)
    tasks = [
        (tag, direction, alpha, n, permutations, significance, full_cv,
         derive_seed(seed, TRIAL, _tag_key(tag), n, r))
        for r in range(runs)
    ]
    return np.array(pmap(_test_trial, tasks, threads), dtype=bool)


def acceptance_rates(tags: str, runs: int, seed: int = 0, n: int = 100, alphas: Sequence[float] = ALPHAS,
                     directions: Sequence[str] = DIRECTIONS, permutations: int = 100,
                     significance: float = 0.05, full_cv: bool = True, threads: int = 1) -> List[dict]:
    runs = _check_runs(runs)
    combos = [(tag, d, a) for tag in tags for d in directions for a in alphas]
    tasks = [
        (tag, d, a, n, permutations, significance, full_cv, derive_seed(seed, TRIAL, _tag_key(tag), n, r))
        for tag, d, a in combos for r in range(runs)
    ]
    rejects = iter(pmap(_test_trial, tasks, threads))
    rows = []
    for tag, d, a in combos:
        rej = [next(rejects) for _ in range(runs)]
        rows.append({
            "dataset": tag, "direction": d, "alpha": a, "n": n, "permutations": permutations,
            "full_cv": int(full_cv), "acceptance_rate": 1.0 - float(np.mean(rej)), "runs": runs,
        })
    return rows


# outlier detection ---------------------------------------------------------


def _outlier_data(d, n, seed):
    """Regenerate (from derived streams) until both classes are present."""
    attempt = 0
    while True:
        s = seed if attempt == 0 else derive_seed(seed, attempt)
        model, evaluation, labels = outlier_dataset(d, n, n, s)
        if 0 < labels.sum() < labels.size:
            return model, evaluation, labels, s
        attempt += 1


def _outlier_trial(d, alpha, n, seed):
    model, evaluation, labels, s = _outlier_data(d, n, seed)
    return auc(outlier_scores(model, evaluation, RulsifConfig(alpha=alpha, seed=s), labels))


def outlier_aucs(d: int, alpha: float, runs: int, seed: int = 0, n: int = 100, threads: int = 1) -> np.ndarray:
    runs = _check_runs(runs)
    tasks = [(d, alpha, n, derive_seed(seed, TRIAL, d, r)) for r in range(runs)]
    return np.array(pmap(_outlier_trial, tasks, threads))


def outlier_auc(runs: int = 200, seed: int = 0, dims: Sequence[int] = (1, 5, 10),
                alphas: Sequence[float] = ALPHAS, n: int = 100, threads: int = 1) -> List[dict]:
    runs = _check_runs(runs)
    tasks = [(d, a, n, derive_seed(seed, TRIAL, d, r)) for d in dims for a in alphas for r in range(runs)]
    res = iter(pmap(_outlier_trial, tasks, threads))
    rows = []
    for d in dims:
        for a in alphas:
            m, s = _mean_sd([next(res) for _ in range(runs)])
            rows.append({"d": d, "alpha": a, "n": n, "mean_auc": m, "sd_auc": s, "runs": runs})
    return rows


# covariate shift -----------------------------------------------------------

COVSHIFT_PARAMS = (0.0, 0.25, 0.5, 0.75, 1.0)


def default_schemes(params: Sequence[float] = COVSHIFT_PARAMS) -> List[WeightScheme]:
    return [WeightScheme("riw", p) for p in params] + [WeightScheme("eiw", p) for p in params]


def covshift_table(scenario: str, runs: int, seed: int = 0, schemes: Sequence[WeightScheme] = None,
                   threads: int = 1) -> List[dict]:
    runs = _check_runs(runs)
    schemes = list(schemes) if schemes is not None else default_schemes()
    tasks = [(scenario, schemes, derive_seed(seed, TRIAL, r)) for r in range(runs)]
    mse = pmap(covshift_run, tasks, threads)
    return [s.row() for s in summarize_mse(schemes, mse)]


# registry ------------------------------------------------------------------


def _repro_ratio(runs, seed, threads, permutations, full_cv):
    return {"ratio_curves.csv": ratio_curves(runs, seed, threads=threads)}


def _repro_pe(runs, seed, threads, permutations, full_cv):
    return {"pe_convergence.csv": pe_convergence(runs, seed, threads=threads)}


def _repro_type1(runs, seed, threads, permutations, full_cv):
    return {"type1.csv": acceptance_rates("a", runs, seed, permutations=permutations,
                                          full_cv=full_cv, threads=threads)}


def _repro_power(runs, seed, threads, permutations, full_cv):
    return {"power.csv": acceptance_rates("bcd", runs, seed, permutations=permutations,
                                          full_cv=full_cv, threads=threads)}


def _repro_outlier(runs, seed, threads, permutations, full_cv):
    return {"outlier_auc.csv": outlier_auc(runs, seed, threads=threads)}


def _repro_covshift(runs, seed, threads, permutations, full_cv):
    return {
        f"covshift_{sc}.csv": covshift_table(sc, runs, seed, threads=threads)
        for sc in ("no-shift", "shift")
    }


EXPERIMENTS = {
    "ratio-curves": _repro_ratio,
    "pe-convergence": _repro_pe,
    "type1": _repro_type1,
    "power": _repro_power,
    "outlier-auc": _repro_outlier,
    "covshift": _repro_covshift,
}


def write_table(rows: List[dict], path: str) -> None:
    if not rows:
        raise ValueError("refusing to write an empty table")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(list(rows[0].keys()))
        for row in rows:
            w.writerow([format_value(v) for v in row.values()])


def run_experiment(name: str, out_dir: str, runs: int, seed: int = 0, threads: int = 1,
                   permutations: int = 100, full_cv: bool = True) -> Dict[str, List[dict]]:
    """Run one named experiment and write its table(s) into ``out_dir``."""
    try:
        fn = EXPERIMENTS[name]
    except KeyError:
        raise ValueError(f"unknown experiment {name!r}; choose from {', '.join(EXPERIMENTS)}") from None
    tables = fn(runs, seed, threads, permutations, full_cv)
    os.makedirs(out_dir, exist_ok=True)
    for fname, rows in tables.items():
        write_table(rows, os.path.join(out_dir, fname))
    return tables
