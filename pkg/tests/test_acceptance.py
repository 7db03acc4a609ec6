"""End-to-end acceptance checks, one test per criterion.

Each test records a single PASS/FAIL line (printed at the end of the pytest
run by ``conftest.py``) and then asserts. Statistical checks state their band
as a :class:`ToleranceBand`. All randomness flows from ``MASTER_SEED``.
"""

import json
import math
import os
import time

import numpy as np
import pytest

from rulsif.cli import main
from rulsif.covshift import WeightScheme, covshift_experiment
from rulsif.estimator import LAMBDA_GRID, build_hhat, build_hvec, solve_theta
from rulsif.experiments import EXPERIMENTS, outlier_aucs, pe_trials, trial_rejections
from rulsif.kernel import KernelSpec, select_centers
from rulsif.outlier import ScoredSet, auc
from rulsif.synthdata import benchmark_specs, true_relative_ratio
from rulsif.testkit import ToleranceBand, brute_force_auc, descent_minimize_objective, quadrature_pe

MASTER_SEED = 0
THREADS = int(os.environ.get("RULSIF_THREADS") or os.cpu_count() or 1)
PE_D_ALPHA0 = (math.exp(0.25) - 1.0) / 2.0  # closed form for N(0,1) vs N(0.5,1)

RESULTS = []


def record(number, ok, detail):
    line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


def random_instance(rng, b_max=100):
    d = int(rng.integers(1, 6))
    n, n_prime = int(rng.integers(10, 201)), int(rng.integers(10, 201))
    xn = rng.normal(size=(n, d))
    xd = rng.normal(rng.uniform(-1, 1), rng.uniform(0.5, 2.0), size=(n_prime, d))
    b = int(rng.integers(1, min(n, b_max) + 1))
    spec = KernelSpec(float(rng.uniform(0.2, 3.0)) * math.sqrt(d), select_centers(xn, b, int(rng.integers(1 << 31))))
    alpha = float(rng.choice([0.0, 0.5, 0.95]))
    return build_hhat(xn, xd, spec, alpha), build_hvec(xn, spec)


def test_01_solver_exactness():
    rng = np.random.default_rng([MASTER_SEED, 1])
    start = time.perf_counter()
    worst = 0.0
    for _ in range(50):
        h, v = random_instance(rng)
        lam = float(rng.choice(LAMBDA_GRID))
        theta = solve_theta(h, v, lam)
        worst = max(worst, float(np.max(np.abs((h + lam * np.eye(len(v))) @ theta - v))))
    elapsed = time.perf_counter() - start
    record(1, worst <= 1e-8 and elapsed < 30, f"max residual {worst:.2e} <= 1e-8 over 50 instances, {elapsed:.1f}s < 30s")


def test_02_objective_oracle():
    rng = np.random.default_rng([MASTER_SEED, 2])
    start = time.perf_counter()
    worst = 0.0
    for _ in range(20):
        h, v = random_instance(rng, b_max=5)
        lam = float(rng.choice(LAMBDA_GRID))
        # gradient tolerance 1e-10 bounds the oracle's own error by 1e-10 / lam <= 1e-7
        ref = descent_minimize_objective(h, v, lam, iters=2_000_000, tol=1e-10)
        worst = max(worst, float(np.max(np.abs(solve_theta(h, v, lam) - ref))))
    elapsed = time.perf_counter() - start
    record(2, worst <= 1e-4 and elapsed < 10, f"max |theta - descent| {worst:.2e} <= 1e-4 on 20 instances, {elapsed:.1f}s < 10s")


def test_03_divergence_ground_truth():
    start = time.perf_counter()
    p, pp = benchmark_specs("d")
    lines, ok = [], True
    for alpha in (0.0, 0.5, 0.95):
        truth = PE_D_ALPHA0 if alpha == 0.0 else quadrature_pe(p, pp, alpha)
        band = ToleranceBand(truth, 0.05, "fixed +/-0.05")
        est = pe_trials("d", alpha, 500, 50, seed=MASTER_SEED, threads=THREADS)
        m_hat, m_tilde = est.mean(axis=0)
        ok &= m_hat in band and m_tilde in band
        lines.append(f"a={alpha}: truth {truth:.4f} hat {m_hat:.4f} tilde {m_tilde:.4f}")
    elapsed = time.perf_counter() - start
    record(3, ok and elapsed < 180, "; ".join(lines) + f"; {elapsed:.0f}s < 180s")


def test_04_convergence_trend():
    lines, ok = [], True
    for tag in "bd":
        p, pp = benchmark_specs(tag)
        for alpha in (0.5, 0.95):
            truth = quadrature_pe(p, pp, alpha)
            err = {
                n: abs(pe_trials(tag, alpha, n, 30, seed=MASTER_SEED, threads=THREADS)[:, 0].mean() - truth)
                for n in (125, 500)
            }
            ok &= err[500] <= err[125]
            lines.append(f"{tag}/a={alpha}: |err| {err[125]:.4f}@125 -> {err[500]:.4f}@500")
    record(4, ok, "; ".join(lines))


def test_05_boundedness_oracle():
    x = np.linspace(-10.0, 10.0, 10_000)
    worst = -np.inf
    for tag in "abcde":
        p, pp = benchmark_specs(tag)
        for alpha in (0.25, 0.5, 0.95):
            worst = max(worst, float(np.max(true_relative_ratio(p, pp, alpha, x) - 1.0 / alpha)))
    record(5, worst <= 1e-12, f"max(r_alpha - 1/alpha) = {worst:.3e} <= 1e-12 on 10^4 points, datasets a-e")


def test_06_type_one_error():
    start = time.perf_counter()
    band = ToleranceBand(0.925, 0.075, "[0.85, 1.0]")
    full = 1.0 - trial_rejections("a", "plain", 0.5, 100, 100, seed=MASTER_SEED, threads=THREADS).mean()
    full_time = time.perf_counter() - start
    fast = 1.0 - trial_rejections(
        "a", "plain", 0.5, 100, 100, seed=MASTER_SEED, full_cv=False, threads=THREADS
    ).mean()
    record(6, full in band and full_time < 600,
           f"null acceptance {full:.2f} in [0.85, 1.0] (full CV, {full_time:.0f}s < 600s); fast mode {fast:.2f}")


def test_07_power_ordering():
    rates = {
        tag: 1.0 - trial_rejections(tag, "adaptive", 0.5, 300, 50, seed=MASTER_SEED, threads=THREADS).mean()
        for tag in "ad"
    }
    record(7, rates["d"] < rates["a"], f"adaptive null acceptance d={rates['d']:.2f} < a={rates['a']:.2f}")


def test_08_outlier_auc():
    start = time.perf_counter()
    # reference means: 0.933 (d=1, alpha=0), 0.859 and 0.842 (d=10, alpha=0.95 and 0)
    d1 = outlier_aucs(1, 0.0, 200, seed=MASTER_SEED, threads=THREADS).mean()
    d10 = outlier_aucs(10, 0.95, 200, seed=MASTER_SEED, threads=THREADS).mean()
    d10_0 = outlier_aucs(10, 0.0, 200, seed=MASTER_SEED, threads=THREADS).mean()
    elapsed = time.perf_counter() - start
    ok = d1 in ToleranceBand(0.933, 0.05) and d10 in ToleranceBand(0.859, 0.05) and d10 > d10_0
    record(8, ok and elapsed < 300,
           f"d=1,a=0 {d1:.3f} (0.933+/-0.05); d=10,a=.95 {d10:.3f} (0.859+/-0.05) > a=0 {d10_0:.3f}; {elapsed:.0f}s")


def test_09_auc_oracle():
    rng = np.random.default_rng([MASTER_SEED, 9])
    mismatches = 0
    for _ in range(100):
        n = int(rng.integers(2, 201))
        scores = rng.normal(size=n)
        # inject ties by snapping a random subset onto a coarse grid
        tied = rng.random(n) < 0.5
        scores[tied] = np.round(scores[tied] * 2) / 2
        labels = rng.random(n) < rng.uniform(0.05, 0.5)
        labels[0], labels[-1] = True, False
        if auc(ScoredSet(scores, labels)) != brute_force_auc(scores, labels):
            mismatches += 1
    record(9, mismatches == 0, f"{mismatches} mismatches between rank AUC and pair count on 100 tied sets")


def test_10_covariate_shift():
    start = time.perf_counter()
    none, riw, eiw = WeightScheme.none(), WeightScheme("riw", 0.5), WeightScheme("eiw", 0.5)
    shift = {s.scheme: s for s in covshift_experiment("shift", [none, riw, eiw], 50, MASTER_SEED)}
    same = {s.scheme: s for s in covshift_experiment("no-shift", [riw, eiw], 50, MASTER_SEED)}
    pooled_se = math.sqrt(same[riw].sd_mse**2 / 50 + same[eiw].sd_mse**2 / 50)
    gap = abs(same[riw].mean_mse - same[eiw].mean_mse)
    elapsed = time.perf_counter() - start
    ok = (
        shift[riw].mean_mse < shift[none].mean_mse
        and shift[riw].sd_mse <= shift[eiw].sd_mse
        and gap <= 2 * pooled_se
    )
    record(10, ok and elapsed < 300,
           f"shift: mean RIW {shift[riw].mean_mse:.4f} < none {shift[none].mean_mse:.4f}, "
           f"sd RIW {shift[riw].sd_mse:.4f} <= EIW {shift[eiw].sd_mse:.4f}; "
           f"no-shift gap {gap:.5f} <= 2 SE {2 * pooled_se:.5f}; {elapsed:.0f}s")


def _repro_all(out_dir, threads):
    for name in EXPERIMENTS:
        argv = ["repro", name, "--runs", "2", "--seed", "7", "--permutations", "3",
                "--threads", str(threads), "--out", str(out_dir)]
        assert main(argv, out=open(os.devnull, "w")) == 0
    return {p.name: p.read_bytes() for p in sorted(out_dir.iterdir())}


def test_11_determinism(tmp_path):
    first = _repro_all(tmp_path / "t1a", 1)
    second = _repro_all(tmp_path / "t1b", 1)
    eight = _repro_all(tmp_path / "t8", 8)
    ok = first == second == eight and len(first) == 7
    record(11, ok, f"{len(first)} repro tables byte-identical across reruns and --threads 1 vs 8")
