import math

import numpy as np
import pytest

from rulsif.divergence import true_pe_oracle
from rulsif.estimator import solve_theta
from rulsif.synthdata import STANDARD_NORMAL, benchmark_specs
from rulsif.testkit import (
    NonConvergenceError,
    ToleranceBand,
    binomial_band,
    brute_force_auc,
    clt_band,
    descent_minimize_objective,
    objective,
    quadrature_pe,
)


def test_descent_scalar_by_hand():
    got = descent_minimize_objective(np.array([[1.0]]), np.array([1.0]), 1.0)
    assert got[0] == pytest.approx(0.5, abs=1e-12)


def test_descent_large_lambda_shrinks(rng):
    a = rng.normal(size=(8, 4))
    assert np.linalg.norm(descent_minimize_objective(a.T @ a / 8, np.ones(4), 1e4)) < 1e-3


def test_descent_objective_matches_analytic(rng):
    a = rng.normal(size=(12, 4))
    h, v, lam = a.T @ a / 12, rng.uniform(size=4), 0.1
    ref = solve_theta(h, v, lam)
    assert abs(objective(h, v, lam, descent_minimize_objective(h, v, lam)) - objective(h, v, lam, ref)) < 1e-8


def test_descent_reports_non_convergence():
    with pytest.raises(NonConvergenceError):
        descent_minimize_objective(np.eye(2), np.ones(2), 0.0, iters=3)
    with pytest.raises(ValueError):
        descent_minimize_objective(np.eye(11), np.ones(11), 1.0)


def test_brute_force_auc_examples():
    assert brute_force_auc([3, 2, 1, 0], [False, False, True, True]) == 1.0
    assert brute_force_auc([0.9, 0.8, 0.7], [False, True, False]) == 0.5
    assert brute_force_auc([1, 1, 1], [True, False, False]) == 0.5
    with pytest.raises(ValueError):
        brute_force_auc([1, 2], [True, True])


def test_quadrature_equal_specs_zero():
    assert abs(quadrature_pe(STANDARD_NORMAL, STANDARD_NORMAL, 0.5)) < 1e-6


def test_quadrature_dataset_d_closed_form():
    assert quadrature_pe(*benchmark_specs("d"), 0.0) == pytest.approx((math.exp(0.25) - 1) / 2, abs=1e-4)
    assert quadrature_pe(*benchmark_specs("d"), 0.0) == pytest.approx(0.142013, abs=1e-4)


@pytest.mark.parametrize("tag", "abcde")
@pytest.mark.parametrize("alpha", [0.0, 0.5, 0.95])
def test_quadrature_agrees_with_oracle(tag, alpha):
    p, pp = benchmark_specs(tag)
    assert abs(quadrature_pe(p, pp, alpha) - true_pe_oracle(p, pp, alpha)) < 1e-5


def test_tolerance_bands():
    b = binomial_band(0.05, 100)
    assert b.abs_tol == pytest.approx(3 * math.sqrt(0.05 * 0.95 / 100))
    assert 0.05 in b and 0.2 not in b
    c = clt_band(1.0, 2.0, 400, k=2.0)
    assert (c.low, c.high) == (0.8, 1.2)
    with pytest.raises(ValueError):
        ToleranceBand(0.0, -1.0)
