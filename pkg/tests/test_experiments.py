import numpy as np
import pytest

from rulsif.experiments import (
    acceptance_rates,
    outlier_auc,
    pe_convergence,
    ratio_curves,
    run_experiment,
    write_table,
)
from rulsif.parallel import pmap, resolve_threads


def square(x):
    return x * x


def test_pmap_preserves_order():
    tasks = [(i,) for i in range(20)]
    assert pmap(square, tasks, 1) == pmap(square, tasks, 3) == [i * i for i in range(20)]


def test_resolve_threads(monkeypatch):
    monkeypatch.delenv("RULSIF_THREADS", raising=False)
    assert resolve_threads(None) == 1
    monkeypatch.setenv("RULSIF_THREADS", "4")
    assert resolve_threads(None) == 4
    assert resolve_threads(2) == 2
    with pytest.raises(ValueError):
        resolve_threads(0)


def test_ratio_curves_schema_single_run():
    rows = ratio_curves(runs=1, n=60, alphas=(0.5,), tags="b", grid=[-1.0, 0.0, 1.0])
    assert len(rows) == 3
    assert list(rows[0]) == ["dataset", "alpha", "x", "true_ratio", "mean_estimate", "sd_estimate", "runs"]
    assert all(r["sd_estimate"] == 0.0 for r in rows)


def test_pe_convergence_schema():
    rows = pe_convergence(runs=2, sizes=(60,), alphas=(0.0,), tags="d")
    assert len(rows) == 1
    assert list(rows[0]) == [
        "dataset", "alpha", "n", "truth", "mean_pe_hat", "sd_pe_hat", "mean_pe_tilde", "sd_pe_tilde", "runs",
    ]
    assert rows[0]["truth"] == pytest.approx((np.exp(0.25) - 1) / 2, abs=1e-9)


def test_acceptance_rates_schema():
    rows = acceptance_rates("a", runs=1, n=40, alphas=(0.5,), directions=("plain",), permutations=2, full_cv=False)
    assert len(rows) == 1
    assert list(rows[0]) == ["dataset", "direction", "alpha", "n", "permutations", "full_cv", "acceptance_rate", "runs"]
    assert rows[0]["acceptance_rate"] in (0.0, 1.0)


def test_outlier_schema():
    rows = outlier_auc(runs=1, dims=(1,), alphas=(0.0,), n=60)
    assert list(rows[0]) == ["d", "alpha", "n", "mean_auc", "sd_auc", "runs"]
    assert 0.0 <= rows[0]["mean_auc"] <= 1.0


def test_unknown_experiment(tmp_path):
    with pytest.raises(ValueError):
        run_experiment("nope", str(tmp_path), 1)


def test_empty_table_refused(tmp_path):
    with pytest.raises(ValueError):
        write_table([], str(tmp_path / "x.csv"))
