"""Importance-weighted kernel regression under covariate shift.

Two families of training weights are compared:

* relative importance weights  w_a(x) = p_te(x) / ((1 - a) p_te(x) + a p_tr(x)),
  estimated directly for each ``a``;
* exponentially flattened weights r(x)^tau with r = p_te / p_tr, where ``r``
  is estimated once and then flattened.

Both reduce to unweighted least squares at 0 and to ordinary importance
weighting at 1. The regression model is a Gaussian expansion centred on the
test inputs, fitted by weighted least squares with a small ridge; its width
is chosen by importance-weighted cross-validation.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np
import scipy.linalg

from ._random import FOLDS, TRIAL, derive_seed, rng_for
from .errors import DataError, SingularSystemError
from .estimator import RulsifConfig, fit, fold_labels
from .kernel import (
    as_samples,
    check_same_dim,
    gaussian_from_sqdist,
    median_pairwise_distance,
    squared_distances,
)
from .synthdata import LabeledSet, sinc_dataset

KINDS = ("none", "riw", "eiw", "iw")
RHO_FACTORS = (0.1, 0.2, 0.4, 0.8, 1.6)
DEFAULT_RIDGE = 1e-3


@dataclass(frozen=True)
class WeightScheme:
    """``kind`` with its flattening parameter (alpha for riw, tau for eiw)."""

    kind: str
    param: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if not 0.0 <= self.param <= 1.0:
            raise ValueError(f"flattening parameter must lie in [0, 1], got {self.param}")
        if self.kind == "none" and self.param != 0.0:
            raise ValueError("scheme 'none' requires param 0")
        if self.kind == "iw" and self.param != 1.0:
            raise ValueError("scheme 'iw' requires param 1")

    @classmethod
    def none(cls):
        return cls("none", 0.0)

    @classmethod
    def iw(cls):
        return cls("iw", 1.0)

    @property
    def label(self) -> str:
        return self.kind


@dataclass(frozen=True)
class WeightedFit:
    coefficients: np.ndarray
    rho: float
    weights: np.ndarray
    scheme: Optional[WeightScheme]
    centers: np.ndarray
    cv_scores: tuple = ()  # (rho, weighted validation error) per grid point
    test_mse: Optional[float] = None

    def predict(self, points) -> np.ndarray:
        x = as_samples(points, "points")
        return gaussian_from_sqdist(squared_distances(x, self.centers), self.rho) @ self.coefficients

    __call__ = predict


def _ratio_config(config: RulsifConfig, numerator_weight: float) -> RulsifConfig:
    return config.with_alpha(numerator_weight)


def relative_importance_weights(train_inputs, test_inputs, alpha: float, config: RulsifConfig = RulsifConfig()) -> np.ndarray:
    """Estimate w_alpha at the training inputs.

    The fit uses test inputs as numerator and training inputs as denominator
    with numerator mixing weight ``1 - alpha``, which is exactly w_alpha.
    ``alpha = 0`` short-circuits to ones. Negative estimates are floored at 0.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    xtr = as_samples(train_inputs, "train inputs")
    xte = as_samples(test_inputs, "test inputs")
    check_same_dim(xtr, xte, "train and test inputs")
    if alpha == 0.0:
        return np.ones(xtr.shape[0])
    model = fit(xte, xtr, _ratio_config(config, 1.0 - alpha))
    return np.maximum(model(xtr), 0.0)


def eiw_weights(train_inputs, test_inputs, tau: float, config: RulsifConfig = RulsifConfig()) -> np.ndarray:
    """Estimate p_te/p_tr once (the alpha = 1 relative weight), floor at 0, raise to ``tau``."""
    if not 0.0 <= tau <= 1.0:
        raise ValueError(f"tau must lie in [0, 1], got {tau}")
    xtr = as_samples(train_inputs, "train inputs")
    if tau == 0.0:
        return np.ones(xtr.shape[0])
    r = relative_importance_weights(xtr, test_inputs, 1.0, config)
    return r if tau == 1.0 else r**tau


def scheme_weights(scheme: WeightScheme, train_inputs, test_inputs, config: RulsifConfig = RulsifConfig()) -> np.ndarray:
    if scheme.kind == "none":
        return np.ones(as_samples(train_inputs, "train inputs").shape[0])
    if scheme.kind == "eiw":
        return eiw_weights(train_inputs, test_inputs, scheme.param, config)
    return relative_importance_weights(train_inputs, test_inputs, scheme.param, config)


def default_rho_grid(test_inputs) -> tuple:
    med = median_pairwise_distance(test_inputs)
    return tuple(f * med for f in RHO_FACTORS)


def _weighted_solve(phi: np.ndarray, y: np.ndarray, w: np.ndarray, ridge: float) -> np.ndarray:
    """argmin_b 1/m sum_j w_j (phi_j b - y_j)^2 + ridge |b|^2."""
    m = phi.shape[0]
    pw = phi * w[:, None]
    a = pw.T @ phi + (m * ridge) * np.eye(phi.shape[1])
    rhs = pw.T @ y
    try:
        c = scipy.linalg.cho_factor(a, lower=True, check_finite=False)
        scale = max(float(np.max(a.diagonal())), np.finfo(float).tiny)
        if np.min(np.diag(c[0])) ** 2 <= a.shape[0] * np.finfo(float).eps * scale:
            raise np.linalg.LinAlgError("singular")
        beta = scipy.linalg.cho_solve(c, rhs, check_finite=False)
    except np.linalg.LinAlgError:
        raise SingularSystemError(
            "weighted normal equations are singular; use a positive ridge"
        ) from None
    return beta


def weighted_kernel_ls(
    train: LabeledSet,
    test_inputs,
    weights,
    rho_grid: Optional[Sequence[float]] = None,
    ridge: float = DEFAULT_RIDGE,
    cv_folds: int = 5,
    seed: int = 0,
) -> WeightedFit:
    """Weighted least-squares fit of a Gaussian expansion on the test inputs.

    For each width the fold-wise validation error is the weighted mean
    ``1/|V| sum_V w_j (f(x_j) - y_j)^2`` (importance-weighted CV); the width
    with the smallest mean over folds is refit on all training data.
    """
    xtr = train.inputs
    ytr = train.targets
    centers = as_samples(test_inputs, "test inputs")
    check_same_dim(xtr, centers, "train and test inputs")
    w = np.asarray(weights, dtype=float).ravel()
    if w.shape[0] != xtr.shape[0]:
        raise DataError(f"{w.shape[0]} weights for {xtr.shape[0]} training points")
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise DataError("weights must be finite and non-negative")
    if ridge < 0:
        raise ValueError(f"ridge must be non-negative, got {ridge}")
    rhos = tuple(float(r) for r in (rho_grid if rho_grid is not None else default_rho_grid(centers)))
    if not rhos:
        raise ValueError("rho_grid must not be empty")
    k = int(cv_folds)
    if k < 2 or k > xtr.shape[0]:
        raise DataError(f"cv_folds={k} is invalid for {xtr.shape[0]} training points")

    labels = fold_labels(xtr.shape[0], k, rng_for(seed, FOLDS, 2))
    sq = squared_distances(xtr, centers)
    cv_scores = []
    for rho in rhos:
        phi = gaussian_from_sqdist(sq, rho)
        err = 0.0
        for fold in range(k):
            tr, va = labels != fold, labels == fold
            beta = _weighted_solve(phi[tr], ytr[tr], w[tr], ridge)
            err += float(np.mean(w[va] * (phi[va] @ beta - ytr[va]) ** 2))
        cv_scores.append((rho, err / k))
    # ties go to the wider (smoother) model
    rho = min(cv_scores, key=lambda e: (e[1], -e[0]))[0]
    beta = _weighted_solve(gaussian_from_sqdist(sq, rho), ytr, w, ridge)
    return WeightedFit(beta, rho, w, None, centers, tuple(cv_scores))


def fit_scheme(
    scheme: WeightScheme,
    train: LabeledSet,
    test: LabeledSet,
    config: RulsifConfig = RulsifConfig(),
    ridge: float = DEFAULT_RIDGE,
    cv_folds: int = 5,
    seed: int = 0,
) -> WeightedFit:
    """Weights for ``scheme``, weighted fit, and test MSE against ``test.targets``."""
    w = scheme_weights(scheme, train.inputs, test.inputs, config)
    res = weighted_kernel_ls(train, test.inputs, w, ridge=ridge, cv_folds=cv_folds, seed=seed)
    mse = float(np.mean((res.predict(test.inputs) - test.targets) ** 2))
    return WeightedFit(res.coefficients, res.rho, w, scheme, res.centers, res.cv_scores, mse)


@dataclass(frozen=True)
class SchemeSummary:
    scheme: WeightScheme
    mean_mse: float
    sd_mse: float
    runs: int

    def row(self) -> dict:
        return {
            "scheme": self.scheme.kind,
            "param": self.scheme.param,
            "mean_mse": self.mean_mse,
            "sd_mse": self.sd_mse,
            "runs": self.runs,
        }


def covshift_run(scenario: str, schemes: Sequence[WeightScheme], seed: int, n_tr: int = 100, n_te: int = 200,
                 config: RulsifConfig = RulsifConfig()) -> list:
    """Test MSE of every scheme on one generated dataset.

    The ratio estimate behind all ``eiw`` schemes is shared, so every
    flattening level sees the same underlying estimate.
    """
    train, test = sinc_dataset(scenario, n_tr, n_te, seed)
    cfg = replace(config, seed=seed)
    base_ratio = None
    out = []
    for scheme in schemes:
        if scheme.kind == "eiw" and 0.0 < scheme.param:
            if base_ratio is None:
                base_ratio = relative_importance_weights(train.inputs, test.inputs, 1.0, cfg)
            w = base_ratio if scheme.param == 1.0 else base_ratio**scheme.param
        else:
            w = scheme_weights(scheme, train.inputs, test.inputs, cfg)
        res = weighted_kernel_ls(train, test.inputs, w, seed=seed)
        out.append(float(np.mean((res.predict(test.inputs) - test.targets) ** 2)))
    return out


def summarize_mse(schemes: Sequence[WeightScheme], mse) -> list:
    """Aggregate a (runs x schemes) MSE array into per-scheme mean and sd."""
    mse = np.asarray(mse, dtype=float).reshape(-1, len(schemes))
    runs = mse.shape[0]
    out = []
    for j, scheme in enumerate(schemes):
        sd = float(np.std(mse[:, j], ddof=1)) if runs > 1 else 0.0
        out.append(SchemeSummary(scheme, float(np.mean(mse[:, j])), sd, runs))
    return out


def covshift_experiment(scenario: str, schemes: Sequence[WeightScheme], runs: int, seed: int, **kwargs) -> list:
    """Mean and sd of the test MSE per scheme over ``runs`` generated datasets."""
    if int(runs) < 1:
        raise ValueError(f"runs must be >= 1, got {runs}")
    mse = [covshift_run(scenario, schemes, derive_seed(seed, TRIAL, r), **kwargs) for r in range(int(runs))]
    return summarize_mse(schemes, mse)
