"""Permutation two-sample homogeneity test on the relative PE divergence.

Three ways of orienting the asymmetric divergence are supported:

``plain``       the first sample set is the ratio numerator;
``reciprocal``  the roles are swapped;
``adaptive``    both are run on independent permutation streams and the
                smaller p-value is reported.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from ._random import DIRECTION, PERMUTATION, derive_seed, rng_for
from .divergence import pe_hat_from_values, pe_tilde_from_values
from .estimator import RulsifConfig, RulsifModel, fit, fit_fixed, sigma_grid_for
from .kernel import as_samples, check_same_dim, select_centers

DIRECTIONS = ("plain", "reciprocal", "adaptive")
ESTIMATORS = ("pe_hat", "pe_tilde")


@dataclass(frozen=True)
class TestConfig:
    """Settings for :func:`lstt`.

    ``alpha`` overrides ``rulsif.alpha``. With ``full_cv=False`` each
    permutation reuses the (sigma, lambda) chosen on the original split; this
    is faster but only approximates the null distribution.
    """

    __test__ = False  # not a pytest class

    alpha: float = 0.5
    permutations: int = 100
    significance: float = 0.05
    direction: str = "plain"
    estimator: str = "pe_hat"
    rulsif: RulsifConfig = field(default_factory=RulsifConfig)
    full_cv: bool = True

    def __post_init__(self):
        if not 0.0 <= self.alpha < 1.0:
            raise ValueError(f"alpha must lie in [0, 1), got {self.alpha}")
        if int(self.permutations) < 1:
            raise ValueError(f"permutations must be >= 1, got {self.permutations}")
        if not 0.0 < self.significance < 1.0:
            raise ValueError(f"significance must lie in (0, 1), got {self.significance}")
        if self.direction not in DIRECTIONS:
            raise ValueError(f"direction must be one of {DIRECTIONS}, got {self.direction!r}")
        if self.estimator not in ESTIMATORS:
            raise ValueError(f"estimator must be one of {ESTIMATORS}, got {self.estimator!r}")

    @property
    def fit_config(self) -> RulsifConfig:
        return self.rulsif.with_alpha(self.alpha)


@dataclass(frozen=True)
class PermutationSummary:
    count: int
    mean: float
    sd: float

    @classmethod
    def of(cls, values) -> "PermutationSummary":
        values = np.asarray(values, dtype=float)
        sd = float(np.std(values, ddof=1)) if values.size > 1 else 0.0
        return cls(int(values.size), float(np.mean(values)), sd)


@dataclass(frozen=True)
class PermutationResult:
    p_value: float
    statistic: float
    permuted: PermutationSummary


@dataclass(frozen=True)
class TestOutcome:
    __test__ = False

    p_value: float
    p_plain: Optional[float]
    p_reciprocal: Optional[float]
    statistic: float
    permuted_statistics: PermutationSummary
    reject: bool
    direction_used: str

    def to_dict(self) -> dict:
        s = self.permuted_statistics
        return {
            "p_value": self.p_value,
            "p_plain": self.p_plain,
            "p_reciprocal": self.p_reciprocal,
            "statistic": self.statistic,
            "permuted_statistics": {"count": s.count, "mean": s.mean, "sd": s.sd},
            "reject": self.reject,
            "direction_used": self.direction_used,
        }


def _statistic(model: RulsifModel, xn: np.ndarray, xd: np.ndarray, estimator: str) -> float:
    rn = model(xn)
    if estimator == "pe_tilde":
        return pe_tilde_from_values(rn)
    return pe_hat_from_values(rn, model(xd), model.alpha)


def divergence_statistic(x, x_prime, config: TestConfig) -> float:
    """Fit on (x, x_prime) with x as numerator and return the chosen estimate."""
    xn = as_samples(x, "x")
    xd = as_samples(x_prime, "x_prime")
    model = fit(xn, xd, config.fit_config)
    return _statistic(model, xn, xd, config.estimator)


def permutation_pvalue(x, x_prime, config: TestConfig, seed: int = 0) -> PermutationResult:
    """p = (1 + #{permuted >= observed}) / (B + 1), with x as numerator.

    Replicate b shuffles the pooled samples with a stream derived from
    ``(seed, b)`` and refits from scratch (including cross-validation unless
    ``config.full_cv`` is False).
    """
    xn = as_samples(x, "x")
    xd = as_samples(x_prime, "x_prime")
    check_same_dim(xn, xd, "x and x_prime")
    fcfg = config.fit_config
    # the pooled multiset is the same for every permutation, so is the median grid
    fcfg = replace(fcfg, sigma_grid=sigma_grid_for(xn, xd, fcfg))
    model = fit(xn, xd, fcfg)
    observed = _statistic(model, xn, xd, config.estimator)
    sigma, lam = model.sigma, model.lam

    pooled = np.vstack([xn, xd])
    n = xn.shape[0]
    permuted = np.empty(int(config.permutations))
    for b in range(permuted.shape[0]):
        order = rng_for(seed, PERMUTATION, b).permutation(pooled.shape[0])
        pn, pd = pooled[order[:n]], pooled[order[n:]]
        if config.full_cv:
            m = fit(pn, pd, fcfg)
        else:
            centers = select_centers(pn, fcfg.max_centers, fcfg.seed)
            m = fit_fixed(pn, pd, sigma, lam, fcfg.alpha, centers=centers, seed=fcfg.seed)
        permuted[b] = _statistic(m, pn, pd, config.estimator)
    p = (1.0 + np.count_nonzero(permuted >= observed)) / (permuted.shape[0] + 1.0)
    return PermutationResult(float(p), float(observed), PermutationSummary.of(permuted))


def _outcome(res: PermutationResult, config: TestConfig, direction: str, p_plain=None, p_recip=None):
    return TestOutcome(
        p_value=res.p_value,
        p_plain=p_plain,
        p_reciprocal=p_recip,
        statistic=res.statistic,
        permuted_statistics=res.permuted,
        reject=bool(res.p_value < config.significance),
        direction_used=direction,
    )


def lstt(x, x_prime, config: TestConfig = TestConfig(), seed: int = 0) -> TestOutcome:
    """Least-squares two-sample test in the configured direction.

    ``reciprocal`` on (x, x') is exactly ``plain`` on (x', x) with the same
    seed. ``adaptive`` runs plain and reciprocal on two streams derived from
    ``seed`` and keeps the smaller p-value (plain on ties).
    """
    if config.direction == "plain":
        res = permutation_pvalue(x, x_prime, config, seed)
        return _outcome(res, config, "plain", p_plain=res.p_value)
    if config.direction == "reciprocal":
        res = permutation_pvalue(x_prime, x, config, seed)
        return _outcome(res, config, "reciprocal", p_recip=res.p_value)
    plain = permutation_pvalue(x, x_prime, config, derive_seed(seed, DIRECTION, 0))
    recip = permutation_pvalue(x_prime, x, config, derive_seed(seed, DIRECTION, 1))
    if recip.p_value < plain.p_value:
        return _outcome(recip, config, "reciprocal", plain.p_value, recip.p_value)
    return _outcome(plain, config, "plain", plain.p_value, recip.p_value)


def with_direction(config: TestConfig, direction: str) -> TestConfig:
    return replace(config, direction=direction)
