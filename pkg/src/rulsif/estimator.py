"""Least-squares fitting of the alpha-relative density ratio.

The ratio ``p(x) / (alpha p(x) + (1 - alpha) p'(x))`` is modelled as a linear
combination of Gaussian bumps centred on numerator samples,
``g(x) = sum_l theta_l K(x, c_l)``, and ``theta`` is the minimiser of

    1/2 theta' H theta - h' theta + lambda/2 theta' theta

which is available in closed form as ``(H + lambda I)^{-1} h``.  The kernel
width and ``lambda`` are chosen by k-fold cross-validation on the held-out
squared-error criterion (see :func:`j_criterion`).
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np
import scipy.linalg
from scipy.linalg.lapack import dposv

from ._random import FOLDS, rng_for
from .errors import DataError, SingularSystemError
from .kernel import (
    KernelSpec,
    as_samples,
    check_same_dim,
    gaussian_from_sqdist,
    kernel_matrix,
    median_pairwise_distance,
    select_centers,
    squared_distances,
)

SIGMA_FACTORS = (0.25, 0.5, 0.75, 1.0, 1.5, 2.0)
LAMBDA_GRID = (1e-3, 1e-2, 1e-1, 1.0, 10.0)

RESIDUAL_TOL = 1e-8
_EPS = np.finfo(float).eps
_TINY = np.finfo(float).tiny


@dataclass(frozen=True)
class RulsifConfig:
    """Hyper-parameters for :func:`fit`.

    ``sigma_grid=None`` means "median pairwise distance of the pooled samples
    times ``SIGMA_FACTORS``"; an explicit grid is used as absolute widths.
    """

    alpha: float = 0.5
    sigma_grid: Optional[tuple] = None
    lambda_grid: tuple = LAMBDA_GRID
    cv_folds: int = 5
    max_centers: int = 100
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.alpha < 1.0:
            raise ValueError(f"alpha must lie in [0, 1), got {self.alpha}")
        if self.sigma_grid is not None:
            grid = tuple(float(s) for s in self.sigma_grid)
            if not grid or any(not (s > 0 and np.isfinite(s)) for s in grid):
                raise ValueError("sigma_grid must be a non-empty list of positive widths")
            object.__setattr__(self, "sigma_grid", grid)
        lgrid = tuple(float(v) for v in self.lambda_grid)
        if not lgrid or any(not (v >= 0 and np.isfinite(v)) for v in lgrid):
            raise ValueError("lambda_grid must be a non-empty list of non-negative values")
        object.__setattr__(self, "lambda_grid", lgrid)
        if int(self.cv_folds) < 2:
            raise ValueError(f"cv_folds must be >= 2, got {self.cv_folds}")
        if int(self.max_centers) < 1:
            raise ValueError(f"max_centers must be >= 1, got {self.max_centers}")

    def with_alpha(self, alpha: float) -> "RulsifConfig":
        return replace(self, alpha=alpha)


@dataclass(frozen=True)
class CvReport:
    entries: tuple  # of (sigma, lambda, score)
    selected: tuple  # (sigma, lambda)

    @property
    def selected_score(self) -> float:
        for s, l, score in self.entries:
            if (s, l) == self.selected:
                return score
        raise KeyError(self.selected)


@dataclass(frozen=True)
class RulsifModel:
    centers: np.ndarray
    sigma: float
    alpha: float
    lam: float
    theta: np.ndarray
    seed: int = 0
    cv: Optional[CvReport] = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "centers", as_samples(self.centers, "centers"))
        theta = np.asarray(self.theta, dtype=float).ravel()
        if theta.shape[0] != self.centers.shape[0]:
            raise DataError(
                f"theta has {theta.shape[0]} entries for {self.centers.shape[0]} centers"
            )
        if not np.all(np.isfinite(theta)):
            raise DataError("theta contains non-finite values")
        object.__setattr__(self, "theta", theta)

    @property
    def kernel(self) -> KernelSpec:
        return KernelSpec(self.sigma, self.centers)

    @property
    def dim(self) -> int:
        return self.centers.shape[1]

    @property
    def provenance(self):
        return self.cv if self.cv is not None else "fixed"

    def predict(self, points) -> np.ndarray:
        return predict(self, points)

    __call__ = predict

    def to_dict(self) -> dict:
        entries = None
        if self.cv is not None:
            entries = [[float(s), float(l), float(v)] for s, l, v in self.cv.entries]
        return {
            "alpha": float(self.alpha),
            "sigma": float(self.sigma),
            "lambda": float(self.lam),
            "centers": self.centers.tolist(),
            "theta": self.theta.tolist(),
            "seed": int(self.seed),
            "cv_entries": entries,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "RulsifModel":
        try:
            cv = None
            if doc.get("cv_entries") is not None:
                entries = tuple((float(s), float(l), float(v)) for s, l, v in doc["cv_entries"])
                cv = CvReport(entries, (float(doc["sigma"]), float(doc["lambda"])))
            return cls(
                centers=np.asarray(doc["centers"], dtype=float),
                sigma=float(doc["sigma"]),
                alpha=float(doc["alpha"]),
                lam=float(doc["lambda"]),
                theta=np.asarray(doc["theta"], dtype=float),
                seed=int(doc["seed"]),
                cv=cv,
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise DataError(f"malformed model document: {exc}") from exc

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def loads(cls, text: str) -> "RulsifModel":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DataError(f"model file is not valid JSON: {exc}") from exc
        return cls.from_dict(doc)


def build_hhat(numerator, denominator, spec: KernelSpec, alpha: float) -> np.ndarray:
    """H[l, l'] = alpha/n sum_i K(x_i,c_l)K(x_i,c_l') + (1-alpha)/n' sum_j K(x'_j,c_l)K(x'_j,c_l')."""
    a = kernel_matrix(numerator, spec)
    b = kernel_matrix(denominator, spec)
    return _hhat(a, b, alpha)


def _hhat(knu: np.ndarray, kde: np.ndarray, alpha: float) -> np.ndarray:
    h = (1.0 - alpha) / kde.shape[0] * (kde.T @ kde)
    if alpha > 0.0:
        h += alpha / knu.shape[0] * (knu.T @ knu)
    # symmetric up to round-off from the two products; make it exactly so
    return 0.5 * (h + h.T)


def build_hvec(numerator, spec: KernelSpec) -> np.ndarray:
    """h[l] = mean_i K(x_i, c_l)."""
    return kernel_matrix(numerator, spec).mean(axis=0)


def solve_theta(hhat: np.ndarray, hvec: np.ndarray, lam: float) -> np.ndarray:
    """Solve (H + lam I) theta = h.

    Cholesky first; on failure a pivoted LU. Raises
    :class:`SingularSystemError` if the system is numerically singular or the
    residual exceeds ``RESIDUAL_TOL`` in the max-norm.
    """
    hhat = np.asarray(hhat, dtype=float)
    hvec = np.asarray(hvec, dtype=float)
    if lam < 0:
        raise ValueError(f"lambda must be non-negative, got {lam}")
    a = hhat + lam * np.eye(hvec.shape[0])
    return _solve_spd(a, hvec, lam)


def _solve_spd(a: np.ndarray, hvec: np.ndarray, lam: float) -> np.ndarray:
    b = hvec.shape[0]
    tiny = b * _EPS * max(float(np.max(np.abs(a.diagonal()))), _TINY)
    factor, theta, info = dposv(a, hvec, lower=1)
    if info == 0:
        if np.min(factor.diagonal()) ** 2 <= tiny:
            raise SingularSystemError(f"H + lambda I is singular (lambda={lam})")
    else:
        with warnings.catch_warnings():
            # singularity is detected below from the pivots
            warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
            lu, piv = scipy.linalg.lu_factor(a, check_finite=False)
        if np.min(np.abs(lu.diagonal())) <= tiny:
            raise SingularSystemError(f"H + lambda I is singular (lambda={lam})")
        theta = scipy.linalg.lu_solve((lu, piv), hvec, check_finite=False)
    if not np.all(np.isfinite(theta)):
        raise SingularSystemError(f"non-finite solution (lambda={lam})")
    resid = np.max(np.abs(a @ theta - hvec))
    if resid > RESIDUAL_TOL:
        raise SingularSystemError(
            f"linear solve residual {resid:.3g} exceeds {RESIDUAL_TOL:g} (lambda={lam})"
        )
    return theta


def predict(model: RulsifModel, points) -> np.ndarray:
    """Evaluate sum_l theta_l K(x, c_l). Values may be negative; no clipping."""
    return kernel_matrix(points, model.kernel) @ model.theta


def j_criterion(
    ratio: Callable[[np.ndarray], np.ndarray],
    holdout_numerator,
    holdout_denominator,
    alpha: float,
) -> float:
    """Empirical squared-error criterion of a ratio function (constant dropped).

    ``alpha/2 mean_P[g^2] + (1-alpha)/2 mean_P'[g^2] - mean_P[g]``; lower is better.
    ``ratio`` is anything mapping an ``(m, d)`` array to ``m`` values, e.g. a
    :class:`RulsifModel`.
    """
    xn = as_samples(holdout_numerator, "holdout numerator")
    xd = as_samples(holdout_denominator, "holdout denominator")
    gn = np.asarray(ratio(xn), dtype=float)
    gd = np.asarray(ratio(xd), dtype=float)
    return _j_from_values(gn, gd, alpha)


def _j_from_values(gn: np.ndarray, gd: np.ndarray, alpha: float):
    return (
        0.5 * alpha * np.mean(gn**2, axis=0)
        + 0.5 * (1.0 - alpha) * np.mean(gd**2, axis=0)
        - np.mean(gn, axis=0)
    )


def fold_labels(n: int, folds: int, rng: np.random.Generator) -> np.ndarray:
    """Assign ``n`` items to ``folds`` contiguous blocks of a shuffled order."""
    labels = np.empty(n, dtype=np.intp)
    for k, block in enumerate(np.array_split(rng.permutation(n), folds)):
        labels[block] = k
    return labels


def sigma_grid_for(numerator, denominator, config: RulsifConfig) -> tuple:
    if config.sigma_grid is not None:
        return config.sigma_grid
    med = median_pairwise_distance(np.vstack([numerator, denominator]))
    return tuple(med * f for f in SIGMA_FACTORS)


def select_pair(entries: Sequence[tuple]) -> tuple:
    """Minimum score; ties go to the larger lambda, then the larger sigma."""
    s, l, _ = min(entries, key=lambda e: (e[2], -e[1], -e[0]))
    return (s, l)


def cross_validate(
    numerator,
    denominator,
    config: RulsifConfig,
    centers: Optional[np.ndarray] = None,
) -> CvReport:
    """Score every (sigma, lambda) pair by the mean held-out criterion.

    Both sample sets are shuffled independently (seeded) and cut into
    ``cv_folds`` blocks; fold k holds out block k of each. Centers are fixed
    before the split and shared by all folds. A candidate whose system is
    singular on some fold scores ``inf``.
    """
    xn = as_samples(numerator, "numerator")
    xd = as_samples(denominator, "denominator")
    check_same_dim(xn, xd, "numerator and denominator")
    k = int(config.cv_folds)
    if k > min(xn.shape[0], xd.shape[0]):
        raise DataError(
            f"cv_folds={k} exceeds the sample count (n={xn.shape[0]}, n'={xd.shape[0]})"
        )
    if centers is None:
        centers = select_centers(xn, config.max_centers, config.seed)
    centers = as_samples(centers, "centers")
    check_same_dim(xn, centers, "samples and centers")

    alpha = float(config.alpha)
    sigmas = sigma_grid_for(xn, xd, config)
    lams = config.lambda_grid
    fn = fold_labels(xn.shape[0], k, rng_for(config.seed, FOLDS, 0))
    fd = fold_labels(xd.shape[0], k, rng_for(config.seed, FOLDS, 1))
    dn = squared_distances(xn, centers)
    dd = squared_distances(xd, centers)

    nn = np.bincount(fn, minlength=k)
    nd = np.bincount(fd, minlength=k)
    eye = np.eye(centers.shape[0])
    entries = []
    for sigma in sigmas:
        knu = gaussian_from_sqdist(dn, sigma)
        kde = gaussian_from_sqdist(dd, sigma)
        # per-fold Gram blocks; a training Gram is the total minus its fold
        gn = [knu[fn == f].T @ knu[fn == f] for f in range(k)]
        gd = [kde[fd == f].T @ kde[fd == f] for f in range(k)]
        sn = [knu[fn == f].sum(axis=0) for f in range(k)]
        gn_all, gd_all, sn_all = sum(gn), sum(gd), sum(sn)
        scores = np.zeros(len(lams))
        for fold in range(k):
            ntr, dtr = xn.shape[0] - nn[fold], xd.shape[0] - nd[fold]
            hhat = (1.0 - alpha) / dtr * (gd_all - gd[fold])
            if alpha > 0.0:
                hhat += alpha / ntr * (gn_all - gn[fold])
            hhat = 0.5 * (hhat + hhat.T)
            hvec = (sn_all - sn[fold]) / ntr
            thetas = np.zeros((centers.shape[0], len(lams)))
            ok = np.ones(len(lams), dtype=bool)
            for j, lam in enumerate(lams):
                try:
                    thetas[:, j] = _solve_spd(hhat + lam * eye, hvec, lam)
                except SingularSystemError:
                    ok[j] = False
            fold_scores = _j_from_values(knu[fn == fold] @ thetas, kde[fd == fold] @ thetas, alpha)
            scores += np.where(ok, fold_scores, np.inf)
        scores /= k
        entries.extend((float(sigma), float(lam), float(v)) for lam, v in zip(lams, scores))
    entries = tuple(entries)
    return CvReport(entries, select_pair(entries))


def fit_fixed(
    numerator,
    denominator,
    sigma: float,
    lam: float,
    alpha: float,
    centers: Optional[np.ndarray] = None,
    max_centers: int = 100,
    seed: int = 0,
    cv: Optional[CvReport] = None,
) -> RulsifModel:
    """Fit theta at a given (sigma, lambda) without model selection."""
    xn = as_samples(numerator, "numerator")
    xd = as_samples(denominator, "denominator")
    check_same_dim(xn, xd, "numerator and denominator")
    if centers is None:
        centers = select_centers(xn, max_centers, seed)
    spec = KernelSpec(sigma, centers)
    knu = kernel_matrix(xn, spec)
    kde = kernel_matrix(xd, spec)
    theta = solve_theta(_hhat(knu, kde, alpha), knu.mean(axis=0), lam)
    return RulsifModel(spec.centers, float(sigma), float(alpha), float(lam), theta, seed, cv)


def fit(numerator, denominator, config: RulsifConfig = RulsifConfig()) -> RulsifModel:
    """Select (sigma, lambda) by cross-validation, then refit on all samples."""
    xn = as_samples(numerator, "numerator")
    xd = as_samples(denominator, "denominator")
    check_same_dim(xn, xd, "numerator and denominator")
    centers = select_centers(xn, config.max_centers, config.seed)
    report = cross_validate(xn, xd, config, centers=centers)
    sigma, lam = report.selected
    return fit_fixed(xn, xd, sigma, lam, config.alpha, centers=centers, seed=config.seed, cv=report)
