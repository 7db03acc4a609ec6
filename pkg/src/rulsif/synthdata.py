"""Seeded generators for the synthetic benchmarks and their density oracles.

Normal distributions are written ``N(mean, variance)`` throughout: the second
argument is a VARIANCE, so ``N(0, 0.6)`` has standard deviation ``sqrt(0.6)``
and ``N(1, 0.25)`` has standard deviation 0.5.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ._random import DATA, rng_for
from .errors import DataError, DimensionMismatchError
from .kernel import as_samples


@dataclass(frozen=True)
class GaussianMixtureSpec:
    """Mixture of diagonal Gaussians.

    ``weights`` has shape (k,), ``means`` and ``variances`` shape (k, d).
    """

    weights: np.ndarray
    means: np.ndarray
    variances: np.ndarray

    def __post_init__(self):
        w = np.atleast_1d(np.asarray(self.weights, dtype=float))
        m = np.asarray(self.means, dtype=float)
        v = np.asarray(self.variances, dtype=float)
        if m.ndim == 1:
            m = m[:, None]
        if v.ndim == 1:
            v = v[:, None]
        if w.ndim != 1 or m.shape[0] != w.shape[0] or v.shape != m.shape:
            raise DimensionMismatchError(
                f"inconsistent mixture shapes: weights {w.shape}, means {m.shape}, variances {v.shape}"
            )
        if np.any(w <= 0) or abs(w.sum() - 1.0) > 1e-12:
            raise ValueError("mixture weights must be positive and sum to 1")
        if np.any(~(v > 0)) or not np.all(np.isfinite(v)) or not np.all(np.isfinite(m)):
            raise ValueError("variances must be positive and finite")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "means", m)
        object.__setattr__(self, "variances", v)

    @classmethod
    def normal(cls, mean, variance) -> "GaussianMixtureSpec":
        """Single Gaussian; scalar ``variance`` is broadcast over dimensions."""
        mean = np.atleast_1d(np.asarray(mean, dtype=float))
        var = np.broadcast_to(np.asarray(variance, dtype=float), mean.shape)
        return cls(np.ones(1), mean[None, :], var[None, :].copy())

    @classmethod
    def mixture(cls, parts) -> "GaussianMixtureSpec":
        """Build from ``[(weight, mean, variance), ...]``."""
        ws, ms, vs = [], [], []
        for w, mean, var in parts:
            mean = np.atleast_1d(np.asarray(mean, dtype=float))
            ws.append(float(w))
            ms.append(mean)
            vs.append(np.broadcast_to(np.asarray(var, dtype=float), mean.shape))
        return cls(np.array(ws), np.array(ms), np.array(vs))

    @property
    def dim(self) -> int:
        return self.means.shape[1]

    def __eq__(self, other):
        if not isinstance(other, GaussianMixtureSpec):
            return NotImplemented
        return (
            np.array_equal(self.weights, other.weights)
            and np.array_equal(self.means, other.means)
            and np.array_equal(self.variances, other.variances)
        )

    def __hash__(self):
        return hash((self.weights.tobytes(), self.means.tobytes(), self.variances.tobytes()))


def sample(spec: GaussianMixtureSpec, count: int, seed: int) -> np.ndarray:
    """``count`` i.i.d. draws: pick a component by weight, then a diagonal Gaussian."""
    return _sample_with_labels(spec, count, rng_for(seed, DATA))[0]


def _sample_with_labels(spec: GaussianMixtureSpec, count: int, rng: np.random.Generator):
    count = int(count)
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    comp = rng.choice(spec.weights.shape[0], size=count, p=spec.weights)
    z = rng.standard_normal((count, spec.dim))
    x = spec.means[comp] + z * np.sqrt(spec.variances[comp])
    return x, comp


def density(spec: GaussianMixtureSpec, x) -> np.ndarray:
    """Mixture density at each row of ``x`` (a single vector gives a length-1 array)."""
    x = np.asarray(x, dtype=float)
    if x.ndim == 0:
        x = x.reshape(1, 1)
    elif x.ndim == 1:
        # a bare 1-D array is a batch of scalars for d=1, otherwise one vector
        x = x[:, None] if spec.dim == 1 else x[None, :]
    if x.shape[1] != spec.dim:
        raise DimensionMismatchError(f"points have dim {x.shape[1]}, spec has dim {spec.dim}")
    out = np.zeros(x.shape[0])
    for w, m, v in zip(spec.weights, spec.means, spec.variances):
        quad = np.sum((x - m) ** 2 / v, axis=1)
        norm = np.sqrt(np.prod(2.0 * np.pi * v))
        out += w * np.exp(-0.5 * quad) / norm
    return out


def true_relative_ratio(p: GaussianMixtureSpec, p_prime: GaussianMixtureSpec, alpha: float, x) -> np.ndarray:
    """p(x) / (alpha p(x) + (1 - alpha) p'(x)) from the exact densities."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    px = density(p, x)
    qx = alpha * px + (1.0 - alpha) * density(p_prime, x)
    if np.any(qx <= 0):
        raise ZeroDivisionError("mixture density underflowed to zero")
    return px / qx


STANDARD_NORMAL = GaussianMixtureSpec.normal(0.0, 1.0)

BENCHMARK_DENOMINATORS = {
    "a": GaussianMixtureSpec.normal(0.0, 1.0),
    "b": GaussianMixtureSpec.normal(0.0, 0.6),
    "c": GaussianMixtureSpec.normal(0.0, 2.0),
    "d": GaussianMixtureSpec.normal(0.5, 1.0),
    "e": GaussianMixtureSpec.mixture([(0.95, 0.0, 1.0), (0.05, 3.0, 1.0)]),
}


class BenchmarkDataset(NamedTuple):
    numerator: np.ndarray
    denominator: np.ndarray
    p: GaussianMixtureSpec
    p_prime: GaussianMixtureSpec


def benchmark_specs(tag: str):
    try:
        return STANDARD_NORMAL, BENCHMARK_DENOMINATORS[tag]
    except KeyError:
        raise DataError(f"unknown dataset tag {tag!r}; expected one of a-e") from None


def benchmark_dataset(tag: str, n: int, n_prime: int, seed: int) -> BenchmarkDataset:
    """Numerator N(0, 1) samples against one of the five denominators (a)-(e)."""
    p, pp = benchmark_specs(tag)
    rng = rng_for(seed, DATA)
    xn = _sample_with_labels(p, n, rng)[0]
    xd = _sample_with_labels(pp, n_prime, rng)[0]
    return BenchmarkDataset(xn, xd, p, pp)


def outlier_specs(d: int):
    """Inlier model N(0, I_d) and the 5% contaminated evaluation mixture.

    The outlier mean is 3 d^{-1/2} 1_d, i.e. at Euclidean distance 3 from the origin.
    """
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    p = GaussianMixtureSpec.normal(np.zeros(d), 1.0)
    pp = GaussianMixtureSpec.mixture(
        [(0.95, np.zeros(d), 1.0), (0.05, np.full(d, 3.0 / np.sqrt(d)), 1.0)]
    )
    return p, pp


def outlier_dataset(d: int, n: int, n_prime: int, seed: int):
    """Return ``(model_set, evaluation_set, labels)``; ``labels`` is True for outliers."""
    p, pp = outlier_specs(d)
    rng = rng_for(seed, DATA)
    model = _sample_with_labels(p, n, rng)[0]
    evaluation, comp = _sample_with_labels(pp, n_prime, rng)
    return model, evaluation, comp == 1


@dataclass(frozen=True)
class LabeledSet:
    inputs: np.ndarray
    targets: np.ndarray

    def __post_init__(self):
        x = as_samples(self.inputs, "inputs")
        y = np.asarray(self.targets, dtype=float).ravel()
        if y.shape[0] != x.shape[0]:
            raise DataError(f"{x.shape[0]} inputs but {y.shape[0]} targets")
        if not np.all(np.isfinite(y)):
            raise DataError("targets contain non-finite values")
        object.__setattr__(self, "inputs", x)
        object.__setattr__(self, "targets", y)

    def __len__(self) -> int:
        return self.inputs.shape[0]


SINC_NOISE_VARIANCE = 0.01
SINC_SCENARIOS = {
    "no-shift": (GaussianMixtureSpec.normal(1.0, 0.25), GaussianMixtureSpec.normal(1.0, 0.25)),
    "shift": (GaussianMixtureSpec.normal(1.0, 0.25), GaussianMixtureSpec.normal(2.0, 0.1)),
}


def sinc(x) -> np.ndarray:
    """Normalised sinc, sin(pi x) / (pi x) with sinc(0) = 1."""
    return np.sinc(np.asarray(x, dtype=float))


def sinc_dataset(scenario: str, n_tr: int, n_te: int, seed: int):
    """Train and test sets with targets sinc(x) + N(0, 0.01) noise."""
    try:
        p_tr, p_te = SINC_SCENARIOS[scenario]
    except KeyError:
        raise DataError(f"unknown scenario {scenario!r}; expected 'no-shift' or 'shift'") from None
    rng = rng_for(seed, DATA)
    sd = np.sqrt(SINC_NOISE_VARIANCE)
    x_tr = _sample_with_labels(p_tr, n_tr, rng)[0]
    x_te = _sample_with_labels(p_te, n_te, rng)[0]
    y_tr = sinc(x_tr[:, 0]) + sd * rng.standard_normal(x_tr.shape[0])
    y_te = sinc(x_te[:, 0]) + sd * rng.standard_normal(x_te.shape[0])
    return LabeledSet(x_tr, y_tr), LabeledSet(x_te, y_te)
