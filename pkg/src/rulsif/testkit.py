"""Slow, independent oracles and tolerance bands for the test-suite.

Nothing here reuses the numerical code it is meant to check: the minimiser is
plain gradient descent, the AUC is an exhaustive pair count, and the
divergence integral uses a fixed composite Gauss-Legendre rule instead of
adaptive quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class NonConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class ToleranceBand:
    center: float
    abs_tol: float
    description: str = ""

    def __post_init__(self):
        if not self.abs_tol >= 0:
            raise ValueError("abs_tol must be non-negative")

    @property
    def low(self) -> float:
        return self.center - self.abs_tol

    @property
    def high(self) -> float:
        return self.center + self.abs_tol

    def __contains__(self, value: float) -> bool:
        return self.low <= value <= self.high

    def __str__(self):
        return f"{self.center:.6g} +/- {self.abs_tol:.3g} ({self.description})"


def binomial_band(p: float, trials: int, k: float = 3.0, description: str = "") -> ToleranceBand:
    """k-sigma band for an observed proportion under Binomial(trials, p)."""
    sd = math.sqrt(p * (1.0 - p) / trials)
    return ToleranceBand(p, k * sd, description or f"binomial {k:g} sigma, n={trials}")


def clt_band(mean: float, sd: float, count: int, k: float = 4.0, description: str = "") -> ToleranceBand:
    return ToleranceBand(mean, k * sd / math.sqrt(count), description or f"CLT {k:g} sigma, n={count}")


def objective(hhat, hvec, lam, theta) -> float:
    return 0.5 * theta @ hhat @ theta - hvec @ theta + 0.5 * lam * theta @ theta


def descent_minimize_objective(hhat, hvec, lam: float, iters: int = 200_000, step: float | None = None,
                               tol: float = 1e-13) -> np.ndarray:
    """Minimise 1/2 t'Ht - h't + lam/2 t't by fixed-step gradient descent.

    The default step is ``1 / (trace(H) + lam)``, which never exceeds the
    inverse Lipschitz constant for a PSD ``H``. Stops when the gradient's
    max-norm drops below ``tol``; raises :class:`NonConvergenceError` if it
    never does.
    """
    hhat = np.asarray(hhat, dtype=float)
    hvec = np.asarray(hvec, dtype=float)
    if hvec.shape[0] > 10:
        raise ValueError("descent oracle is meant for tiny systems (b <= 10)")
    if step is None:
        step = 1.0 / (float(np.trace(hhat)) + lam)
    theta = np.zeros_like(hvec)
    for _ in range(int(iters)):
        grad = hhat @ theta - hvec + lam * theta
        if np.max(np.abs(grad)) < tol:
            return theta
        theta = theta - step * grad
    raise NonConvergenceError(f"gradient descent did not converge in {iters} iterations")


def brute_force_auc(scores, labels) -> float:
    """Count inlier/outlier pairs where the inlier scores higher; ties count 1/2."""
    scores = [float(s) for s in scores]
    labels = [bool(v) for v in labels]
    inl = [s for s, out in zip(scores, labels) if not out]
    outl = [s for s, out in zip(scores, labels) if out]
    if not inl or not outl:
        raise ValueError("need both inliers and outliers")
    total = 0.0
    for a in inl:
        for b in outl:
            if a > b:
                total += 1.0
            elif a == b:
                total += 0.5
    return total / (len(inl) * len(outl))


def _normal_pdf(x, mean, var):
    return np.exp(-0.5 * (x - mean) ** 2 / var) / np.sqrt(2.0 * np.pi * var)


def _mixture_pdf(spec, x):
    out = np.zeros_like(x)
    for w, m, v in zip(spec.weights, spec.means[:, 0], spec.variances[:, 0]):
        out += w * _normal_pdf(x, m, v)
    return out


def quadrature_pe(p_spec, p_prime_spec, alpha: float, panels: int = 4000, order: int = 8,
                  lo: float = -30.0, hi: float = 30.0) -> float:
    """1/2 int (p - q)^2 / q dx on [lo, hi] with composite Gauss-Legendre."""
    nodes, wts = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(lo, hi, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    x = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
    w = (half[:, None] * wts[None, :]).ravel()
    p = _mixture_pdf(p_spec, x)
    q = alpha * p + (1.0 - alpha) * _mixture_pdf(p_prime_spec, x)
    keep = q > 0
    return float(np.sum(w[keep] * 0.5 * (p[keep] - q[keep]) ** 2 / q[keep]))
