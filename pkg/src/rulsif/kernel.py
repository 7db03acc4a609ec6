"""Gaussian kernel evaluation, distance statistics and center selection.

Sample sets are plain ``numpy`` arrays of shape ``(n, d)``; :func:`as_samples`
normalises user input (lists, 1-D arrays) into that form and validates it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist

from ._random import CENTERS, rng_for
from .errors import DataError, DegenerateGeometryError, DimensionMismatchError


def as_samples(data, name: str = "samples") -> np.ndarray:
    """Return ``data`` as a finite float array of shape ``(n, d)``.

    A 1-D input is read as ``n`` one-dimensional points.
    """
    arr = np.asarray(data, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise DataError(f"{name} must be a 2-D array of shape (n, d), got ndim={arr.ndim}")
    if arr.shape[0] == 0:
        raise DataError(f"{name} is empty")
    if arr.shape[1] == 0:
        raise DataError(f"{name} has zero features")
    if not np.all(np.isfinite(arr)):
        raise DataError(f"{name} contains non-finite values")
    return arr


def check_same_dim(a: np.ndarray, b: np.ndarray, what: str = "inputs") -> None:
    if a.shape[1] != b.shape[1]:
        raise DimensionMismatchError(
            f"{what} have different dimensionality ({a.shape[1]} vs {b.shape[1]})"
        )


def _check_sigma(sigma: float) -> float:
    sigma = float(sigma)
    if not (sigma > 0 and np.isfinite(sigma)):
        raise ValueError(f"kernel width must be positive and finite, got {sigma}")
    return sigma


@dataclass(frozen=True)
class KernelSpec:
    """Gaussian basis: a width and the centers the basis functions sit on."""

    width: float
    centers: np.ndarray

    def __post_init__(self):
        _check_sigma(self.width)
        object.__setattr__(self, "centers", as_samples(self.centers, "centers"))

    @property
    def dim(self) -> int:
        return self.centers.shape[1]

    def __len__(self) -> int:
        return self.centers.shape[0]


def gaussian_kernel(x, c, sigma: float) -> float:
    """exp(-||x - c||^2 / (2 sigma^2)) for two single vectors."""
    sigma = _check_sigma(sigma)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    c = np.atleast_1d(np.asarray(c, dtype=float))
    if x.shape != c.shape or x.ndim != 1:
        raise DimensionMismatchError(f"vectors have shapes {x.shape} and {c.shape}")
    diff = x - c
    return float(np.exp(-np.dot(diff, diff) / (2.0 * sigma * sigma)))


def squared_distances(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Pairwise squared Euclidean distances, shape ``(len(a), len(b))``.

    Computed from explicit differences rather than the ``|a|^2 + |b|^2 - 2ab``
    expansion: exact zeros stay zero and no negative round-off appears.
    """
    diff = a[:, None, :] - b[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def kernel_matrix(points, spec: KernelSpec) -> np.ndarray:
    """Matrix of K(points[i], centers[l]), shape ``(len(points), len(centers))``."""
    points = as_samples(points, "points")
    check_same_dim(points, spec.centers, "points and centers")
    return gaussian_from_sqdist(squared_distances(points, spec.centers), spec.width)


def gaussian_from_sqdist(sqdist: np.ndarray, sigma: float) -> np.ndarray:
    return np.exp(sqdist * (-0.5 / (sigma * sigma)))


def median_pairwise_distance(points) -> float:
    """Median of the n(n-1)/2 pairwise Euclidean distances."""
    points = as_samples(points, "points")
    n = points.shape[0]
    if n < 2:
        raise DataError("median pairwise distance needs at least two points")
    med = float(np.median(pdist(points)))
    if med <= 0.0:
        raise DegenerateGeometryError(
            "median pairwise distance is zero (points are identical or nearly so)"
        )
    return med


def select_center_indices(n: int, max_centers: int, seed: int) -> np.ndarray:
    if max_centers < 1:
        raise ValueError(f"max_centers must be >= 1, got {max_centers}")
    if n < 1:
        raise DataError("cannot select centers from an empty set")
    if n <= max_centers:
        return np.arange(n)
    return np.sort(rng_for(seed, CENTERS).choice(n, size=max_centers, replace=False))


def select_centers(numerator, max_centers: int = 100, seed: int = 0) -> np.ndarray:
    """Kernel centers drawn from the numerator samples.

    Returns all samples in their original order when there are at most
    ``max_centers`` of them, otherwise a seeded uniform subset without
    replacement (kept in ascending index order).
    """
    numerator = as_samples(numerator, "numerator")
    return numerator[select_center_indices(numerator.shape[0], max_centers, seed)]
