"""Relative density-ratio estimation (RuLSIF) and its applications."""

from .divergence import DivergenceEstimate, estimate, pe_hat, pe_tilde, true_pe_oracle
from .errors import (
    DataError,
    DegenerateGeometryError,
    DimensionMismatchError,
    NumericalError,
    RulsifError,
    SingularSystemError,
)
from .estimator import CvReport, RulsifConfig, RulsifModel, cross_validate, fit, fit_fixed, solve_theta
from .homogeneity import TestConfig, TestOutcome, lstt, permutation_pvalue
from .kernel import KernelSpec, gaussian_kernel, kernel_matrix, median_pairwise_distance
from .outlier import ScoredSet, auc, outlier_scores

__version__ = "0.1.0"

__all__ = [
    "CvReport",
    "DataError",
    "DegenerateGeometryError",
    "DimensionMismatchError",
    "DivergenceEstimate",
    "KernelSpec",
    "NumericalError",
    "RulsifConfig",
    "RulsifError",
    "RulsifModel",
    "ScoredSet",
    "SingularSystemError",
    "TestConfig",
    "TestOutcome",
    "auc",
    "cross_validate",
    "estimate",
    "fit",
    "fit_fixed",
    "gaussian_kernel",
    "kernel_matrix",
    "lstt",
    "median_pairwise_distance",
    "outlier_scores",
    "pe_hat",
    "pe_tilde",
    "permutation_pvalue",
    "solve_theta",
    "true_pe_oracle",
]
