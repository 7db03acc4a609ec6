"""Inlier-based outlier scoring.

The clean model set plays the numerator and the evaluation set the
denominator, so points of the evaluation set that the model set does not
explain get ratio values near zero. Lower score means more outlying.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.stats import rankdata

from .errors import DataError
from .estimator import RulsifConfig, RulsifModel, fit
from .kernel import as_samples, check_same_dim


@dataclass(frozen=True)
class ScoredSet:
    scores: np.ndarray
    labels: Optional[np.ndarray] = None  # True marks an outlier
    model: Optional[RulsifModel] = None

    def __post_init__(self):
        scores = np.asarray(self.scores, dtype=float).ravel()
        if not np.all(np.isfinite(scores)):
            raise DataError("scores contain non-finite values")
        object.__setattr__(self, "scores", scores)
        if self.labels is not None:
            labels = np.asarray(self.labels).ravel().astype(bool)
            if labels.shape != scores.shape:
                raise DataError(f"{labels.shape[0]} labels for {scores.shape[0]} scores")
            object.__setattr__(self, "labels", labels)

    def __len__(self) -> int:
        return self.scores.shape[0]


def outlier_scores(model_set, evaluation_set, config: RulsifConfig = RulsifConfig(), labels=None) -> ScoredSet:
    """Fit the ratio model-set / evaluation-set and score the evaluation points.

    Negative fitted values are kept; they rank as the most outlying.
    """
    xm = as_samples(model_set, "model set")
    xe = as_samples(evaluation_set, "evaluation set")
    check_same_dim(xm, xe, "model and evaluation sets")
    model = fit(xm, xe, config)
    return ScoredSet(model(xe), labels, model)


def auc(scored: ScoredSet) -> float:
    """Probability that an inlier outscores an outlier, ties counting one half.

    Computed from midranks (Mann-Whitney U), so it is exact for tied scores.
    """
    if scored.labels is None:
        raise DataError("AUC needs outlier labels")
    out = scored.labels
    n_out = int(np.count_nonzero(out))
    n_in = out.shape[0] - n_out
    if n_out == 0 or n_in == 0:
        raise DataError("AUC needs at least one inlier and one outlier")
    ranks = rankdata(scored.scores)  # midranks, exact halves for ties
    u = float(np.sum(ranks[~out])) - n_in * (n_in + 1) / 2.0
    return u / (n_in * n_out)
