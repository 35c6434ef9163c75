"""Classification metrics for thresholded regression scores.

Ground truth is positive for any label > 0; a score is called positive
when it is strictly above the threshold.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.stats import rankdata

from errors import DataShapeError


@dataclass(frozen=True)
class BinaryMetrics:
    tp: int
    tn: int
    fp: int
    fn: int
    auc: float | None = None
    roc_points: tuple[tuple[float, float], ...] = field(default=())

    @property
    def sensitivity(self) -> float | None:
        """TP / (TP + FN); None without positives."""
        positives = self.tp + self.fn
        return self.tp / positives if positives else None

    @property
    def specificity(self) -> float | None:
        negatives = self.tn + self.fp
        return self.tn / negatives if negatives else None


def _as_arrays(scores: Sequence[float], labels: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    scores = np.asarray(scores, dtype=float).ravel()
    labels = np.asarray(labels, dtype=float).ravel()
    if scores.shape != labels.shape:
        raise DataShapeError(f"{scores.size} scores for {labels.size} labels")
    return scores, labels > 0


def auc_rank(scores: Sequence[float], labels: Sequence[float]) -> float | None:
    """Mann-Whitney AUC with half credit for ties; None if a class is missing."""
    scores, positive = _as_arrays(scores, labels)
    n_pos = int(positive.sum())
    n_neg = positive.size - n_pos
    if n_pos == 0 or n_neg == 0:
        return None
    ranks = rankdata(scores)
    u = ranks[positive].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


def roc_curve(scores: Sequence[float], labels: Sequence[float]) -> tuple[tuple[float, float], ...]:
    """(1 - SP, SE) for every threshold between observed scores, (0, 0) to (1, 1)."""
    scores, positive = _as_arrays(scores, labels)
    n_pos = int(positive.sum())
    n_neg = positive.size - n_pos
    if n_pos == 0 or n_neg == 0:
        return ()
    points = [(0.0, 0.0)]
    for cut in np.unique(scores)[::-1]:
        called = scores >= cut
        points.append(
            (float((called & ~positive).sum() / n_neg), float((called & positive).sum() / n_pos))
        )
    return tuple(points)


def binary_metrics(scores: Sequence[float], labels: Sequence[float], threshold: float = 0.5) -> BinaryMetrics:
    scores, positive = _as_arrays(scores, labels)
    called = scores > threshold
    return BinaryMetrics(
        tp=int((called & positive).sum()),
        tn=int((~called & ~positive).sum()),
        fp=int((called & ~positive).sum()),
        fn=int((~called & positive).sum()),
        auc=auc_rank(scores, positive),
        roc_points=roc_curve(scores, positive),
    )
