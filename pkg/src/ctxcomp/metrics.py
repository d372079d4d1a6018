"""Diagnostics: AUC over labeled scores, redundancy score, top-k retention."""

import math
from typing import List, Sequence

import numpy as np

from . import core, kernels
from .errors import DegenerateLabelsError, ShapeError, ValidationError


def auc(scores: Sequence[float], labels: Sequence[int]) -> float:
    """Mann-Whitney AUC: P(positive outscores negative), ties credited 0.5.

    Computed via average ranks, O(n log n); equivalent to enumerating all
    (positive, negative) pairs.
    """
    s = np.asarray(scores, dtype=np.float64)
    y = np.asarray(labels)
    if s.shape != y.shape or s.ndim != 1:
        raise ShapeError("scores and labels must be parallel 1-D sequences")
    if not np.all(np.isfinite(s)):
        raise ValidationError("scores must be finite")
    if not np.isin(y, (0, 1)).all():
        raise ValidationError("labels must be 0 or 1")
    n_pos = int(y.sum())
    n_neg = y.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise DegenerateLabelsError("need at least one positive and one negative")
    order = np.argsort(s, kind="stable")
    ranks = np.empty(s.size, dtype=np.float64)
    sorted_s = s[order]
    i = 0
    while i < s.size:
        j = i
        while j + 1 < s.size and sorted_s[j + 1] == sorted_s[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0  # average 1-based rank
        i = j + 1
    rank_sum_pos = ranks[y == 1].sum()
    u = rank_sum_pos - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


def redundancy_score(E) -> float:
    """Average pairwise cosine over ordered pairs; 0 for at most one row."""
    rows = core.as_rows(E)
    k = rows.shape[0]
    if k <= 1:
        return 0.0
    return float(kernels.pairwise_cosine_sum(rows) / (k * (k - 1)))


def retention_select(scores: Sequence[float], ratio: float) -> List[int]:
    """Ascending indices of the top ceil(ratio*n) scores, ties to lowest index."""
    s = list(map(float, scores))
    if not s:
        raise ValidationError("scores must be non-empty")
    if not 0.0 < ratio <= 1.0:
        raise ValidationError(f"ratio must be in (0, 1], got {ratio}")
    k = math.ceil(ratio * len(s))
    picked = sorted(range(len(s)), key=lambda i: (-s[i], i))[:k]
    return sorted(picked)
