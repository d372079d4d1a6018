"""Scoring core: cosine similarity, query pooling, gain records, representatives.

The gain of a token is its cosine relevance to the pooled query minus its
maximum cosine similarity to a caller-chosen comparison set (0 when that set
is empty).  The comparison set is a parameter because the same score is
reused at three scopes: whole sequence, peer representatives, within-group.
"""

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .embio import EmbeddingMatrix
from .errors import (
    EmptyQueryError,
    EmptySegmentError,
    SelfComparisonError,
    ShapeError,
)


@dataclass(frozen=True)
class GainRecord:
    """Relevance/redundancy/gain for one unit, with the maximizing peer."""

    index: int
    relevance: float
    redundancy: float
    gain: float
    argmax_peer: Optional[int]

    def to_dict(self):
        return {
            "index": self.index,
            "relevance": self.relevance,
            "redundancy": self.redundancy,
            "gain": self.gain,
            "argmax_peer": self.argmax_peer,
        }


def as_rows(x) -> np.ndarray:
    """Accept an EmbeddingMatrix or array-like and return a float64 matrix."""
    if isinstance(x, EmbeddingMatrix):
        x = x.data
    arr = np.ascontiguousarray(x, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    return arr


def cosine(u, v) -> float:
    """cos(u, v), 0 if either norm is 0, clamped to [-1, 1]."""
    u = np.ascontiguousarray(u, dtype=np.float64).reshape(1, -1)
    v = np.ascontiguousarray(v, dtype=np.float64).ravel()
    return float(kernels.row_cosines(u, v)[0])


def pool_query(Q) -> np.ndarray:
    """Arithmetic mean of query rows, summed left-to-right in row order."""
    rows = as_rows(Q)
    if rows.shape[0] == 0:
        raise EmptyQueryError("query has no rows")
    return kernels.mean_rows(rows)


def mig_scores(X, qbar, comparison: Sequence[Sequence[int]]):
    """Gain records for every row of X against per-index peer sets.

    ``comparison[i]`` lists the peer row indices for row i; it must not
    contain i itself.  Redundancy is the max cosine over the peers (0 for an
    empty set), argmax ties break to the lowest peer index.
    """
    rows = as_rows(X)
    qbar = np.ascontiguousarray(qbar, dtype=np.float64).ravel()
    n = rows.shape[0]
    if len(comparison) != n:
        raise ShapeError(f"{len(comparison)} peer sets given for {n} rows")
    relevance = kernels.row_cosines(rows, qbar)
    records = []
    for i in range(n):
        peers = np.asarray(sorted(comparison[i]), dtype=np.int64)
        if peers.size and ((peers < 0).any() or (peers >= n).any()):
            raise SelfComparisonError(f"peer set for index {i} is out of range")
        if peers.size and (peers == i).any():
            raise SelfComparisonError(f"peer set for index {i} contains itself")
        red, arg = kernels.max_cosine_vs(rows, peers, rows[i])
        records.append(
            GainRecord(
                index=i,
                relevance=float(relevance[i]),
                redundancy=float(red),
                gain=float(relevance[i]) - float(red),
                argmax_peer=None if arg < 0 else int(arg),
            )
        )
    return records


def representative(X, qbar, start: int = 0, stop: Optional[int] = None) -> int:
    """Global index of the row in X[start:stop] most cosine-similar to qbar.

    Ties break to the lowest index.
    """
    rows = as_rows(X)
    if stop is None:
        stop = rows.shape[0]
    if not 0 <= start < stop <= rows.shape[0]:
        raise EmptySegmentError(f"empty or invalid segment [{start}, {stop})")
    qbar = np.ascontiguousarray(qbar, dtype=np.float64).ravel()
    idx = np.arange(start, stop, dtype=np.int64)
    _, arg = kernels.max_cosine_vs(rows, idx, qbar)
    return int(arg)


def records_to_json(records) -> list:
    return [r.to_dict() for r in records]
