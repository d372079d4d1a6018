"""Fine-grained token merging and the end-to-end compression pipeline.

Each group collapses to one output token: a softmax-of-gain weighted convex
combination of its rows, where a token's gain compares it against the other
tokens of the same group.  Outputs concatenate in group order.
"""

from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from . import core, kernels
from .core import GainRecord
from .embio import ROLE_COMPRESSED, EmbeddingMatrix
from .errors import EmptySegmentError, ShapeError, ValidationError
from .realloc import CompressionConfig, reallocate


def intra_group_gains(X, qbar, start: int = 0, stop=None) -> List[GainRecord]:
    """Gain of each token in X[start:stop] vs. the rest of the same slice.

    Record indices are global row indices of X; a singleton slice gets
    redundancy 0.
    """
    rows = core.as_rows(X)
    if stop is None:
        stop = rows.shape[0]
    if not 0 <= start < stop <= rows.shape[0]:
        raise EmptySegmentError(f"empty or invalid group [{start}, {stop})")
    local = core.mig_scores(
        rows[start:stop],
        qbar,
        [[j for j in range(stop - start) if j != i] for i in range(stop - start)],
    )
    return [
        GainRecord(
            index=r.index + start,
            relevance=r.relevance,
            redundancy=r.redundancy,
            gain=r.gain,
            argmax_peer=None if r.argmax_peer is None else r.argmax_peer + start,
        )
        for r in local
    ]


def merge_weights(gains: Sequence[float]) -> np.ndarray:
    """Max-subtracted softmax of the gains; strictly positive, sums to 1."""
    g = np.asarray(gains, dtype=np.float64)
    if g.size == 0:
        raise EmptySegmentError("cannot merge an empty group")
    if not np.all(np.isfinite(g)):
        raise ValidationError("gains must be finite")
    z = g - g.max()
    w = np.exp(z)
    return w / w.sum()


def merge_group(group, gains: Sequence[float]) -> np.ndarray:
    """Softmax-of-gain weighted sum of the group rows, left-to-right."""
    rows = core.as_rows(group)
    w = merge_weights(gains)
    if w.size != rows.shape[0]:
        raise ShapeError(f"{w.size} gains for {rows.shape[0]} rows")
    return kernels.weighted_rowsum(rows, w)


@dataclass(frozen=True)
class CompressedContext:
    """m merged tokens plus the full compression trace."""

    tokens: np.ndarray  # m×d float32
    trace: dict

    def to_matrix(self) -> EmbeddingMatrix:
        return EmbeddingMatrix(role=ROLE_COMPRESSED, data=self.tokens)


def compress(H, Q, cfg: CompressionConfig) -> CompressedContext:
    """Full pipeline: pool query, reallocate groups, merge each group.

    Deterministic: identical inputs yield bit-identical tokens.  Query tokens
    are never merged; the output holds context tokens only.
    """
    rows = core.as_rows(H)
    qrows = core.as_rows(Q)
    if rows.shape[0] == 0:
        raise EmptySegmentError("context has no rows")
    if rows.shape[1] != qrows.shape[1]:
        raise ShapeError(
            f"context dim {rows.shape[1]} != query dim {qrows.shape[1]}"
        )
    qbar = core.pool_query(qrows)
    result = reallocate(rows, qbar, cfg)
    part = result.after
    merged = np.empty((part.m, rows.shape[1]), dtype=np.float64)
    group_traces = []
    for i in range(part.m):
        start, stop = part.bounds(i)
        records = intra_group_gains(rows, qbar, start, stop)
        gvals = [r.gain for r in records]
        merged[i] = merge_group(rows[start:stop], gvals)
        group_traces.append(
            {
                "start": start,
                "stop": stop,
                "token_gains": core.records_to_json(records),
                "merge_weights": [float(w) for w in merge_weights(gvals)],
            }
        )
    trace = result.trace()
    trace["groups"] = group_traces
    return CompressedContext(tokens=merged.astype(np.float32), trace=trace)
