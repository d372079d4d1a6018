"""Coarse-grained group reallocation.

An equal initial partition is rescored group-by-group (representative token
vs. pooled query, redundancy vs. the other groups), the gains pass through a
max-subtracted softmax of their negatives, and the resulting shares are
turned into integer group sizes by largest-remainder apportionment so the
sizes always sum exactly to the token budget.
"""

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import core, kernels
from .core import GainRecord
from .errors import (
    EmptySegmentError,
    InfeasibleBudgetError,
    ValidationError,
)

SCOPE_REPRESENTATIVES = "representatives"
SCOPE_ALL_TOKENS = "all_tokens"


@dataclass(frozen=True)
class CompressionConfig:
    """Compression constraint r, redundancy scope, and minimum group size."""

    rate: int
    redundancy_scope: str = SCOPE_REPRESENTATIVES
    min_group_size: int = 1

    def __post_init__(self):
        if self.rate < 1:
            raise ValidationError(f"rate must be >= 1, got {self.rate}")
        if self.min_group_size < 1:
            raise ValidationError(
                f"min_group_size must be >= 1, got {self.min_group_size}"
            )
        if self.redundancy_scope not in (SCOPE_REPRESENTATIVES, SCOPE_ALL_TOKENS):
            raise ValidationError(
                f"unknown redundancy_scope {self.redundancy_scope!r}"
            )


@dataclass(frozen=True)
class GroupPartition:
    """Ordered contiguous segmentation; sizes sum to the covered length."""

    sizes: Tuple[int, ...]

    def __post_init__(self):
        if not self.sizes:
            raise EmptySegmentError("partition needs at least one group")
        if any(s < 1 for s in self.sizes):
            raise ValidationError(f"group sizes must be positive: {self.sizes}")
        object.__setattr__(self, "sizes", tuple(int(s) for s in self.sizes))

    @property
    def m(self) -> int:
        return len(self.sizes)

    @property
    def total(self) -> int:
        return sum(self.sizes)

    @property
    def offsets(self) -> Tuple[int, ...]:
        out = [0]
        for s in self.sizes:
            out.append(out[-1] + s)
        return tuple(out)

    def bounds(self, i: int) -> Tuple[int, int]:
        off = self.offsets
        return off[i], off[i + 1]


def initial_partition(L_org: int, cfg: CompressionConfig) -> GroupPartition:
    """Equal-length contiguous groups; m = max(1, floor(L_org / rate))."""
    if L_org < 1:
        raise EmptySegmentError(f"context length must be >= 1, got {L_org}")
    m = max(1, L_org // cfg.rate)
    base, rem = divmod(L_org, m)
    sizes = [base + 1] * rem + [base] * (m - rem)
    return GroupPartition(tuple(sizes))


def group_gains(
    H,
    part: GroupPartition,
    qbar,
    cfg: CompressionConfig,
) -> List[GainRecord]:
    """Per-group gain of each group's representative token.

    Record ``index`` is the group index.  With the default scope the
    comparison set is the other groups' representatives and ``argmax_peer``
    is a peer group index; with ``all_tokens`` it is every token outside the
    group and ``argmax_peer`` is a global token index.
    """
    rows = core.as_rows(H)
    if part.total != rows.shape[0]:
        raise ValidationError(
            f"partition covers {part.total} tokens but matrix has {rows.shape[0]}"
        )
    reps = [
        core.representative(rows, qbar, start, stop)
        for start, stop in (part.bounds(i) for i in range(part.m))
    ]
    rep_rows = rows[reps]
    if cfg.redundancy_scope == SCOPE_REPRESENTATIVES:
        comparison = [
            [j for j in range(part.m) if j != i] for i in range(part.m)
        ]
        return core.mig_scores(rep_rows, qbar, comparison)
    records = []
    qv = np.ascontiguousarray(qbar, dtype=np.float64).ravel()
    relevance = kernels.row_cosines(rep_rows, qv)
    for i in range(part.m):
        start, stop = part.bounds(i)
        peers = np.concatenate(
            [
                np.arange(0, start, dtype=np.int64),
                np.arange(stop, rows.shape[0], dtype=np.int64),
            ]
        )
        red, arg = kernels.max_cosine_vs(rows, peers, rows[reps[i]])
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


def allocation_weights(gains: Sequence[float]) -> np.ndarray:
    """Max-subtracted softmax of the negated gains; sums to 1 within 1e-12."""
    g = np.asarray(gains, dtype=np.float64)
    if g.size == 0:
        raise EmptySegmentError("no gains given")
    if not np.all(np.isfinite(g)):
        raise ValidationError("gains must be finite")
    z = -g
    z = z - z.max()
    w = np.exp(z)
    return w / w.sum()


def largest_remainder(shares: Sequence[float], budget: int) -> List[int]:
    """Integer apportionment of ``budget`` by fractional shares.

    Floors every quota, then hands the leftover units to the largest
    remainders (ties to the lowest index).  The result sums to ``budget``.
    """
    quotas = [budget * s for s in shares]
    sizes = [math.floor(q) for q in quotas]
    leftover = budget - sum(sizes)
    order = sorted(
        range(len(shares)), key=lambda i: (-(quotas[i] - sizes[i]), i)
    )
    for i in order[:leftover]:
        sizes[i] += 1
    return sizes


def allocate_sizes(
    gains: Sequence[float], budget: int, cfg: CompressionConfig
) -> GroupPartition:
    """Turn gains into integer group sizes summing exactly to ``budget``.

    Sizes below ``min_group_size`` are raised to it, taking the deficit from
    the largest groups (largest first, ties to the lowest index).
    """
    weights = allocation_weights(gains)
    m = weights.size
    if budget < m * cfg.min_group_size:
        raise InfeasibleBudgetError(
            f"budget {budget} cannot give {m} groups size >= {cfg.min_group_size}"
        )
    sizes = largest_remainder(weights.tolist(), budget)
    deficit = 0
    for i, s in enumerate(sizes):
        if s < cfg.min_group_size:
            deficit += cfg.min_group_size - s
            sizes[i] = cfg.min_group_size
    while deficit > 0:
        donor = min(
            (i for i in range(m) if sizes[i] > cfg.min_group_size),
            key=lambda i: (-sizes[i], i),
        )
        sizes[donor] -= 1
        deficit -= 1
    return GroupPartition(tuple(sizes))


@dataclass(frozen=True)
class ReallocationResult:
    before: GroupPartition
    after: GroupPartition
    gains: Tuple[GainRecord, ...]
    weights: Tuple[float, ...] = field(default=())

    def trace(self) -> dict:
        return {
            "gains": core.records_to_json(self.gains),
            "weights": list(self.weights),
            "sizes_before": list(self.before.sizes),
            "sizes_after": list(self.after.sizes),
        }


def reallocate(H, qbar, cfg: CompressionConfig) -> ReallocationResult:
    """initial_partition -> group_gains -> allocate_sizes on one matrix."""
    rows = core.as_rows(H)
    before = initial_partition(rows.shape[0], cfg)
    gains = group_gains(rows, before, qbar, cfg)
    gvals = [r.gain for r in gains]
    after = allocate_sizes(gvals, rows.shape[0], cfg)
    return ReallocationResult(
        before=before,
        after=after,
        gains=tuple(gains),
        weights=tuple(float(x) for x in allocation_weights(gvals)),
    )
