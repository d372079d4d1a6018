"""Pure-Python reference kernels.

Every reduction runs left-to-right over ascending indices so results are
reproducible bit-for-bit, and so the compiled backend (plain C double loops
in the same order) produces identical bytes.  Zero-norm vectors get cosine 0
by convention; cosines are clamped to [-1, 1] against rounding overshoot.
"""

import math

import numpy as np

BACKEND = "py"


def _norm(row):
    acc = 0.0
    for x in row:
        acc += x * x
    return math.sqrt(acc)


def _dot(u, v):
    acc = 0.0
    for a, b in zip(u, v):
        acc += a * b
    return acc


def _clamp(c):
    if c > 1.0:
        return 1.0
    if c < -1.0:
        return -1.0
    return c


def row_norms(X):
    rows = X.tolist()
    return np.array([_norm(r) for r in rows], dtype=np.float64)


def row_cosines(X, v):
    rows = X.tolist()
    vl = v.tolist()
    nv = _norm(vl)
    out = np.empty(len(rows), dtype=np.float64)
    for i, r in enumerate(rows):
        nr = _norm(r)
        if nr == 0.0 or nv == 0.0:
            out[i] = 0.0
        else:
            out[i] = _clamp(_dot(r, vl) / (nr * nv))
    return out


def max_cosine_vs(X, idx, v):
    rows = X.tolist()
    vl = v.tolist()
    nv = _norm(vl)
    best = 0.0
    best_idx = -1
    first = True
    for j in idx.tolist():
        r = rows[j]
        nr = _norm(r)
        if nr == 0.0 or nv == 0.0:
            c = 0.0
        else:
            c = _clamp(_dot(r, vl) / (nr * nv))
        if first or c > best:
            best = c
            best_idx = j
            first = False
    if first:
        return 0.0, -1
    return best, best_idx


def weighted_rowsum(X, w):
    rows = X.tolist()
    wl = w.tolist()
    d = X.shape[1]
    acc = [0.0] * d
    for wk, row in zip(wl, rows):
        for k in range(d):
            acc[k] += wk * row[k]
    return np.array(acc, dtype=np.float64)


def mean_rows(X):
    rows = X.tolist()
    n = len(rows)
    d = X.shape[1]
    acc = [0.0] * d
    for row in rows:
        for k in range(d):
            acc[k] += row[k]
    return np.array([a / n for a in acc], dtype=np.float64)


def pairwise_cosine_sum(X):
    rows = X.tolist()
    n = len(rows)
    norms = [_norm(r) for r in rows]
    total = 0.0
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            if norms[i] == 0.0 or norms[j] == 0.0:
                continue
            total += _clamp(_dot(rows[i], rows[j]) / (norms[i] * norms[j]))
    return total
