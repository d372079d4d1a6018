# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels, semantically identical to ``_ops_py``.

Loops accumulate left-to-right in C doubles, which matches CPython float
arithmetic operation-for-operation, so both backends return identical bytes.
"""

from libc.math cimport sqrt

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND = "cy"


cdef inline double _norm(const double[:] row) noexcept nogil:
    cdef double acc = 0.0
    cdef Py_ssize_t k
    for k in range(row.shape[0]):
        acc += row[k] * row[k]
    return sqrt(acc)


cdef inline double _dot(const double[:] u, const double[:] v) noexcept nogil:
    cdef double acc = 0.0
    cdef Py_ssize_t k
    for k in range(u.shape[0]):
        acc += u[k] * v[k]
    return acc


cdef inline double _clamp(double c) noexcept nogil:
    if c > 1.0:
        return 1.0
    if c < -1.0:
        return -1.0
    return c


def row_norms(const double[:, :] X):
    cdef Py_ssize_t n = X.shape[0]
    out = np.empty(n, dtype=np.float64)
    cdef double[:] o = out
    cdef Py_ssize_t i
    for i in range(n):
        o[i] = _norm(X[i])
    return out


def row_cosines(const double[:, :] X, const double[:] v):
    cdef Py_ssize_t n = X.shape[0]
    cdef double nv = _norm(v)
    out = np.empty(n, dtype=np.float64)
    cdef double[:] o = out
    cdef double nr
    cdef Py_ssize_t i
    for i in range(n):
        nr = _norm(X[i])
        if nr == 0.0 or nv == 0.0:
            o[i] = 0.0
        else:
            o[i] = _clamp(_dot(X[i], v) / (nr * nv))
    return out


def max_cosine_vs(const double[:, :] X, const long long[:] idx, const double[:] v):
    cdef double nv = _norm(v)
    cdef double best = 0.0
    cdef double c, nr
    cdef Py_ssize_t best_idx = -1
    cdef bint first = True
    cdef Py_ssize_t t, j
    for t in range(idx.shape[0]):
        j = <Py_ssize_t> idx[t]
        nr = _norm(X[j])
        if nr == 0.0 or nv == 0.0:
            c = 0.0
        else:
            c = _clamp(_dot(X[j], v) / (nr * nv))
        if first or c > best:
            best = c
            best_idx = j
            first = False
    if first:
        return 0.0, -1
    return best, best_idx


def weighted_rowsum(const double[:, :] X, const double[:] w):
    cdef Py_ssize_t n = X.shape[0]
    cdef Py_ssize_t d = X.shape[1]
    out = np.zeros(d, dtype=np.float64)
    cdef double[:] o = out
    cdef double wk
    cdef Py_ssize_t i, k
    for i in range(n):
        wk = w[i]
        for k in range(d):
            o[k] += wk * X[i, k]
    return out


def mean_rows(const double[:, :] X):
    cdef Py_ssize_t n = X.shape[0]
    cdef Py_ssize_t d = X.shape[1]
    out = np.zeros(d, dtype=np.float64)
    cdef double[:] o = out
    cdef Py_ssize_t i, k
    for i in range(n):
        for k in range(d):
            o[k] += X[i, k]
    for k in range(d):
        o[k] = o[k] / n
    return out


def pairwise_cosine_sum(const double[:, :] X):
    cdef Py_ssize_t n = X.shape[0]
    norms_arr = np.empty(n, dtype=np.float64)
    cdef double[:] norms = norms_arr
    cdef Py_ssize_t i, j
    for i in range(n):
        norms[i] = _norm(X[i])
    cdef double total = 0.0
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            if norms[i] == 0.0 or norms[j] == 0.0:
                continue
            total += _clamp(_dot(X[i], X[j]) / (norms[i] * norms[j]))
    return total
