"""Hot numeric kernels with a compiled core and a pure-Python fallback.

The compiled extension (``_ops_cy``, built from Cython) is preferred when
importable; otherwise the pure-Python twin (``_ops_py``) is used.  Both run
the same left-to-right double-precision loops, so outputs are bit-identical
across backends.  Set ``CTXCOMP_KERNELS=py`` (or ``cy``) to force a backend;
``benchmarks/bench_kernels.py`` compares their speed.
"""

import os

import numpy as np

from .. import errors

_choice = os.environ.get("CTXCOMP_KERNELS", "auto").lower()
if _choice not in ("auto", "cy", "py"):
    raise errors.ValidationError(
        f"CTXCOMP_KERNELS must be auto, cy or py, got {_choice!r}"
    )

if _choice == "py":
    from . import _ops_py as _ops
elif _choice == "cy":
    from . import _ops_cy as _ops  # type: ignore[no-redef]
else:
    try:
        from . import _ops_cy as _ops  # type: ignore[no-redef]
    except ImportError:
        from . import _ops_py as _ops  # type: ignore[no-redef]

BACKEND = _ops.BACKEND


def get_backend(name):
    """Return a specific backend module ('cy' or 'py'); used by benchmarks/tests."""
    if name == "py":
        from . import _ops_py

        return _ops_py
    if name == "cy":
        from . import _ops_cy

        return _ops_cy
    raise errors.ValidationError(f"unknown kernel backend {name!r}")


def _mat(X):
    X = np.ascontiguousarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise errors.ShapeError(f"expected a 2-D matrix, got shape {X.shape}")
    return X


def _vec(v):
    v = np.ascontiguousarray(v, dtype=np.float64)
    if v.ndim != 1:
        raise errors.ShapeError(f"expected a 1-D vector, got shape {v.shape}")
    return v


def row_norms(X):
    return _ops.row_norms(_mat(X))


def row_cosines(X, v):
    X, v = _mat(X), _vec(v)
    if X.shape[1] != v.shape[0]:
        raise errors.ShapeError(
            f"matrix width {X.shape[1]} != vector length {v.shape[0]}"
        )
    return _ops.row_cosines(X, v)


def max_cosine_vs(X, idx, v):
    """Max cosine(X[j], v) over j in idx, ties broken by earliest position.

    Returns ``(0.0, -1)`` for an empty index list.
    """
    X, v = _mat(X), _vec(v)
    if X.shape[1] != v.shape[0]:
        raise errors.ShapeError(
            f"matrix width {X.shape[1]} != vector length {v.shape[0]}"
        )
    idx = np.ascontiguousarray(idx, dtype=np.int64)
    return _ops.max_cosine_vs(X, idx, v)


def weighted_rowsum(X, w):
    X, w = _mat(X), _vec(w)
    if X.shape[0] != w.shape[0]:
        raise errors.ShapeError(
            f"matrix has {X.shape[0]} rows but {w.shape[0]} weights given"
        )
    return _ops.weighted_rowsum(X, w)


def mean_rows(X):
    X = _mat(X)
    if X.shape[0] == 0:
        raise errors.EmptySegmentError("cannot average zero rows")
    return _ops.mean_rows(X)


def pairwise_cosine_sum(X):
    return _ops.pairwise_cosine_sum(_mat(X))
