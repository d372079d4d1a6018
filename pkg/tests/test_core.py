import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ctxcomp import core
from ctxcomp.errors import (
    EmptyQueryError,
    EmptySegmentError,
    SelfComparisonError,
    ShapeError,
)

import oracles
from randdata import unit_rows

SQ2 = 1.0 / math.sqrt(2.0)


class TestCosine:
    def test_identical(self):
        assert core.cosine([1, 0], [1, 0]) == 1.0

    def test_orthogonal(self):
        assert core.cosine([1, 0], [0, 1]) == 0.0

    def test_analytic_half_sqrt2(self):
        assert core.cosine([1, 1], [1, 0]) == pytest.approx(SQ2, abs=1e-15)

    def test_zero_norm_convention(self):
        assert core.cosine([0, 0], [1, 2]) == 0.0

    def test_dimension_mismatch(self):
        with pytest.raises(ShapeError):
            core.cosine([1, 0], [1, 0, 0])

    def test_clamped(self, rng):
        for _ in range(50):
            v = rng.normal(size=8) * 1e3
            assert -1.0 <= core.cosine(v, v * 7.5) <= 1.0


class TestPoolQuery:
    def test_single_row_identity(self):
        q = np.array([[1.5, -2.0, 3.0]])
        assert np.array_equal(core.pool_query(q), q[0])

    def test_symmetry(self):
        assert np.array_equal(
            core.pool_query([[1.0, 0.0], [-1.0, 0.0]]), np.zeros(2)
        )

    def test_analytic_mean(self):
        out = core.pool_query([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
        assert out == pytest.approx([2 / 3, 2 / 3], abs=1e-15)

    def test_empty_query_rejected(self):
        with pytest.raises(EmptyQueryError):
            core.pool_query(np.zeros((0, 3)))


def full_peers(n):
    return [[j for j in range(n) if j != i] for i in range(n)]


class TestMigScores:
    def test_two_dim_analytic(self):
        X = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
        recs = core.mig_scores(X, [1.0, 0.0], full_peers(3))
        assert recs[0].gain == pytest.approx(1 - SQ2, abs=1e-12)
        assert recs[1].gain == pytest.approx(-SQ2, abs=1e-12)
        assert recs[2].gain == pytest.approx(0.0, abs=1e-12)

    def test_empty_peer_convention(self):
        recs = core.mig_scores([[2.0, 0.0]], [3.0, 0.0], [[]])
        (r,) = recs
        assert (r.relevance, r.redundancy, r.gain) == (1.0, 0.0, 1.0)
        assert r.argmax_peer is None

    def test_matches_brute_force(self, rng):
        X = unit_rows(rng, 8, 5)
        q = rng.normal(size=5)
        peers = full_peers(8)
        recs = core.mig_scores(X, q, peers)
        ref = oracles.mig_ref(X.astype(np.float64), q, peers)
        for r, (rel, red, gain, arg) in zip(recs, ref):
            assert r.relevance == pytest.approx(rel, abs=1e-12)
            assert r.redundancy == pytest.approx(red, abs=1e-12)
            assert r.gain == pytest.approx(gain, abs=1e-12)
            assert r.argmax_peer == arg

    def test_self_comparison_rejected(self):
        with pytest.raises(SelfComparisonError):
            core.mig_scores(np.eye(2), [1.0, 0.0], [[0], [0]])

    def test_singleton_equals_relevance(self, rng):
        x = rng.normal(size=6)
        q = rng.normal(size=6)
        (r,) = core.mig_scores([x], q, [[]])
        assert r.gain == pytest.approx(core.cosine(x, q), abs=1e-15)

    @settings(deadline=None, max_examples=30)
    @given(st.integers(0, 2**32 - 1), st.floats(0.1, 100.0))
    def test_positive_rescaling_invariance(self, seed, scale):
        rng = np.random.default_rng(seed)
        X = rng.normal(size=(6, 4))
        q = rng.normal(size=4)
        peers = full_peers(6)
        base = core.mig_scores(X, q, peers)
        Y = X.copy()
        Y[2] *= scale
        scaled = core.mig_scores(Y, q, peers)
        for a, b in zip(base, scaled):
            assert b.relevance == pytest.approx(a.relevance, abs=1e-9)
            assert b.redundancy == pytest.approx(a.redundancy, abs=1e-9)
            assert b.gain == pytest.approx(a.gain, abs=1e-9)

    def test_ranges(self, rng):
        X = rng.normal(size=(10, 4))
        recs = core.mig_scores(X, rng.normal(size=4), full_peers(10))
        for r in recs:
            assert -1.0 <= r.relevance <= 1.0
            assert -1.0 <= r.redundancy <= 1.0
            assert -2.0 <= r.gain <= 2.0
            assert r.gain == r.relevance - r.redundancy


class TestRepresentative:
    def test_singleton(self):
        assert core.representative([[3.0, 1.0]], [1.0, 0.0]) == 0

    def test_tie_lowest_index(self):
        X = [[1.0, 0.0], [1.0, 0.0]]
        assert core.representative(X, [1.0, 0.0]) == 0

    def test_matches_exhaustive_scan(self, rng):
        X = unit_rows(rng, 16, 6)
        q = rng.normal(size=6)
        cs = [oracles.cos_ref(row, q) for row in X.astype(np.float64)]
        assert core.representative(X, q) == int(np.argmax(cs))

    def test_segment_offsets(self, rng):
        X = unit_rows(rng, 12, 4)
        q = rng.normal(size=4)
        idx = core.representative(X, q, 4, 9)
        assert 4 <= idx < 9
        cs = [oracles.cos_ref(X[i].astype(np.float64), q) for i in range(4, 9)]
        assert idx == 4 + int(np.argmax(cs))

    def test_query_rescale_invariance(self, rng):
        X = unit_rows(rng, 9, 5)
        q = rng.normal(size=5)
        assert core.representative(X, q) == core.representative(X, q * 17.0)

    def test_empty_segment(self):
        with pytest.raises(EmptySegmentError):
            core.representative(np.zeros((3, 2)), [1.0, 0.0], 2, 2)
