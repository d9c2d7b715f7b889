import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from conftest import walk
from oracles import random_polyline, riemann_signature
from sighypergraph.signature import (
    SignatureTransformer,
    TruncatedSignature,
    chen_product,
    feature_length,
    flatten,
    joint_path,
    path_signature,
    segment_signature,
)
from sighypergraph.timeseries import MultivariatePath, TimeGrid


class TestSegment:
    def test_zero_increment(self):
        sig = segment_signature([0.0, 0.0], 3)
        assert all(not lev.any() for lev in sig.levels)

    def test_one_dimensional(self):
        sig = segment_signature([2.0], 3)
        assert np.allclose(flatten(sig), [2.0, 2.0, 4.0 / 3.0])

    def test_diagonal_level_two(self):
        sig = segment_signature([1.0, 1.0], 2)
        assert np.allclose(sig.level(2), 0.5)


class TestChen:
    def test_identity_element(self, rng):
        s = path_signature(random_polyline(rng, 4), 3)
        e = TruncatedSignature.trivial(2, 3)
        for prod in (chen_product(s, e), chen_product(e, s)):
            for a, b in zip(prod.levels, s.levels):
                assert np.array_equal(a, b)

    def test_one_dimensional_concatenation(self):
        a, b = 0.7, -1.9
        s = chen_product(segment_signature([a], 3), segment_signature([b], 3))
        assert s[(0,)] == pytest.approx(a + b)
        assert s[(0, 0)] == pytest.approx((a + b) ** 2 / 2)

    def test_mismatch(self):
        with pytest.raises(ValueError):
            chen_product(segment_signature([1.0], 2), segment_signature([1.0, 0.0], 2))
        with pytest.raises(ValueError):
            chen_product(segment_signature([1.0], 2), segment_signature([1.0], 3))

    def test_two_segments_against_riemann(self, rng):
        pts = random_polyline(rng, 2)
        s = chen_product(segment_signature(pts[1] - pts[0], 3),
                         segment_signature(pts[2] - pts[1], 3))
        ref = riemann_signature(pts, 3)
        for w, v in ref.items():
            assert s[w] == pytest.approx(v, rel=1e-2, abs=1e-9)


class TestPathSignature:
    def test_axis_aligned(self):
        sig = path_signature(np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]]), 2)
        assert np.allclose(sig.level(1), [1.0, 1.0], atol=1e-12)
        assert sig[(0, 1)] == pytest.approx(1.0, abs=1e-12)
        assert sig[(1, 0)] == pytest.approx(0.0, abs=1e-12)
        assert sig[(0, 0)] == pytest.approx(0.5, abs=1e-12)
        assert sig[(1, 1)] == pytest.approx(0.5, abs=1e-12)

    def test_out_and_back(self):
        sig = path_signature(np.array([[0.0], [1.0], [0.0]]), 3)
        assert sig[(0,)] == 0.0

    def test_five_segments_against_riemann(self, rng):
        pts = random_polyline(rng, 5)
        sig = path_signature(pts, 4)
        for w, v in riemann_signature(pts, 4).items():
            assert sig[w] == pytest.approx(v, rel=1e-2, abs=1e-9)

    def test_single_sample_rejected(self):
        with pytest.raises(ValueError):
            path_signature(np.zeros((1, 2)), 2)

    def test_accepts_path_objects(self, rng):
        p = walk(rng)
        assert np.array_equal(flatten(path_signature(p, 3)), flatten(path_signature(p.values, 3)))


finite = st.floats(-3, 3, allow_nan=False)


@given(arrays(float, st.tuples(st.integers(3, 12), st.integers(1, 3)), elements=finite),
       st.integers(1, 4), st.data())
@settings(max_examples=100, deadline=None)
def test_chen_identity_at_any_split(x, order, data):
    split = data.draw(st.integers(1, x.shape[0] - 2))
    whole = path_signature(x, order)
    joined = chen_product(path_signature(x[: split + 1], order), path_signature(x[split:], order))
    for a, b in zip(whole.levels, joined.levels):
        np.testing.assert_allclose(a, b, atol=1e-10 * max(1.0, np.abs(a).max()))


@given(arrays(float, st.tuples(st.integers(2, 10), st.integers(1, 3)), elements=finite))
@settings(max_examples=100, deadline=None)
def test_shuffle_level_two(x):
    sig = path_signature(x, 2)
    s1, s2 = sig.level(1), sig.level(2)
    np.testing.assert_allclose(np.outer(s1, s1), s2 + s2.T, atol=1e-10 * max(1.0, np.abs(s2).max()))


@given(arrays(float, st.tuples(st.integers(2, 10), st.just(2)), elements=finite),
       arrays(float, 2, elements=finite))
@settings(max_examples=100, deadline=None)
def test_translation_invariance(x, shift):
    # increments are computed from differences; the shift must cancel exactly
    # whenever it is representable without rounding, e.g. integers
    shift = np.round(shift)
    x = np.round(x * 8) / 8
    a, b = path_signature(x, 3), path_signature(x + shift, 3)
    for la, lb in zip(a.levels, b.levels):
        assert np.array_equal(la, lb)


@given(arrays(float, st.tuples(st.integers(2, 10), st.integers(1, 3)), elements=finite))
@settings(max_examples=100, deadline=None)
def test_reversal_inverts(x):
    prod = chen_product(path_signature(x, 3), path_signature(x[::-1], 3))
    for lev in prod.levels:
        assert np.abs(lev).max() < 1e-10 * max(1.0, np.abs(x).max() ** 3)


class TestJointPath:
    def test_single_vertex(self, rng):
        p = walk(rng)
        assert joint_path([p]) is p

    def test_same_grid(self, rng):
        a, b = walk(rng), walk(rng)
        j = joint_path([a, b])
        assert j.d == 4 and np.array_equal(j.values, np.hstack([a.values, b.values]))

    def test_different_grids(self):
        a = MultivariatePath(TimeGrid([0.0, 0.5, 1.0]), [[0.0], [1.0], [0.0]])
        b = MultivariatePath(TimeGrid([0.0, 0.25, 1.0]), [[2.0], [3.0], [4.0]])
        j = joint_path([a, b])
        assert np.array_equal(j.times, [0.0, 0.25, 0.5, 1.0])
        assert np.array_equal(j.values[[0, 2, 3], 0], [0.0, 1.0, 0.0])
        assert np.array_equal(j.values[[0, 1, 3], 1], [2.0, 3.0, 4.0])

    def test_interval_mismatch(self):
        a = MultivariatePath(TimeGrid([0.0, 1.0]), [[0.0], [1.0]])
        b = MultivariatePath(TimeGrid([0.0, 2.0]), [[0.0], [1.0]])
        with pytest.raises(ValueError):
            joint_path([a, b])


class TestFlatten:
    def test_lengths(self):
        assert feature_length(2, 3) == 14
        assert flatten(segment_signature([1.0, 2.0], 3)).size == 14
        assert np.array_equal(flatten(segment_signature([1.0, 2.0], 1)), [1.0, 2.0])

    def test_word_order_is_level_major_lexicographic(self, rng):
        sig = path_signature(random_polyline(rng, 3), 3)
        words = [w for k in range(1, 4) for w in itertools.product(range(2), repeat=k)]
        assert np.array_equal(flatten(sig), [sig[w] for w in words])

    def test_scaled_levels(self):
        f = flatten(segment_signature([2.0], 3), scale_levels=True)
        assert np.allclose(f, [2.0, 4.0, 8.0])


class TestTransformer:
    def test_fit_transform(self, rng):
        X = [walk(rng) for _ in range(4)]
        F = SignatureTransformer(order=2).fit_transform(X)
        assert F.shape == (4, 6)
        assert np.array_equal(F[1], flatten(path_signature(X[1], 2)))

    def test_array_input_and_augmentations(self, rng):
        X = rng.normal(size=(3, 20, 2))
        assert SignatureTransformer(order=2, augmentation="time").fit_transform(X).shape == (3, 12)
        assert SignatureTransformer(order=2, augmentation="lead-lag").fit_transform(X).shape == (3, 20)

    def test_channel_check(self, rng):
        t = SignatureTransformer().fit(rng.normal(size=(2, 10, 2)))
        with pytest.raises(ValueError):
            t.transform(rng.normal(size=(2, 10, 3)))
