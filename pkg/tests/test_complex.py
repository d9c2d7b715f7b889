import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import walk
from sighypergraph.complex import (
    InferenceConfig,
    ProbabilityTensors,
    SimplicialComplex,
    adjacency_matrix,
    dump_complex,
    dump_probability_tensors,
    estimate_probability_tensors,
    hyper_adjacency,
    infer_complex,
    insert_with_closure,
    load_probability_tensors,
    predict_k_link,
    threshold_complex,
)
from sighypergraph.exceptions import DimensionCoherenceError
from sighypergraph.timeseries import MultivariatePath, TimeGrid


def exhaustive_closed(cplx):
    for s in cplx.simplices:
        for r in range(1, len(s)):
            for f in itertools.combinations(s, r):
                if f not in cplx.simplices:
                    return False
    return True


def duplicate(p, label):
    return MultivariatePath(p.grid, p.values, label)


class TestSimplicialComplex:
    def test_triangle_closure(self):
        c = insert_with_closure(SimplicialComplex(3), (0, 1, 2))
        assert len(c) == 7

    def test_idempotent(self):
        c = insert_with_closure(SimplicialComplex(3), (0, 2))
        assert insert_with_closure(c, (2, 0)) is c

    def test_two_edges(self):
        c = insert_with_closure(insert_with_closure(SimplicialComplex(3), (0, 1)), (1, 2))
        assert len(c) == 5 and c.edges == [(0, 1), (1, 2)]

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            insert_with_closure(SimplicialComplex(3), (1, 3))
        with pytest.raises(ValueError):
            insert_with_closure(SimplicialComplex(3), (1, 1))

    @given(st.integers(1, 8), st.lists(st.sets(st.integers(0, 7), min_size=1, max_size=5), max_size=6))
    @settings(max_examples=100, deadline=None)
    def test_closure_after_every_insert(self, n, sets):
        c = SimplicialComplex(n)
        for s in sets:
            s = {v for v in s if v < n}
            if s:
                c = insert_with_closure(c, s)
                assert exhaustive_closed(c) and c.is_downward_closed()


class TestHyperAdjacency:
    def test_single_edge(self):
        c = insert_with_closure(SimplicialComplex(3), (0, 1))
        A = hyper_adjacency(c, 2).to_dense()
        assert A[0, 1] == A[1, 0] == 1 and A.sum() == 2

    def test_vertices_only(self):
        c = SimplicialComplex(4)
        for order in (2, 3, 4):
            assert not hyper_adjacency(c, order).to_dense().any()

    def test_triangle(self):
        c = insert_with_closure(SimplicialComplex(3), (0, 1, 2))
        A3 = hyper_adjacency(c, 3)
        assert A3.to_dense().sum() == 6
        assert all(A3[p] == 1 for p in itertools.permutations((0, 1, 2)))
        assert A3[(0, 0, 1)] == 0
        assert hyper_adjacency(c, 2).to_dense().sum() == 6

    def test_order_range(self):
        with pytest.raises(ValueError):
            hyper_adjacency(SimplicialComplex(3), 4)
        with pytest.raises(ValueError):
            hyper_adjacency(SimplicialComplex(3), 1)

    @given(st.integers(2, 8), st.lists(st.tuples(st.integers(0, 7), st.integers(0, 7)), max_size=12))
    @settings(max_examples=100, deadline=None)
    def test_a2_symmetric_zero_diagonal(self, n, pairs):
        c = SimplicialComplex(n)
        for i, j in pairs:
            if i != j and i < n and j < n:
                c = insert_with_closure(c, (i, j))
        A = hyper_adjacency(c, 2).to_dense()
        assert np.array_equal(A, A.T) and not np.diag(A).any()


class TestLink:
    def test_duplicate_pair(self, rng):
        a = walk(rng, label="a")
        fit = predict_k_link([a, duplicate(a, "b")], 0, 1, return_fit=True)
        assert fit.link == {(1,)}
        # penalized fit shrinks the single coefficient by the lambda ratio
        assert fit.fit.r2 == pytest.approx(1 - 0.1 ** 2, abs=1e-9)
        refit = predict_k_link([a, duplicate(a, "b")], 0, 1,
                               InferenceConfig(refit_ols=True), return_fit=True)
        assert refit.fit.r2 == pytest.approx(1.0, abs=1e-12)

    def test_duplicate_beats_noise(self):
        hits = 0
        runs = 50
        for seed in range(runs):
            rng = np.random.default_rng(seed)
            a = walk(rng, label="a")
            noise = walk(rng, label="z", scale=1.0)
            link = predict_k_link([a, duplicate(a, "b"), noise], 0, 1)
            hits += (1,) in link and (2,) not in link
        assert hits >= 0.9 * runs

    def test_k_range(self, rng):
        paths = [walk(rng) for _ in range(3)]
        with pytest.raises(ValueError):
            predict_k_link(paths, 0, 3)
        with pytest.raises(ValueError):
            predict_k_link(paths, 0, 0)

    def test_k2_uses_padded_response(self, rng):
        paths = [walk(rng, label=i) for i in range(4)]
        pred = predict_k_link(paths, 0, 2, return_fit=True)
        assert pred.candidates == [(1, 2), (1, 3), (2, 3)]
        assert all(len(s) == 2 for s in pred.link)

    def test_mixed_dimensions_rejected(self, rng):
        with pytest.raises(DimensionCoherenceError):
            predict_k_link([walk(rng), walk(rng, d=1), walk(rng)], 0, 1)


class TestInferComplex:
    def test_duplicate_pair(self, rng):
        a = walk(rng)
        c = infer_complex([a, duplicate(a, 1)], InferenceConfig(k_max=2))
        assert c.simplices == {(0,), (1,), (0, 1)}

    def test_constant_series_give_no_edges(self):
        g = TimeGrid.uniform(20)
        paths = [MultivariatePath(g, np.full((21, 2), float(i))) for i in range(4)]
        assert infer_complex(paths).edges == []

    def test_k3_produces_closed_complex(self, rng):
        a, b = walk(rng), walk(rng)
        ab = MultivariatePath(a.grid, a.values + b.values, "ab")
        paths = [a, b, ab, walk(rng)]
        c = infer_complex(paths, InferenceConfig(k_max=3))
        assert exhaustive_closed(c)

    def test_coherence_modes(self, rng):
        paths = [walk(rng), walk(rng, d=1), walk(rng)]
        with pytest.raises(DimensionCoherenceError):
            infer_complex(paths)
        for mode in ("project", "zero-pad", "time"):
            assert infer_complex(paths, InferenceConfig(coherence=mode)).n == 3


class TestProbabilityTensors:
    def test_single_try_equals_single_run(self, rng):
        paths = [walk(rng, label=i) for i in range(4)]
        cfg = InferenceConfig()
        prob = estimate_probability_tensors(paths, cfg, n_tries=1, l=101, seed=3)
        full = infer_complex(paths, cfg)
        assert set(prob.counts[2]) == set(full.edges)
        assert all(v == 1 for v in prob.counts[2].values())

    def test_duplicate_pair_frequency(self, rng):
        a = walk(rng)
        paths = [a, duplicate(a, 1), walk(rng, scale=1.0), walk(rng, scale=1.0)]
        prob = estimate_probability_tensors(paths, n_tries=50, seed=11)
        assert prob.frequency((0, 1)) >= 0.9

    def test_frequencies_on_lattice(self, rng):
        paths = [walk(rng, label=i) for i in range(4)]
        prob = estimate_probability_tensors(paths, n_tries=7, seed=1)
        for order in prob.orders:
            for f in prob.frequencies(order).values():
                assert 0 <= f <= 1 and abs(f * 7 - round(f * 7)) < 1e-12

    def test_deterministic_and_worker_independent(self, rng):
        paths = [walk(rng, label=i) for i in range(4)]
        a = estimate_probability_tensors(paths, n_tries=6, seed=5)
        b = estimate_probability_tensors(paths, n_tries=6, seed=5)
        c = estimate_probability_tensors(paths, n_tries=6, seed=5, n_jobs=2)
        assert a.counts == b.counts == c.counts

    def test_l_range(self, rng):
        paths = [walk(rng) for _ in range(3)]
        with pytest.raises(ValueError):
            estimate_probability_tensors(paths, l=3)
        with pytest.raises(ValueError):
            estimate_probability_tensors(paths, l=102)

    def test_heterogeneous_grids_are_interpolated(self, rng):
        a = walk(rng, n_samples=51)
        b = walk(rng, n_samples=101)
        c = walk(rng, n_samples=101)
        prob = estimate_probability_tensors([a, b, c], n_tries=3, seed=0)
        assert prob.n == 3


class TestThreshold:
    def make(self):
        return ProbabilityTensors(3, 10, {2: {(0, 1): 4, (1, 2): 6, (0, 2): 10}})

    def test_half(self):
        assert threshold_complex(self.make(), 0.5).edges == [(0, 2), (1, 2)]

    def test_one(self):
        assert threshold_complex(self.make(), 1.0).edges == [(0, 2)]

    def test_tiny(self):
        assert len(threshold_complex(self.make(), 1e-9).edges) == 3

    def test_range(self):
        for tau in (0.0, 1.5, -0.1):
            with pytest.raises(ValueError):
                threshold_complex(self.make(), tau)

    @given(st.integers(1, 20), st.data())
    @settings(max_examples=100, deadline=None)
    def test_monotone(self, n_tries, data):
        counts = {2: {}, 3: {}}
        for s in itertools.combinations(range(5), 2):
            counts[2][s] = data.draw(st.integers(0, n_tries))
        for s in itertools.combinations(range(5), 3):
            counts[3][s] = data.draw(st.integers(0, n_tries))
        prob = ProbabilityTensors(5, n_tries, counts)
        t1 = data.draw(st.floats(0.01, 1.0))
        t2 = data.draw(st.floats(t1, 1.0))
        assert threshold_complex(prob, t1).simplices >= threshold_complex(prob, t2).simplices


class TestSerialization:
    def test_probability_round_trip(self):
        prob = ProbabilityTensors(3, 3, {2: {(0, 1): 1, (1, 2): 3}, 3: {(0, 1, 2): 1}}, ["a", "b", "c"])
        text = dump_probability_tensors(prob, tau=0.5)
        doc = json.loads(text)
        assert doc["n"] == 3 and doc["n_tries"] == 3 and doc["tau"] == 0.5
        assert doc["orders"]["2"][0] == {"vertices": [0, 1], "frequency": 0.333333}
        assert '"frequency": 0.333333' in text and '"frequency": 1.000000' in text
        back, tau = load_probability_tensors(text)
        assert back.counts == prob.counts and tau == 0.5

    def test_complex_document(self):
        c = insert_with_closure(SimplicialComplex(4), (0, 1, 2))
        doc = json.loads(dump_complex(c, 0.5))
        assert doc["n"] == 4 and doc["edges"] == [[0, 1], [0, 2], [1, 2]]
        assert [0, 1, 2] in doc["simplices"]

    def test_adjacency_matrix(self):
        c = insert_with_closure(SimplicialComplex(3), (0, 2))
        assert adjacency_matrix(c).tolist() == [[0, 0, 1], [0, 0, 0], [1, 0, 0]]
