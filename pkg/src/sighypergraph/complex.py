"""Simplicial complexes inferred from signature regressions.

For a vertex ``v_i`` and a size ``k``, the signature of ``v_i`` is regressed
on the signatures of every joint path built from ``k`` other vertices. Each
candidate subset with a nonzero LASSO coefficient joins the link of ``v_i``,
provided the regression clears the R^2 gate. The complex is the union over
all vertices of ``v_i`` joined with its link members. Repeating this on random
subsets of the sampling times and averaging the indicator tensors gives
per-hyperedge frequencies ("probability tensors"), which are thresholded
into a final complex.
"""

from __future__ import annotations

import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations, permutations
from typing import Iterable, Sequence

import numpy as np

from . import lasso as _lasso
from .exceptions import DimensionCoherenceError, ParseError
from .signature import DEFAULT_ORDER, joint_path, signature_features
from .timeseries import (
    MultivariatePath,
    TimeGrid,
    check_same_interval,
    common_grid,
    make_coherent,
    resample,
    restrict_to_indices,
    zero_pad_augment,
)

logger = logging.getLogger(__name__)

DEFAULT_R2_THRESHOLD = 0.67
DEFAULT_TAU = 0.5
DEFAULT_N_TRIES = 50
DEFAULT_SUBSET_FRACTION = 0.6


def make_simplex(vertices: Iterable[int]) -> tuple:
    """Sorted tuple of distinct vertex indices."""
    s = tuple(sorted(int(v) for v in vertices))
    if not s:
        raise ValueError("a simplex needs at least one vertex")
    if len(set(s)) != len(s):
        raise ValueError(f"repeated vertex in simplex {s}")
    return s


def _faces(simplex: tuple):
    for r in range(1, len(simplex) + 1):
        yield from combinations(simplex, r)


@dataclass(frozen=True)
class SimplicialComplex:
    """Downward-closed set of simplices over vertices ``0..n-1``.

    Simplices are sorted index tuples. Every vertex is always present.
    """

    n: int
    simplices: frozenset = frozenset()

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("a complex needs at least one vertex")
        closed = set((v,) for v in range(self.n))
        for s in self.simplices:
            s = make_simplex(s)
            if s[-1] >= self.n or s[0] < 0:
                raise ValueError(f"simplex {s} has a vertex outside 0..{self.n - 1}")
            closed.update(_faces(s))
        object.__setattr__(self, "simplices", frozenset(closed))

    def __contains__(self, simplex):
        return tuple(sorted(simplex)) in self.simplices

    def __len__(self):
        return len(self.simplices)

    def of_size(self, size: int) -> list:
        """Sorted simplices with ``size`` vertices (``size - 1`` dimensional)."""
        return sorted(s for s in self.simplices if len(s) == size)

    @property
    def edges(self) -> list:
        return self.of_size(2)

    @property
    def dimension(self) -> int:
        return max(len(s) for s in self.simplices) - 1

    def is_downward_closed(self) -> bool:
        """Exhaustive subset scan."""
        return all(f in self.simplices for s in self.simplices for f in _faces(s))


def insert_with_closure(complex_: SimplicialComplex, simplex) -> SimplicialComplex:
    """New complex containing ``simplex`` and all its faces."""
    s = make_simplex(simplex)
    if s[-1] >= complex_.n or s[0] < 0:
        raise ValueError(f"simplex {s} has a vertex outside 0..{complex_.n - 1}")
    if s in complex_.simplices:
        return complex_
    return SimplicialComplex(complex_.n, complex_.simplices | frozenset(_faces(s)))


@dataclass(frozen=True)
class InferenceConfig:
    """Hyperparameters of the link / complex / probability-tensor algorithms.

    Attributes:
        order: Signature truncation level.
        k_max: Largest simplex size K; links of size ``1..K-1`` are predicted.
        lambda_ratio: LASSO penalty as a fraction of ``lambda_max``.
        lam: Absolute penalty; overrides ``lambda_ratio`` when set.
        r2_threshold: R^2 a regression must exceed for its picks to count.
        coherence: How to reconcile differing channel counts
            (None, "project", "zero-pad" or "time").
        eps_nz, tol, max_iter: LASSO numerics.
        refit_ols: Gate on the R^2 of an OLS refit on the support.
        scale_levels: Multiply signature level k by k! before regressing.
    """

    order: int = DEFAULT_ORDER
    k_max: int = 2
    lambda_ratio: float = _lasso.DEFAULT_LAMBDA_RATIO
    lam: float | None = None
    r2_threshold: float = DEFAULT_R2_THRESHOLD
    coherence: str | None = None
    eps_nz: float = _lasso.EPS_NZ
    tol: float = _lasso.DEFAULT_TOL
    max_iter: int = _lasso.DEFAULT_MAX_ITER
    refit_ols: bool = False
    scale_levels: bool = False

    def __post_init__(self):
        if not 0 < self.r2_threshold < 1:
            raise ValueError("r2_threshold must lie in (0, 1)")
        if self.k_max < 2:
            raise ValueError("k_max must be >= 2")
        if self.order < 1:
            raise ValueError("order must be >= 1")
        if self.lambda_ratio < 0 or (self.lam is not None and self.lam < 0):
            raise ValueError("penalty must be non-negative")


@dataclass
class LinkPrediction:
    """Link of one vertex plus the regression that produced it."""

    vertex: int
    k: int
    link: set
    candidates: list
    fit: _lasso.LassoFit


class _SignatureCache:
    """Memoizes signature features of joint paths and padded responses."""

    def __init__(self, vertices, cfg):
        self.vertices = vertices
        self.cfg = cfg
        self._joint = {}
        self._resp = {}

    def joint(self, subset: tuple) -> np.ndarray:
        f = self._joint.get(subset)
        if f is None:
            path = joint_path([self.vertices[j] for j in subset])
            f = signature_features(path, self.cfg.order, self.cfg.scale_levels)
            self._joint[subset] = f
        return f

    def response(self, i: int, dim: int) -> np.ndarray:
        key = (i, dim)
        f = self._resp.get(key)
        if f is None:
            path = zero_pad_augment(self.vertices[i], dim)
            f = signature_features(path, self.cfg.order, self.cfg.scale_levels)
            self._resp[key] = f
        return f


def _check_vertices(vertices):
    vertices = list(vertices)
    if len(vertices) < 2:
        raise ValueError("need at least two vertices")
    for v in vertices:
        if not isinstance(v, MultivariatePath):
            raise TypeError("vertices must be MultivariatePath instances")
    check_same_interval(vertices)
    return vertices


def _predict_link(vertices, i, k, cfg, cache) -> LinkPrediction:
    n = len(vertices)
    if not 1 <= k <= n - 1:
        raise ValueError(f"k={k} must satisfy 1 <= k <= n-1={n - 1}")
    if not 0 <= i < n:
        raise ValueError(f"vertex index {i} out of range")
    others = [j for j in range(n) if j != i]
    candidates = list(combinations(others, k))
    dims = {sum(vertices[j].d for j in c) for c in candidates}
    if len(dims) != 1:
        raise DimensionCoherenceError(
            "candidate subsets have differing joint dimensions; make vertices coherent first"
        )
    joint_dim = dims.pop()
    if joint_dim < vertices[i].d:
        raise DimensionCoherenceError(
            f"vertex {i} has {vertices[i].d} channels, more than its candidate subsets ({joint_dim})"
        )
    y = cache.response(i, joint_dim)
    X = np.column_stack([cache.joint(c) for c in candidates])
    fit = _lasso.lasso_fit(
        X, y, cfg.lam, lambda_ratio=cfg.lambda_ratio, tol=cfg.tol,
        max_iter=cfg.max_iter, eps_nz=cfg.eps_nz, refit_ols=cfg.refit_ols,
    )
    if not fit.converged:
        logger.warning("LASSO for vertex %d, k=%d hit max_iter=%d", i, k, cfg.max_iter)
    link = set()
    if fit.r2 > cfg.r2_threshold:
        link = {candidates[j] for j in fit.support}
    return LinkPrediction(i, k, link, candidates, fit)


def predict_k_link(vertices: Sequence[MultivariatePath], i: int, k: int,
                   cfg: InferenceConfig | None = None, return_fit: bool = False):
    """Predict the size-``k`` link of vertex ``i``.

    Returns the set of candidate subsets (sorted index tuples, each a
    ``(k-1)``-simplex) whose LASSO coefficient is nonzero, or the empty set
    when the regression's R^2 does not exceed ``cfg.r2_threshold``. With
    ``return_fit`` a :class:`LinkPrediction` is returned instead.
    """
    cfg = cfg or InferenceConfig()
    vertices = _check_vertices(vertices)
    pred = _predict_link(vertices, i, k, cfg, _SignatureCache(vertices, cfg))
    return pred if return_fit else pred.link


def _infer(vertices, cfg) -> SimplicialComplex:
    n = len(vertices)
    cache = _SignatureCache(vertices, cfg)
    found = set()
    for i in range(n):
        for k in range(1, min(cfg.k_max - 1, n - 1) + 1):
            for sigma in _predict_link(vertices, i, k, cfg, cache).link:
                found.add(make_simplex((i,) + sigma))
    return SimplicialComplex(n, frozenset(found))


def infer_complex(vertices: Sequence[MultivariatePath], cfg: InferenceConfig | None = None) -> SimplicialComplex:
    """Explainability complex: union over vertices of ``v_i`` joined to its links."""
    cfg = cfg or InferenceConfig()
    vertices = make_coherent(_check_vertices(vertices), cfg.coherence)
    return _infer(vertices, cfg)


@dataclass(frozen=True)
class HyperAdjacencyTensor:
    """Symmetric 0/1 tensor of order ``order`` over ``n`` vertices, stored sparsely.

    ``entries`` holds the sorted index tuples; every permutation of a stored
    tuple is a 1 entry, everything else (including repeated indices) is 0.
    """

    order: int
    n: int
    entries: frozenset

    def __getitem__(self, index) -> int:
        index = tuple(index)
        if len(index) != self.order:
            raise IndexError(f"expected {self.order} indices")
        return int(tuple(sorted(index)) in self.entries and len(set(index)) == self.order)

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.n,) * self.order, dtype=np.int8)
        for e in self.entries:
            for perm in permutations(e):
                out[perm] = 1
        return out


def hyper_adjacency(complex_: SimplicialComplex, order: int) -> HyperAdjacencyTensor:
    """Order-``order`` hyper-adjacency tensor; order 2 is the 1-skeleton adjacency."""
    if not 2 <= order <= complex_.n:
        raise ValueError(f"order must lie in 2..{complex_.n}")
    return HyperAdjacencyTensor(order, complex_.n, frozenset(complex_.of_size(order)))


def adjacency_matrix(complex_: SimplicialComplex) -> np.ndarray:
    """Dense symmetric 0/1 edge matrix (zero diagonal)."""
    A = np.zeros((complex_.n, complex_.n), dtype=int)
    for i, j in complex_.edges:
        A[i, j] = A[j, i] = 1
    return A


@dataclass
class ProbabilityTensors:
    """Per-order hyperedge counts over ``n_tries`` randomized runs.

    ``counts[order]`` maps sorted index tuples to the number of tries whose
    complex contained them; absent tuples have count 0.
    """

    n: int
    n_tries: int
    counts: dict = field(default_factory=dict)
    labels: list | None = None

    @property
    def orders(self) -> list:
        return sorted(self.counts)

    def frequency(self, simplex) -> float:
        s = tuple(sorted(simplex))
        return self.counts.get(len(s), {}).get(s, 0) / self.n_tries

    def frequencies(self, order: int) -> dict:
        return {s: c / self.n_tries for s, c in sorted(self.counts.get(order, {}).items())}

    def to_dense(self, order: int) -> np.ndarray:
        out = np.zeros((self.n,) * order)
        for s, c in self.counts.get(order, {}).items():
            for perm in permutations(s):
                out[perm] = c / self.n_tries
        return out


def _sample_indices(seed, try_index: int, n_grid: int, l: int) -> np.ndarray:
    # counter-based substream: identical no matter which worker runs the try
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(try_index,)))
    return np.sort(rng.choice(n_grid, size=l, replace=False))


def _run_try(vertices, cfg, grid, l, seed, try_index):
    idx = _sample_indices(seed, try_index, len(grid), l)
    sub_times = grid.times[idx]
    restricted = [
        restrict_to_indices(v, idx) if v.grid == grid else resample(v, sub_times)
        for v in vertices
    ]
    return _infer(restricted, cfg)


def _run_tries(args):
    vertices, cfg, grid, l, seed, indices = args
    return [sorted(_run_try(vertices, cfg, grid, l, seed, j).simplices) for j in indices]


def default_subset_len(n_grid: int) -> int:
    return max(4, min(n_grid, int(round(DEFAULT_SUBSET_FRACTION * n_grid))))


def estimate_probability_tensors(
    vertices: Sequence[MultivariatePath],
    cfg: InferenceConfig | None = None,
    grid: TimeGrid | None = None,
    n_tries: int = DEFAULT_N_TRIES,
    l: int | None = None,
    seed: int = 0,
    n_jobs: int = 1,
) -> ProbabilityTensors:
    """Average hyper-adjacency tensors over random subsets of the sampling times.

    Args:
        vertices: The vertex paths, all spanning the same interval.
        cfg: Inference hyperparameters.
        grid: Sampling times to draw from; defaults to the union of the
            vertex grids. Vertices sampled elsewhere are interpolated.
        n_tries: Number of randomized runs.
        l: Timesteps drawn per run, uniformly without replacement;
            defaults to 60% of the grid.
        seed: Master seed. Try ``j`` uses the substream ``(seed, j)``.
        n_jobs: Worker processes. Output does not depend on it.
    """
    cfg = cfg or InferenceConfig()
    vertices = make_coherent(_check_vertices(vertices), cfg.coherence)
    grid = grid if grid is not None else common_grid(vertices)
    if l is None:
        l = default_subset_len(len(grid))
    if not 4 <= l <= len(grid):
        raise ValueError(f"subset length l={l} must lie in 4..{len(grid)}")
    if n_tries < 1:
        raise ValueError("n_tries must be >= 1")

    tries = range(n_tries)
    if n_jobs is None or n_jobs <= 1:
        results = _run_tries((vertices, cfg, grid, l, seed, tries))
    else:
        chunks = [list(tries[w::n_jobs]) for w in range(n_jobs)]
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            parts = list(pool.map(_run_tries, [(vertices, cfg, grid, l, seed, c) for c in chunks]))
        results = [s for part in parts for s in part]

    max_order = min(cfg.k_max, len(vertices))
    counts = {order: {} for order in range(2, max_order + 1)}
    for simplices in results:
        for s in simplices:
            if 2 <= len(s) <= max_order:
                bucket = counts[len(s)]
                bucket[s] = bucket.get(s, 0) + 1
    counts = {o: dict(sorted(c.items())) for o, c in counts.items()}
    return ProbabilityTensors(len(vertices), n_tries, counts, [v.label for v in vertices])


def threshold_complex(prob: ProbabilityTensors, tau: float = DEFAULT_TAU) -> SimplicialComplex:
    """Complex of every hyperedge whose frequency is at least ``tau``."""
    if not 0 < tau <= 1:
        raise ValueError("tau must lie in (0, 1]")
    keep = [s for c in prob.counts.values() for s, cnt in c.items() if cnt / prob.n_tries >= tau]
    return SimplicialComplex(prob.n, frozenset(keep))


# -- serialization -----------------------------------------------------------

def dump_probability_tensors(prob: ProbabilityTensors, tau: float | None = None) -> str:
    """JSON document with ``n``, ``n_tries``, ``tau`` and per-order records.

    Frequencies are written with exactly 6 decimals so that identical runs
    give identical bytes.
    """
    lines = ["{", f'  "n": {prob.n},', f'  "n_tries": {prob.n_tries},']
    lines.append(f'  "tau": {"null" if tau is None else format(tau, ".6f")},')
    if prob.labels is not None:
        lines.append(f'  "labels": [{", ".join(json.dumps(str(x)) for x in prob.labels)}],')
    lines.append('  "orders": {')
    order_blocks = []
    for order in prob.orders:
        recs = [
            f'      {{"vertices": [{", ".join(map(str, s))}], "frequency": {freq:.6f}}}'
            for s, freq in prob.frequencies(order).items()
        ]
        body = ",\n".join(recs)
        order_blocks.append(f'    "{order}": [\n{body}\n    ]' if recs else f'    "{order}": []')
    lines.append(",\n".join(order_blocks))
    lines.append("  }")
    lines.append("}")
    return "\n".join(lines) + "\n"


def load_probability_tensors(text: str) -> tuple:
    """Inverse of :func:`dump_probability_tensors`; returns ``(prob, tau)``.

    Counts are recovered by rounding ``frequency * n_tries``.
    """
    try:
        doc = json.loads(text)
        n, n_tries = int(doc["n"]), int(doc["n_tries"])
        counts = {}
        for order, recs in doc["orders"].items():
            counts[int(order)] = {
                make_simplex(r["vertices"]): int(round(float(r["frequency"]) * n_tries))
                for r in recs
            }
    except (ValueError, KeyError, TypeError) as exc:
        raise ParseError(f"bad probability-tensor document: {exc}") from exc
    return ProbabilityTensors(n, n_tries, counts, doc.get("labels")), doc.get("tau")


def dump_complex(complex_: SimplicialComplex, tau: float | None = None, labels=None) -> str:
    """JSON document for a complex: ``n``, ``tau``, its ``edges`` and all simplices."""
    doc = {"n": complex_.n}
    if tau is not None:
        doc["tau"] = round(float(tau), 6)
    if labels is not None:
        doc["labels"] = [str(x) for x in labels]
    doc["edges"] = [list(e) for e in complex_.edges]
    doc["simplices"] = [list(s) for s in sorted(complex_.simplices, key=lambda s: (len(s), s))
                        if len(s) >= 2]
    # one top-level key per line, lists kept inline
    body = ",\n".join(f"  {json.dumps(k)}: {json.dumps(v)}" for k, v in doc.items())
    return "{\n" + body + "\n}\n"
