"""Scikit-learn style front end for hypergraph inference."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from . import lasso as _lasso
from .complex import (
    DEFAULT_N_TRIES,
    DEFAULT_R2_THRESHOLD,
    DEFAULT_TAU,
    InferenceConfig,
    adjacency_matrix,
    estimate_probability_tensors,
    hyper_adjacency,
    infer_complex,
    threshold_complex,
)
from .signature import DEFAULT_ORDER
from .validation import check_paths


class SignatureHypergraph(BaseEstimator):
    """Infer a simplicial complex over a collection of multivariate series.

    ``fit`` takes the vertex collection as ``X``: a list of
    :class:`~sighypergraph.timeseries.MultivariatePath`, a list of
    ``(samples, channels)`` arrays, or one ``(vertices, samples, channels)``
    array. There is no target.

    Parameters
    ----------
    order : int, default=3
        Signature truncation level.
    k_max : int, default=2
        Largest simplex size; 2 gives a graph.
    lambda_ratio : float, default=0.1
        LASSO penalty relative to ``lambda_max``.
    r2_threshold : float, default=0.67
    coherence : {None, "project", "zero-pad", "time"}, default=None
    n_tries : int, default=50
        Randomized time-subset runs. ``n_tries=0`` runs a single inference
        on the full grid instead.
    subset_len : int or float or None, default=None
        Timesteps per run; a float in (0, 1] is a fraction of the grid.
        None means 60%.
    tau : float, default=0.5
        Frequency threshold for the final complex.
    random_state : int, default=0
    n_jobs : int, default=1

    Attributes
    ----------
    probability_tensors_ : ProbabilityTensors or None
    complex_ : SimplicialComplex
    adjacency_ : ndarray of shape (n_vertices, n_vertices)
    n_vertices_ : int
    """

    def __init__(self, order=DEFAULT_ORDER, k_max=2, lambda_ratio=_lasso.DEFAULT_LAMBDA_RATIO,
                 r2_threshold=DEFAULT_R2_THRESHOLD, coherence=None, n_tries=DEFAULT_N_TRIES,
                 subset_len=None, tau=DEFAULT_TAU, random_state=0, n_jobs=1):
        self.order = order
        self.k_max = k_max
        self.lambda_ratio = lambda_ratio
        self.r2_threshold = r2_threshold
        self.coherence = coherence
        self.n_tries = n_tries
        self.subset_len = subset_len
        self.tau = tau
        self.random_state = random_state
        self.n_jobs = n_jobs

    def _config(self):
        return InferenceConfig(order=self.order, k_max=self.k_max,
                               lambda_ratio=self.lambda_ratio,
                               r2_threshold=self.r2_threshold, coherence=self.coherence)

    def fit(self, X, y=None):
        paths = check_paths(X)
        cfg = self._config()
        if self.n_tries == 0:
            self.probability_tensors_ = None
            self.complex_ = infer_complex(paths, cfg)
        else:
            l = self.subset_len
            if isinstance(l, float):
                if not 0 < l <= 1:
                    raise ValueError("a fractional subset_len must lie in (0, 1]")
                n_grid = max(len(p) for p in paths)
                l = max(4, int(round(l * n_grid)))
            self.probability_tensors_ = estimate_probability_tensors(
                paths, cfg, n_tries=self.n_tries, l=l, seed=self.random_state,
                n_jobs=self.n_jobs,
            )
            self.complex_ = threshold_complex(self.probability_tensors_, self.tau)
        self.n_vertices_ = len(paths)
        self.labels_ = [p.label for p in paths]
        self.adjacency_ = adjacency_matrix(self.complex_)
        return self

    def fit_predict(self, X, y=None):
        """Fit and return the edge adjacency matrix."""
        return self.fit(X).adjacency_

    def hyper_adjacency(self, order: int):
        check_is_fitted(self, "complex_")
        return hyper_adjacency(self.complex_, order)

    def edge_probabilities(self) -> np.ndarray:
        """Dense matrix of pairwise edge frequencies (indicators when ``n_tries=0``)."""
        check_is_fitted(self, "complex_")
        if self.probability_tensors_ is None:
            return self.adjacency_.astype(float)
        return self.probability_tensors_.to_dense(2)
