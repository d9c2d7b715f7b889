"""Hypergraph inference over collections of multivariate time series."""

from .complex import (
    InferenceConfig,
    ProbabilityTensors,
    SimplicialComplex,
    estimate_probability_tensors,
    hyper_adjacency,
    infer_complex,
    predict_k_link,
    threshold_complex,
)
from .estimator import SignatureHypergraph
from .lasso import CoordinateDescentLasso, lasso_fit
from .signature import SignatureTransformer, path_signature
from .synthgen import SynthConfig, simulate_dataset
from .timeseries import MultivariatePath, TimeGrid

__all__ = [
    "CoordinateDescentLasso",
    "InferenceConfig",
    "MultivariatePath",
    "ProbabilityTensors",
    "SignatureHypergraph",
    "SignatureTransformer",
    "SimplicialComplex",
    "SynthConfig",
    "TimeGrid",
    "estimate_probability_tensors",
    "hyper_adjacency",
    "infer_complex",
    "lasso_fit",
    "path_signature",
    "predict_k_link",
    "simulate_dataset",
    "threshold_complex",
]
__version__ = "0.1.0"
