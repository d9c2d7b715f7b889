"""Input checking shared by the estimators."""

from __future__ import annotations

import numpy as np

from .timeseries import MultivariatePath


def check_paths(X, times=None) -> list:
    """Coerce a vertex collection into a list of ``MultivariatePath``.

    Accepts a list of paths, a list of ``(samples, d)`` arrays, or a 3-D
    array ``(n_vertices, samples, d)``. Raw arrays are placed on ``times``,
    or on a uniform grid over [0, 1] when ``times`` is None.
    """
    if isinstance(X, MultivariatePath):
        raise TypeError("expected a collection of paths, got a single path")
    if isinstance(X, np.ndarray):
        if X.ndim == 2:
            X = X[:, :, None]
        if X.ndim != 3:
            raise ValueError(f"expected a 3-D array (vertices, samples, channels), got {X.ndim}-D")
        X = list(X)
    paths = []
    for i, item in enumerate(X):
        if isinstance(item, MultivariatePath):
            paths.append(item)
            continue
        arr = np.asarray(item, dtype=float)
        if arr.ndim == 1:
            arr = arr[:, None]
        if arr.ndim != 2:
            raise ValueError(f"vertex {i}: expected a (samples, channels) array")
        if not np.all(np.isfinite(arr)):
            raise ValueError(f"vertex {i}: values must be finite")
        paths.append(MultivariatePath.from_array(arr, times=times, label=i))
    if not paths:
        raise ValueError("empty vertex collection")
    return paths


def check_design(X, y):
    """Validate a regression design; returns float arrays ``(X, y)``."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2:
        raise ValueError("design matrix must be 2-D")
    if X.shape[0] != y.size:
        raise ValueError(f"design has {X.shape[0]} rows but response has {y.size}")
    if y.size < 2 or X.shape[1] < 1:
        raise ValueError("need at least two observations and one column")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise ValueError("design contains NaN or Inf")
    return X, y
