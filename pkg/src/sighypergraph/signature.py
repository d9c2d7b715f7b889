"""Truncated signatures of piecewise-linear paths.

Each linear segment has signature ``exp(increment)`` in the truncated tensor
algebra; the signature of the whole path is the left fold of Chen's product
over the segments. Level ``k`` is stored densely as an array of shape
``(d,) * k`` indexed by words ``(i1, ..., ik)``.

Feature vectors concatenate levels ``1..m`` in level-major, lexicographic
word order (C order of each level array). Level 0 is always 1 and is
left out.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial
from typing import Sequence

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .timeseries import (
    MultivariatePath,
    TimeGrid,
    check_same_interval,
    common_grid,
    lead_lag,
    resample,
    time_augment,
)
from .validation import check_paths

DEFAULT_ORDER = 3


@dataclass(frozen=True, eq=False)
class TruncatedSignature:
    """Levels ``1..order`` of a signature; level ``k`` has shape ``(dim,)*k``."""

    dim: int
    order: int
    levels: tuple

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("truncation order must be >= 1")
        if len(self.levels) != self.order:
            raise ValueError("one tensor per level is required")
        for k, lev in enumerate(self.levels, start=1):
            if lev.shape != (self.dim,) * k:
                raise ValueError(f"level {k} has shape {lev.shape}")

    @classmethod
    def trivial(cls, dim: int, order: int) -> "TruncatedSignature":
        """Signature of a constant path: 1 followed by zeros."""
        return cls(dim, order, tuple(np.zeros((dim,) * k) for k in range(1, order + 1)))

    def level(self, k: int):
        """Level ``k`` tensor; level 0 is the scalar 1."""
        if k == 0:
            return np.ones(())
        return self.levels[k - 1]

    def __getitem__(self, word):
        """Coefficient of a word given as a tuple of channel indices."""
        word = tuple(word)
        if not word:
            return 1.0
        return float(self.levels[len(word) - 1][word])


def segment_signature(increment, order: int = DEFAULT_ORDER) -> TruncatedSignature:
    """Signature of a straight segment: level k is ``increment^{(x)k} / k!``."""
    if order < 1:
        raise ValueError("truncation order must be >= 1")
    inc = np.asarray(increment, dtype=float).ravel()
    levels = []
    cur = inc
    for k in range(1, order + 1):
        if k > 1:
            cur = np.multiply.outer(cur, inc) / k
        levels.append(cur)
    return TruncatedSignature(inc.size, order, tuple(levels))


def chen_product(s1: TruncatedSignature, s2: TruncatedSignature) -> TruncatedSignature:
    """Truncated tensor product: signature of the concatenation of two paths."""
    if s1.dim != s2.dim or s1.order != s2.order:
        raise ValueError(
            f"cannot multiply signatures of (dim, order) {(s1.dim, s1.order)} "
            f"and {(s2.dim, s2.order)}"
        )
    out = []
    for k in range(1, s1.order + 1):
        acc = s1.levels[k - 1] + s2.levels[k - 1]
        for j in range(1, k):
            acc = acc + np.multiply.outer(s1.levels[j - 1], s2.levels[k - j - 1])
        out.append(acc)
    return TruncatedSignature(s1.dim, s1.order, tuple(out))


def _signature_array(x: np.ndarray, order: int) -> list:
    """Fold segment exponentials into running levels (hot path, no validation)."""
    d = x.shape[1]
    levels = [np.zeros((d,) * k) for k in range(1, order + 1)]
    incs = np.diff(x, axis=0)
    for inc in incs:
        # exp(inc) powers: inc^{(x)j}/j!
        powers = [inc]
        for j in range(2, order + 1):
            powers.append(np.multiply.outer(powers[-1], inc) / j)
        # update from the top level down so lower levels are still old
        for k in range(order, 0, -1):
            acc = levels[k - 1] + powers[k - 1]
            for j in range(1, k):
                acc += np.multiply.outer(levels[j - 1], powers[k - j - 1])
            levels[k - 1] = acc
    return levels


def path_signature(path, order: int = DEFAULT_ORDER) -> TruncatedSignature:
    """Signature of a piecewise-linear path truncated at ``order``.

    Args:
        path: A ``MultivariatePath`` or a ``(samples, d)`` array.
        order: Truncation level m >= 1.
    """
    x = path.values if isinstance(path, MultivariatePath) else np.asarray(path, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.shape[0] < 2:
        raise ValueError("a signature needs at least two samples")
    if order < 1:
        raise ValueError("truncation order must be >= 1")
    return TruncatedSignature(x.shape[1], order, tuple(_signature_array(x, order)))


def joint_path(vertices: Sequence[MultivariatePath]) -> MultivariatePath:
    """Stack the channels of several vertices into one path on their union grid."""
    vertices = list(vertices)
    if not vertices:
        raise ValueError("joint_path needs at least one vertex")
    if len(vertices) == 1:
        return vertices[0]
    check_same_interval(vertices)
    grid: TimeGrid = common_grid(vertices)
    parts = [resample(v, grid) for v in vertices]
    channels = tuple((v.label, c) for v in vertices for c in v.channels)
    label = tuple(v.label for v in vertices)
    return MultivariatePath(grid, np.hstack([p.values for p in parts]), label, channels)


def feature_length(dim: int, order: int) -> int:
    return sum(dim ** k for k in range(1, order + 1))


def flatten(sig: TruncatedSignature, scale_levels: bool = False) -> np.ndarray:
    """Concatenate levels 1..m in level-major lexicographic word order.

    With ``scale_levels`` level k is multiplied by k!, which undoes the
    factorial decay of signature terms. Off by default.
    """
    parts = []
    for k, lev in enumerate(sig.levels, start=1):
        flat = lev.ravel()
        parts.append(flat * factorial(k) if scale_levels else flat)
    return np.concatenate(parts)


def signature_features(path, order: int = DEFAULT_ORDER, scale_levels: bool = False) -> np.ndarray:
    """Shortcut for ``flatten(path_signature(path, order))``."""
    x = path.values if isinstance(path, MultivariatePath) else np.asarray(path, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.shape[0] < 2:
        raise ValueError("a signature needs at least two samples")
    levels = _signature_array(x, order)
    if scale_levels:
        levels = [lev * factorial(k) for k, lev in enumerate(levels, start=1)]
    return np.concatenate([lev.ravel() for lev in levels])


class SignatureTransformer(TransformerMixin, BaseEstimator):
    """Map each path of a collection to its flattened truncated signature.

    Stateless apart from checking the channel count seen in ``fit``.

    Parameters
    ----------
    order : int, default=3
        Truncation level.
    augmentation : {None, "time", "lead-lag"}, default=None
        Augmentation applied to every path before the signature.
    scale_levels : bool, default=False
        Multiply level k by k!.
    """

    def __init__(self, order=DEFAULT_ORDER, augmentation=None, scale_levels=False):
        self.order = order
        self.augmentation = augmentation
        self.scale_levels = scale_levels

    def _augment(self, paths):
        if self.augmentation is None:
            return paths
        if self.augmentation == "time":
            return [time_augment(p) for p in paths]
        if self.augmentation == "lead-lag":
            return [lead_lag(p) for p in paths]
        raise ValueError(f"unknown augmentation {self.augmentation!r}")

    def fit(self, X, y=None):
        if int(self.order) < 1:
            raise ValueError("order must be >= 1")
        paths = self._augment(check_paths(X))
        dims = {p.d for p in paths}
        if len(dims) != 1:
            raise ValueError(f"paths have differing channel counts {sorted(dims)}")
        self.n_channels_ = dims.pop()
        self.n_features_out_ = feature_length(self.n_channels_, self.order)
        return self

    def transform(self, X):
        check_is_fitted(self, "n_channels_")
        paths = self._augment(check_paths(X))
        for p in paths:
            if p.d != self.n_channels_:
                raise ValueError(f"expected {self.n_channels_} channels, got {p.d}")
        return np.vstack(
            [signature_features(p, self.order, self.scale_levels) for p in paths]
        )
