"""Sampled multivariate paths and the operations that make them comparable.

A vertex is a d-channel series sampled on its own time grid over a shared
interval ``[a, b]``. Between samples the path is the linear interpolant, so
every path is of bounded variation and its signature has a closed form.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence

import numpy as np

from .exceptions import DimensionCoherenceError, ParseError

COHERENCE_MODES = ("project", "zero-pad", "time")


def _frozen(arr):
    arr = np.array(arr, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class TimeGrid:
    """Strictly increasing sampling times spanning ``[a, b]``."""

    times: np.ndarray

    def __post_init__(self):
        times = _frozen(self.times)
        if times.ndim != 1 or times.size < 2:
            raise ValueError("a time grid needs at least two timestamps")
        if not np.all(np.isfinite(times)):
            raise ValueError("time grid contains non-finite values")
        if not np.all(np.diff(times) > 0):
            raise ValueError("time grid must be strictly increasing")
        object.__setattr__(self, "times", times)

    @classmethod
    def uniform(cls, n_steps: int, a: float = 0.0, b: float = 1.0) -> "TimeGrid":
        # index * dt keeps the grid points reproducible (no cumulative sums)
        dt = (b - a) / n_steps
        return cls(a + np.arange(n_steps + 1) * dt)

    @property
    def a(self) -> float:
        return float(self.times[0])

    @property
    def b(self) -> float:
        return float(self.times[-1])

    def __len__(self):
        return self.times.size

    def __eq__(self, other):
        if not isinstance(other, TimeGrid):
            return NotImplemented
        return np.array_equal(self.times, other.times)

    def __hash__(self):
        return hash(self.times.tobytes())


@dataclass(frozen=True, eq=False)
class MultivariatePath:
    """A d-channel series sampled on ``grid``.

    Attributes:
        grid: Sampling times.
        values: Array of shape ``(len(grid), d)``.
        label: Vertex identifier.
        channels: Names of the channels, defaults to ``0..d-1``. Used by the
            projection coherence mode to find channels shared by all vertices.
    """

    grid: TimeGrid
    values: np.ndarray
    label: Hashable = None
    channels: tuple = field(default=None)

    def __post_init__(self):
        if not isinstance(self.grid, TimeGrid):
            object.__setattr__(self, "grid", TimeGrid(self.grid))
        values = np.array(self.values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        if values.ndim != 2 or values.shape[1] < 1:
            raise ValueError("values must be a (samples, channels) matrix")
        if values.shape[0] != len(self.grid):
            raise ValueError(
                f"{values.shape[0]} samples for a grid of {len(self.grid)} times"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("path values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        channels = self.channels
        if channels is None:
            channels = tuple(range(values.shape[1]))
        channels = tuple(channels)
        if len(channels) != values.shape[1]:
            raise ValueError("one channel name per column is required")
        object.__setattr__(self, "channels", channels)

    @classmethod
    def from_array(cls, values, times=None, label=None) -> "MultivariatePath":
        """Wrap an array, defaulting to a uniform grid on ``[0, 1]``."""
        values = np.asarray(values, dtype=float)
        if times is None:
            grid = TimeGrid.uniform(values.shape[0] - 1)
        else:
            grid = TimeGrid(times)
        return cls(grid, values, label)

    @property
    def times(self) -> np.ndarray:
        return self.grid.times

    @property
    def d(self) -> int:
        return self.values.shape[1]

    def __len__(self):
        return self.values.shape[0]

    def _replace(self, **changes) -> "MultivariatePath":
        kwargs = dict(grid=self.grid, values=self.values, label=self.label,
                      channels=self.channels)
        kwargs.update(changes)
        return MultivariatePath(**kwargs)


def restrict_to_indices(path: MultivariatePath, indices: Sequence[int]) -> MultivariatePath:
    """Keep only the samples at ``indices`` (strictly increasing, at least two)."""
    idx = np.asarray(indices)
    if idx.ndim != 1 or idx.size < 2:
        raise ValueError("need at least two sample indices")
    if not np.issubdtype(idx.dtype, np.integer):
        raise ValueError("sample indices must be integers")
    if idx[0] < 0 or idx[-1] >= len(path):
        raise ValueError(f"indices out of range for a path of {len(path)} samples")
    if not np.all(np.diff(idx) > 0):
        raise ValueError("indices must be strictly increasing")
    return path._replace(grid=TimeGrid(path.times[idx]), values=path.values[idx])


def interpolate_at(path: MultivariatePath, t: float) -> np.ndarray:
    """Value of the piecewise-linear path at time ``t``; exact on grid points."""
    times = path.times
    if not times[0] <= t <= times[-1]:
        raise ValueError(f"t={t} outside [{times[0]}, {times[-1]}]")
    j = int(np.searchsorted(times, t, side="left"))
    if times[j] == t:
        return path.values[j].copy()
    t0, t1 = times[j - 1], times[j]
    w = (t - t0) / (t1 - t0)
    return (1.0 - w) * path.values[j - 1] + w * path.values[j]


def resample(path: MultivariatePath, times) -> MultivariatePath:
    """Evaluate ``path`` on another grid over the same interval.

    Grid points shared with the original grid are copied bit for bit.
    """
    grid = times if isinstance(times, TimeGrid) else TimeGrid(times)
    if grid == path.grid:
        return path
    values = np.column_stack(
        [np.interp(grid.times, path.times, path.values[:, c]) for c in range(path.d)]
    )
    # np.interp is exact at knots in practice, but guarantee it
    pos = np.searchsorted(path.times, grid.times)
    pos = np.minimum(pos, len(path) - 1)
    hit = path.times[pos] == grid.times
    values[hit] = path.values[pos[hit]]
    return path._replace(grid=grid, values=values)


def project_channels(path: MultivariatePath, keep: Iterable[int]) -> MultivariatePath:
    """Restrict to the channel positions in ``keep`` (original order preserved)."""
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise ValueError("keep at least one channel")
    if keep[0] < 0 or keep[-1] >= path.d:
        raise ValueError(f"channel index out of range for d={path.d}")
    return path._replace(
        values=path.values[:, keep], channels=tuple(path.channels[k] for k in keep)
    )


def zero_pad_augment(path: MultivariatePath, target_dim: int) -> MultivariatePath:
    """Append identically-zero channels up to ``target_dim``."""
    if target_dim < path.d:
        raise ValueError(f"target_dim={target_dim} is below d={path.d}")
    if target_dim == path.d:
        return path
    pad = np.zeros((len(path), target_dim - path.d))
    names = path.channels + tuple(f"pad{j}" for j in range(target_dim - path.d))
    return path._replace(values=np.hstack([path.values, pad]), channels=names)


def lead_lag(path: MultivariatePath) -> MultivariatePath:
    """Lead-lag transform: ``2N+1`` points, lead channels first, then lag.

    The lead copy moves first at each step and the lag copy catches up on
    the following half step. New grid points sit at the midpoints.
    """
    if len(path) < 2:
        raise ValueError("lead-lag needs at least two samples")
    x = path.values
    lead = np.repeat(x, 2, axis=0)[1:]
    lag = np.repeat(x, 2, axis=0)[:-1]
    t = path.times
    times = np.empty(2 * len(t) - 1)
    times[0::2] = t
    times[1::2] = 0.5 * (t[:-1] + t[1:])
    names = tuple(("lead", c) for c in path.channels) + tuple(("lag", c) for c in path.channels)
    return MultivariatePath(TimeGrid(times), np.hstack([lead, lag]), path.label, names)


def time_augment(path: MultivariatePath) -> MultivariatePath:
    """Prepend the timestamp, rescaled to [0, 1], as channel 0."""
    t = path.times
    tau = (t - t[0]) / (t[-1] - t[0])
    return path._replace(
        values=np.column_stack([tau, path.values]), channels=("time",) + path.channels
    )


def make_coherent(paths: Sequence[MultivariatePath], mode: str | None = None) -> list:
    """Bring every vertex to a common channel count.

    Args:
        paths: The vertex collection.
        mode: ``None`` requires equal dimensions already. ``"project"`` keeps
            the channels shared by every vertex. ``"zero-pad"`` pads short
            vertices with zero channels. ``"time"`` prepends a time channel
            to each vertex then zero-pads.

    Raises:
        DimensionCoherenceError: dimensions differ and ``mode`` is None, or
            projection leaves no shared channel.
    """
    paths = list(paths)
    dims = {p.d for p in paths}
    if mode is not None and mode not in COHERENCE_MODES:
        raise ValueError(f"unknown coherence mode {mode!r}; use one of {COHERENCE_MODES}")
    if mode is None:
        if len(dims) > 1:
            raise DimensionCoherenceError(
                f"vertices have channel counts {sorted(dims)}; choose a coherence "
                "mode: 'project' when some vertices miss channels, 'zero-pad' or "
                "'time' (augmentation) when they miss channels or differ in nature"
            )
        return paths
    if mode == "project":
        shared = set(paths[0].channels)
        for p in paths[1:]:
            shared &= set(p.channels)
        if not shared:
            raise DimensionCoherenceError("no channel is shared by every vertex")
        return [
            project_channels(p, [i for i, c in enumerate(p.channels) if c in shared])
            for p in paths
        ]
    if mode == "time":
        paths = [time_augment(p) for p in paths]
    target = max(p.d for p in paths)
    return [zero_pad_augment(p, target) for p in paths]


def common_grid(paths: Sequence[MultivariatePath]) -> TimeGrid:
    """Sorted union of all sampling times; paths must share ``[a, b]``."""
    check_same_interval(paths)
    if all(p.grid == paths[0].grid for p in paths[1:]):
        return paths[0].grid
    return TimeGrid(np.unique(np.concatenate([p.times for p in paths])))


def check_same_interval(paths: Sequence[MultivariatePath]) -> None:
    if not paths:
        raise ValueError("empty vertex collection")
    a, b = paths[0].grid.a, paths[0].grid.b
    for p in paths[1:]:
        if p.grid.a != a or p.grid.b != b:
            raise ValueError(
                f"vertex {p.label!r} spans [{p.grid.a}, {p.grid.b}], expected [{a}, {b}]"
            )


# -- CSV long format: t,entity,channel,value ---------------------------------

CSV_HEADER = ["t", "entity", "channel", "value"]


def _fmt(x: float) -> str:
    return repr(float(x))


def write_paths_csv(paths: Sequence[MultivariatePath], fh) -> None:
    """Write paths in long format, rows sorted by (entity, channel, t)."""
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for p in sorted(paths, key=lambda p: str(p.label)):
        for c, name in enumerate(p.channels):
            for t, v in zip(p.times, p.values[:, c]):
                writer.writerow([_fmt(t), str(p.label), str(name), _fmt(v)])


def read_paths_csv(fh) -> list:
    """Parse the long format back into paths, one per entity.

    Entities keep their first-appearance order. Every channel of an entity
    must be sampled at the same times.

    Raises:
        ParseError: with the offending line number.
    """
    if isinstance(fh, str):
        fh = io.StringIO(fh)
    reader = csv.reader(fh)
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("empty file", 1) from None
    if [h.strip() for h in header] != CSV_HEADER:
        raise ParseError(f"expected header {','.join(CSV_HEADER)}", 1)

    data: dict = {}
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 4:
            raise ParseError(f"expected 4 fields, got {len(row)}", lineno)
        t_s, entity, channel, v_s = row
        try:
            t, v = float(t_s), float(v_s)
        except ValueError:
            raise ParseError(f"non-numeric time or value in {row!r}", lineno) from None
        if not (np.isfinite(t) and np.isfinite(v)):
            raise ParseError("non-finite time or value", lineno)
        chans = data.setdefault(entity, {})
        series = chans.setdefault(channel, ([], [], lineno))
        series[0].append(t)
        series[1].append(v)

    if not data:
        raise ParseError("no data rows", 2)
    paths = []
    for entity, chans in data.items():
        names = list(chans)
        times0 = None
        cols = []
        for name in names:
            ts, vs, first_line = chans[name]
            order = np.argsort(ts, kind="stable")
            ts = np.asarray(ts)[order]
            if times0 is None:
                times0 = ts
            elif not np.array_equal(ts, times0):
                raise ParseError(
                    f"entity {entity!r} channel {name!r} is sampled on different times "
                    "than its other channels", first_line)
            if np.any(np.diff(ts) <= 0):
                raise ParseError(f"duplicate timestamps for entity {entity!r}", first_line)
            if ts.size < 2:
                raise ParseError(f"entity {entity!r} has fewer than two samples", first_line)
            cols.append(np.asarray(vs)[order])
        channels = tuple(int(n) if n.lstrip("-").isdigit() else n for n in names)
        paths.append(MultivariatePath(TimeGrid(times0), np.column_stack(cols), entity, channels))
    return paths
