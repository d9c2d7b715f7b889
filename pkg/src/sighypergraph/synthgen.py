"""Synthetic benchmark: a chain of coupled, delayed 2-D stochastic ODEs.

Vertex ``i`` follows::

    dY_i(t) = B1 Y_i(t-h) + B2 Y_{i-1}(t-h) - B2 Y_{i+1}(t-h) + noise

with ``B1 = [[1, c], [c, 1]]`` and ``B2 = c I``. Only chain neighbours
interact, so the true edge set is ``{(i, i+1)}``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .timeseries import MultivariatePath, TimeGrid

DIM = 2


@dataclass(frozen=True)
class SynthConfig:
    """Generator parameters.

    Attributes:
        n: Number of vertices in the chain.
        c: Coupling constant, nonzero.
        sigma: Standard deviation of the driving noise (per unit time).
        sigma_start: Standard deviation of ``Y_1(0)``.
        h: Delay, a whole number of steps.
        dt: Sampling step on the horizon [0, 1].
        seed: Seed of the generator stream.
    """

    # defaults chosen so the chain signal dominates the driving noise over
    # the unit horizon; weaker coupling leaves edges near chance level
    n: int = 5
    c: float = 1.0
    sigma: float = 0.02
    sigma_start: float = 1.0
    h: float = 0.15
    dt: float = 0.01
    seed: int = 0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("the chain needs n >= 2 vertices")
        if self.c == 0:
            raise ValueError("coupling c must be nonzero (c in R*)")
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.sigma < 0 or self.sigma_start < 0:
            raise ValueError("sigma and sigma_start must be non-negative")
        if self.h < 0:
            raise ValueError("delay h must be non-negative")
        if abs(self.h / self.dt - round(self.h / self.dt)) > 1e-9:
            raise ValueError("delay h must be a whole multiple of dt")
        steps = 1.0 / self.dt
        if abs(steps - round(steps)) > 1e-9:
            raise ValueError("dt must divide the horizon [0, 1]")

    @property
    def n_steps(self) -> int:
        return int(round(1.0 / self.dt))

    @property
    def delay_steps(self) -> int:
        return int(round(self.h / self.dt))


def simulate_dataset(cfg: SynthConfig, rng: np.random.Generator | None = None) -> list:
    """Euler-Maruyama simulation on ``{0, dt, ..., 1}``.

    Noise increments are ``sqrt(dt) * N(0, sigma^2 I)``. Before time 0 every
    vertex sits at its initial value. The chain ends drop the missing
    neighbour term.

    Returns:
        ``n`` two-channel paths labelled ``Y01, Y02, ...``.
    """
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    n, T, lag = cfg.n, cfg.n_steps, cfg.delay_steps
    B1 = np.array([[1.0, cfg.c], [cfg.c, 1.0]])
    c = cfg.c

    Y = np.zeros((T + 1, n, DIM))
    Y[0, 0] = rng.normal(0.0, cfg.sigma_start, size=DIM) if cfg.sigma_start > 0 else 0.0
    noise = rng.normal(0.0, 1.0, size=(T, n, DIM)) * (cfg.sigma * np.sqrt(cfg.dt))
    for s in range(T):
        past = Y[max(s - lag, 0)]
        drift = past @ B1.T
        drift[1:] += c * past[:-1]
        drift[:-1] -= c * past[1:]
        Y[s + 1] = Y[s] + cfg.dt * drift + noise[s]

    grid = TimeGrid.uniform(T)
    width = max(2, len(str(n)))
    return [
        MultivariatePath(grid, Y[:, i, :], f"Y{i + 1:0{width}d}") for i in range(n)
    ]


def ground_truth_adjacency(n: int) -> np.ndarray:
    """Symmetric 0/1 chain adjacency, ones at ``|i - j| == 1``, zero diagonal."""
    if n < 2:
        raise ValueError("n must be >= 2")
    A = np.zeros((n, n), dtype=int)
    i = np.arange(n - 1)
    A[i, i + 1] = A[i + 1, i] = 1
    return A


def truth_edges(n: int) -> list:
    return [[i, i + 1] for i in range(n - 1)]


def dump_ground_truth(n: int, labels=None) -> str:
    doc = {"n": n}
    if labels is not None:
        doc["labels"] = [str(x) for x in labels]
    doc["edges"] = truth_edges(n)
    return json.dumps(doc, indent=2) + "\n"
