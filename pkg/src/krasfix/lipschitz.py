"""Sampled slope bounds.

Every estimate here is a maximum over finitely many difference quotients,
so it can only under-report the true constant.  Callers that need the
convergence guarantee should pass a safety factor below 1 to
:func:`krasfix.engine.choose_t`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .model import LOWER_ONLY, TWO_SIDED, Interval, SlopeBound

DEFAULT_SEED = 20240101
# random pairs closer than this (relative to the interval width) are skipped
MIN_PAIR_SEPARATION = 1e-4
GUARANTEE_SAFETY = 0.8


@dataclass(frozen=True)
class SlopeEstimate:
    bound: SlopeBound
    n_samples: int
    refinement_history: tuple
    seed: int = DEFAULT_SEED

    @property
    def value(self) -> float:
        return self.bound.value

    def to_dict(self):
        return {
            "kind": self.bound.kind,
            "value": self.bound.value,
            "provenance": self.bound.provenance,
            "n_samples": self.n_samples,
            "seed": self.seed,
            "refinement_history": list(self.refinement_history),
        }


def _levels(n_grid):
    """Grid sizes n_grid, n_grid/2, ... down to 2, coarsest first.

    Each coarser grid is a subset of the finer one, so the maximum slope can
    only grow along the sequence.
    """
    levels = [n_grid]
    while levels[-1] % 2 == 0 and levels[-1] > 2:
        levels.append(levels[-1] // 2)
    return levels[::-1]


def _slopes(h, interval, n_cells, pairs):
    xs = np.linspace(interval.lo, interval.hi, n_cells + 1)
    ys = np.array([h(float(x)) for x in xs])
    adjacent = np.diff(ys) / np.diff(xs)
    if len(pairs) == 0:
        return adjacent, len(xs)
    u, v = pairs[:, 0], pairs[:, 1]
    hu = np.array([h(float(x)) for x in u])
    hv = np.array([h(float(x)) for x in v])
    return np.concatenate([adjacent, (hu - hv) / (u - v)]), len(xs) + 2 * len(u)


def _random_pairs(interval, count, seed):
    # draws are sequential, so a smaller count yields a prefix of a larger one
    rng = np.random.default_rng(seed)
    raw = interval.lo + interval.width * rng.random((count, 2))
    keep = np.abs(raw[:, 0] - raw[:, 1]) >= MIN_PAIR_SEPARATION * interval.width
    return raw[keep]


def _estimate(h, interval, n_grid, seed, reduce):
    interval.require_finite("slope estimation")
    n_grid = int(n_grid)
    if n_grid < 2:
        raise ConfigError("n_grid must be >= 2")
    pairs = _random_pairs(interval, n_grid, seed)
    history = []
    best = 0.0
    n_samples = 0
    for level in _levels(n_grid):
        slopes, n_samples = _slopes(h, interval, level, pairs if level == n_grid else pairs[:0])
        best = max(best, reduce(slopes))
        history.append(best)
    return best, n_samples, tuple(history)


def estimate_lipschitz(h, interval: Interval, n_grid=1024, seed=DEFAULT_SEED) -> SlopeEstimate:
    """Largest ``|h(x) - h(y)| / |x - y|`` over a uniform grid of ``n_grid``
    cells (adjacent pairs) and ``n_grid`` seeded random pairs.

    ``refinement_history`` lists the running maximum over successively
    halved grids, coarsest first; its last entry is the estimate.
    """
    value, n, history = _estimate(h, interval, n_grid, seed,
                                  lambda s: float(np.max(np.abs(s))))
    return SlopeEstimate(SlopeBound(value, TWO_SIDED, "estimated"), n, history, seed)


def estimate_lower_slope(h, interval: Interval, n_grid=1024, seed=DEFAULT_SEED) -> SlopeEstimate:
    """``max(0, -min slope)`` over the same pairs as :func:`estimate_lipschitz`;
    0 for nondecreasing ``h``."""
    value, n, history = _estimate(h, interval, n_grid, seed,
                                  lambda s: max(0.0, -float(np.min(s))))
    return SlopeEstimate(SlopeBound(value, LOWER_ONLY, "estimated"), n, history, seed)
