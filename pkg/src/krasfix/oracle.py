"""Bisection and grid-scan fixed-point enumeration.

These routines are deliberately simple: they serve as ground truth for the
iterative solvers and share no code path with them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BracketError, ConfigError
from .model import Interval


@dataclass(frozen=True)
class FixedPointSet:
    points: tuple
    grid_resolution: float

    def __iter__(self):
        return iter(self.points)

    def __len__(self):
        return len(self.points)


def bisect_root(f, a, b, tol=1e-12, full_output=False):
    """Halve ``[a, b]`` until its width is at most ``tol``.

    Returns the midpoint of the final bracket (or an endpoint where ``f`` is
    exactly zero).  With ``full_output`` also returns the number of halvings.
    """
    a, b = float(a), float(b)
    if not a < b:
        raise ConfigError(f"bisect_root requires a < b, got {a}, {b}")
    if not tol > 0:
        raise ConfigError("tol must be positive")
    fa, fb = f(a), f(b)
    if fa == 0:
        return (a, 0) if full_output else a
    if fb == 0:
        return (b, 0) if full_output else b
    if (fa > 0) == (fb > 0):
        raise BracketError(a, b, fa, fb)

    steps = 0
    while b - a > tol:
        m = a + (b - a) / 2
        if m <= a or m >= b:
            break  # no representable point left inside the bracket
        fm = f(m)
        steps += 1
        if fm == 0:
            return (m, steps) if full_output else m
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b = m
    root = a + (b - a) / 2
    return (root, steps) if full_output else root


def find_fixed_points(h, interval: Interval, n_grid=4096, tol=1e-13) -> FixedPointSet:
    """Locate fixed points of ``h`` by sign changes of ``h(x) - x``.

    The interval is cut into ``n_grid`` equal cells.  Grid points where
    ``h(x) == x`` exactly are reported as is; every cell whose endpoints
    differ in sign is refined by bisection.  Fixed points where ``h(x) - x``
    touches zero without changing sign are generally missed.  If ``h`` is
    the identity every grid point is returned; callers must special-case it.
    """
    interval.require_finite("find_fixed_points")
    if n_grid < 2:
        raise ConfigError("n_grid must be >= 2")
    xs = np.linspace(interval.lo, interval.hi, int(n_grid) + 1)

    def d(x):
        return h(x) - x

    ds = [d(float(x)) for x in xs]
    found = []
    for i, x in enumerate(xs):
        x = float(x)
        if ds[i] == 0:
            found.append(x)
        elif i + 1 < len(xs) and ds[i + 1] != 0 and (ds[i] > 0) != (ds[i + 1] > 0):
            found.append(bisect_root(d, x, float(xs[i + 1]), tol))

    found.sort()
    points = []
    for p in found:
        if not points or p - points[-1] > tol:
            points.append(p)
    return FixedPointSet(tuple(points), interval.width / n_grid)


def nearest_fixed_point(h, interval: Interval, x0, direction, n_grid=4096, tol=1e-13):
    """The closest fixed point strictly above (``"up"``) or strictly below
    (``"down"``) ``x0``, or ``None``."""
    if not interval.contains(x0):
        raise ConfigError(f"x0 = {x0} is outside the interval")
    points = find_fixed_points(h, interval, n_grid, tol).points
    if direction == "up":
        above = [p for p in points if p > x0]
        return above[0] if above else None
    if direction == "down":
        below = [p for p in points if p < x0]
        return below[-1] if below else None
    raise ConfigError(f"direction must be 'up' or 'down', got {direction!r}")
