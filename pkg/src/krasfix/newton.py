"""Newton-Raphson as an averaged fixed-point iteration.

With ``g(x) = x - 2 h(x)/h'(x)`` the Newton step is the midpoint of ``x``
and ``g(x)``.  Where ``h h'' >= 0`` we get ``g' >= -1``, and Newton's method
converges from every point of an interval having the root at one end, as
long as ``h h'`` keeps a fixed sign and ``h'`` does not vanish.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DerivativeZeroError, DomainError, EvaluationError
from .model import (
    BudgetExhausted,
    Converged,
    ExitedInterval,
    Interval,
    IterationConfig,
    IterationTrace,
    RealFunction,
)

DERIVATIVE_ZERO = 1e-300

ROOT_ABOVE = "root_above"  # root at the right end: [a, c]
ROOT_BELOW = "root_below"  # root at the left end: [c, b]

# Condition names in a HypothesisReport.
COND_CURVATURE = "h*h'' >= 0"
COND_SIGN_ABOVE = "h*h' < 0"
COND_SIGN_BELOW = "h*h' > 0"
COND_D1_NONZERO = "h' != 0"
COND_D1_LO = "h'(lo+) != 0"
COND_D1_HI = "h'(hi-) != 0"


def _slope(h, x):
    d = h.derivative(x)
    if abs(d) < DERIVATIVE_ZERO:
        raise DerivativeZeroError(x, d)
    return d


def g_transform(h: RealFunction, x: float) -> float:
    """``x - 2 h(x)/h'(x)``."""
    d = _slope(h, x)
    return x - 2 * h(x) / d


def newton_step(h: RealFunction, x: float) -> float:
    """``x - h(x)/h'(x)``."""
    d = _slope(h, x)
    return x - h(x) / d


@dataclass
class Check:
    name: str
    passed: bool | None  # None: a sample point could not be evaluated
    witnesses: list = field(default_factory=list)

    def to_dict(self):
        return {"condition": self.name, "passed": self.passed, "witnesses": list(self.witnesses)}


@dataclass
class HypothesisReport:
    side: str
    checks: list

    @property
    def overall(self) -> bool:
        return all(c.passed is True for c in self.checks)

    def __getitem__(self, name) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self):
        return {"side": self.side, "overall": self.overall,
                "checks": [c.to_dict() for c in self.checks]}


def sample_points(interval: Interval, n_grid=1024, n_edge=64):
    """Interior grid plus points approaching each endpoint geometrically.

    The closest edge points sit at ``(hi - lo) * 1e-6`` from the endpoints.
    Returns ``(interior, near_lo, near_hi)``; the edge arrays are ordered
    from the endpoint inwards.
    """
    lo, hi = interval.lo, interval.hi
    width = hi - lo
    interior = np.linspace(lo, hi, n_grid + 2)[1:-1]
    offsets = np.geomspace(width * 1e-6, width / (n_grid + 1), n_edge)
    return interior, lo + offsets, hi - offsets


class _Condition:
    def __init__(self, name, test):
        self.name = name
        self.test = test
        self.witnesses = []
        self.indeterminate = False

    def feed(self, x, values):
        if values is None:
            self.indeterminate = True
            return
        if not self.test(*values):
            if len(self.witnesses) < 3:
                self.witnesses.append(x)

    def result(self):
        if self.witnesses:
            passed = False
        elif self.indeterminate:
            passed = None
        else:
            passed = True
        return Check(self.name, passed, self.witnesses)


def check_global_hypotheses(h: RealFunction, interval: Interval, side: str,
                            n_grid=1024, n_edge=64) -> HypothesisReport:
    """Sample the sign conditions that make Newton globally convergent.

    ``side`` is ``"root_above"`` for a root at the right end of the interval
    (``h h' < 0`` required) or ``"root_below"`` for a root at the left end
    (``h h' > 0``).  Both cases also need ``h h'' >= 0``, ``h' != 0`` inside,
    and nonzero one-sided limits of ``h'`` at both ends.  Checking is by
    sampling; each failed condition records up to three witnesses.
    """
    interval.require_finite("check_global_hypotheses")
    if side not in (ROOT_ABOVE, ROOT_BELOW):
        raise ConfigError(f"side must be {ROOT_ABOVE!r} or {ROOT_BELOW!r}, got {side!r}")
    if n_grid < 16:
        raise ConfigError("n_grid must be >= 16")

    if side == ROOT_ABOVE:
        sign = _Condition(COND_SIGN_ABOVE, lambda v, d1, d2: v * d1 < 0)
    else:
        sign = _Condition(COND_SIGN_BELOW, lambda v, d1, d2: v * d1 > 0)
    curvature = _Condition(COND_CURVATURE, lambda v, d1, d2: v * d2 >= 0)
    nonzero = _Condition(COND_D1_NONZERO, lambda v, d1, d2: abs(d1) >= DERIVATIVE_ZERO)
    lo_limit = _Condition(COND_D1_LO, lambda v, d1, d2: abs(d1) >= DERIVATIVE_ZERO)
    hi_limit = _Condition(COND_D1_HI, lambda v, d1, d2: abs(d1) >= DERIVATIVE_ZERO)

    def values(x):
        try:
            return h(x), h.derivative(x), h.second_derivative(x)
        except EvaluationError:
            return None

    interior, near_lo, near_hi = sample_points(interval, n_grid, n_edge)
    # deterministic order: lo edge, interior, hi edge
    for group, edge in ((near_lo, lo_limit), (interior, None), (near_hi[::-1], hi_limit)):
        for x in group:
            x = float(x)
            v = values(x)
            for cond in (curvature, sign, nonzero):
                cond.feed(x, v)
            if edge is not None:
                edge.feed(x, v)

    checks = [c.result() for c in (curvature, sign, nonzero, lo_limit, hi_limit)]
    return HypothesisReport(side, checks)


def newton_solve(h: RealFunction, interval: Interval, x0: float,
                 cfg: IterationConfig = IterationConfig()) -> IterationTrace:
    """Newton iteration from ``x0`` inside ``interval``.

    Converges (root mode) once ``|h(x)| <= tol`` and the last step is at
    most ``tol * max(1, |x|)``, or at an exact zero.  An iterate beyond an
    endpoint (by more than ``cfg.boundary_slack``) ends the run as
    ``ExitedInterval``.  A vanishing derivative raises
    :class:`DerivativeZeroError` carrying the partial trace.  ``cfg.t`` is
    not used.
    """
    if not interval.contains(x0):
        raise DomainError(x0, interval)
    xs = [float(x0)]
    hs = []

    def partial():
        return IterationTrace(tuple(xs), tuple(hs) + (None,) * (len(xs) - len(hs)),
                              None, mode="root")

    def attach(exc):
        exc.trace = partial()
        return exc

    x = xs[0]
    try:
        hx = h(x)
    except EvaluationError as exc:
        raise attach(exc)
    hs.append(hx)
    if abs(hx) <= cfg.tol:
        return IterationTrace((x,), (hx,), Converged(x, abs(hx), 0), mode="root")

    for n in range(1, cfg.max_iter + 1):
        try:
            d = _slope(h, x)
        except (DerivativeZeroError, EvaluationError) as exc:
            raise attach(exc)
        x_new = x - hx / d
        xs.append(x_new)
        slack = cfg.boundary_slack
        if x_new < interval.lo - slack * max(1.0, abs(interval.lo)):
            hs.append(None)
            return IterationTrace(tuple(xs), tuple(hs), ExitedInterval("below", x_new), mode="root")
        if x_new > interval.hi + slack * max(1.0, abs(interval.hi)):
            hs.append(None)
            return IterationTrace(tuple(xs), tuple(hs), ExitedInterval("above", x_new), mode="root")
        try:
            hx_new = h(x_new)
        except EvaluationError as exc:
            raise attach(exc)
        hs.append(hx_new)
        if hx_new == 0 or (abs(hx_new) <= cfg.tol and cfg.step_small(x_new, x)):
            return IterationTrace(tuple(xs), tuple(hs), Converged(x_new, abs(hx_new), n), mode="root")
        x, hx = x_new, hx_new

    return IterationTrace(tuple(xs), tuple(hs), BudgetExhausted(x), mode="root")


def g_function(h: RealFunction, domain: Interval | None = None) -> RealFunction:
    """``g`` as a :class:`RealFunction`, for running the damped engine on it."""
    return RealFunction(lambda x: g_transform(h, x), domain or h.domain, name="g")
