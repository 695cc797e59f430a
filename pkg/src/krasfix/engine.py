"""Damped fixed-point (Krasnoselskii) iteration ``x <- (1-t) x + t h(x)``.

With ``t <= 1/(1+L)`` for an ``L``-Lipschitz ``h`` (or, more weakly, for
``h`` whose slopes are all ``>= -L``) the iterates move monotonically
towards the nearest fixed point in the direction of ``h(x0) - x0``.  When
no fixed point lies ahead they leave the interval, or on an unbounded side
they run off to infinity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConfigError, DomainError, EvaluationError, PreconditionViolation
from .model import (
    BudgetExhausted,
    Converged,
    Diverged,
    ExitedInterval,
    IterationConfig,
    IterationTrace,
    RealFunction,
    SlopeBound,
    max_relaxation,
)

ESCAPE_SCAN_POINTS = 2048


@dataclass(frozen=True)
class ModeReport:
    initial_sign: str  # "above" (h(x0) > x0), "below" or "fixed"
    guaranteed: bool
    direction: str  # "increasing", "decreasing" or "stationary"

    @property
    def travel(self) -> int:
        return {"increasing": 1, "decreasing": -1}.get(self.direction, 0)


def _relax(x, hx, t):
    # exact displayed form; x + t*(hx - x) rounds differently
    return (1 - t) * x + t * hx


def kras_step(h: RealFunction, x: float, t: float) -> float:
    """One relaxed step ``(1-t)*x + t*h(x)``."""
    if not 0 < t <= 1:
        raise ConfigError(f"t must lie in (0, 1], got {t}")
    if not h.domain.contains(x):
        raise DomainError(x, h.domain)
    return _relax(x, h(x), t)


def choose_t(L: SlopeBound, safety: float = 1.0) -> float:
    """``safety * 1/(1+L)``; use ``safety < 1`` when ``L`` is only an estimate."""
    if not 0 < safety <= 1:
        raise ConfigError(f"safety must lie in (0, 1], got {safety}")
    return safety * max_relaxation(L)


def classify_start(h: RealFunction, x0, tol, t=None, L: Optional[SlopeBound] = None,
                   self_map=False) -> ModeReport:
    """Which way the iteration will travel from ``x0``.

    ``guaranteed`` is set only when the caller vouches that ``h`` maps its
    (bounded) domain into itself and ``t`` respects the bound for ``L``.
    """
    if not h.domain.contains(x0):
        raise DomainError(x0, h.domain)
    gap = h(x0) - x0
    if abs(gap) <= tol:
        sign, direction = "fixed", "stationary"
    elif gap > 0:
        sign, direction = "above", "increasing"
    else:
        sign, direction = "below", "decreasing"
    guaranteed = bool(
        self_map and h.domain.is_finite and L is not None and t is not None
        and 0 < t <= max_relaxation(L)
    )
    return ModeReport(sign, guaranteed, direction)


def _outside(domain, x, slack):
    """-1 if x is below lo, +1 if above hi (beyond slack), else 0."""
    if x < domain.lo - slack * max(1.0, abs(domain.lo)):
        return -1
    if x > domain.hi + slack * max(1.0, abs(domain.hi)):
        return 1
    return 0


def _no_fixed_point_ahead(h, x, direction, threshold):
    """Scan ``h(y) - y`` from ``x`` out to ``direction * threshold``.

    True when every scanned point keeps the sign of ``direction``: no
    crossing of the diagonal is detectable before the threshold.
    """
    target = direction * threshold
    distance = (target - x) * direction
    if distance <= 0:
        return True
    start = min(max(1.0, abs(x)) * 1e-9, distance)
    for d in np.geomspace(start, distance, ESCAPE_SCAN_POINTS):
        y = x + direction * float(d)
        try:
            gap = h(y) - y
        except EvaluationError:
            return False
        if gap * direction <= 0:
            return False
    return True


def _run(h, x0, cfg, guaranteed_mode):
    domain = h.domain
    if not domain.contains(x0):
        raise DomainError(x0, domain)
    xs = [float(x0)]
    hs = []

    def partial():
        return IterationTrace(tuple(xs), tuple(hs) + (None,) * (len(xs) - len(hs)), None)

    def evaluate(x):
        try:
            return h(x)
        except EvaluationError as exc:
            exc.trace = partial()
            raise

    x = xs[0]
    hx = evaluate(x)
    hs.append(hx)
    if abs(hx - x) <= cfg.tol:
        return IterationTrace((x,), (hx,), Converged(x, abs(hx - x), 0))
    travel = 1 if hx > x else -1

    for n in range(1, cfg.max_iter + 1):
        x_new = _relax(x, hx, cfg.t)
        xs.append(x_new)

        side = _outside(domain, x_new, cfg.boundary_slack)
        if side:
            if guaranteed_mode:
                raise PreconditionViolation(
                    f"iterate {x_new!r} left [{domain.lo}, {domain.hi}] at step {n}; "
                    "h is not a self-map or the slope bound is wrong", partial())
            hs.append(None)
            return IterationTrace(tuple(xs), tuple(hs), ExitedInterval(
                "below" if side < 0 else "above", x_new))

        if abs(x_new) > cfg.divergence_threshold and not domain.bounded(1 if x_new > 0 else -1):
            hs.append(None)
            return IterationTrace(tuple(xs), tuple(hs), Diverged(
                "+inf" if x_new > 0 else "-inf", x_new))

        hx_new = evaluate(x_new)
        hs.append(hx_new)
        residual = abs(hx_new - x_new)
        if residual == 0 or (residual <= cfg.tol and cfg.step_small(x_new, x)):
            return IterationTrace(tuple(xs), tuple(hs), Converged(x_new, residual, n))
        x, hx = x_new, hx_new

    # Budget spent.  On an unbounded side, a run that kept moving one way
    # with no fixed point detectable ahead can only go to infinity.
    if (not guaranteed_mode and not domain.bounded(travel)
            and (hx - x) * travel > 0
            and all((b - a) * travel > 0 for a, b in zip(xs, xs[1:]))
            and _no_fixed_point_ahead(h, x, travel, cfg.divergence_threshold)):
        outcome = Diverged("+inf" if travel > 0 else "-inf", x)
    else:
        outcome = BudgetExhausted(x)
    return IterationTrace(tuple(xs), tuple(hs), outcome)


def iterate(h: RealFunction, x0: float, cfg: IterationConfig) -> IterationTrace:
    """Iterate ``x <- (1-t) x + t h(x)`` from ``x0`` and classify the result.

    Stops with

    * ``Converged`` once ``|h(x) - x| <= tol`` and the last step is at most
      ``tol * max(1, |x|)``, or as soon as ``h(x) == x`` exactly;
    * ``ExitedInterval`` when an iterate passes a finite endpoint of
      ``h.domain``;
    * ``Diverged`` when ``|x|`` exceeds ``divergence_threshold`` on an
      unbounded side, or when the budget runs out on a monotone run towards
      an unbounded side with no fixed point detectable up to the threshold;
    * ``BudgetExhausted`` otherwise.

    Any ``t`` in (0, 1] is accepted; nothing is promised when ``t`` exceeds
    ``1/(1+L)``, but the classification stays honest.
    """
    return _run(h, x0, cfg, guaranteed_mode=False)


def iterate_hillam(h: RealFunction, L: SlopeBound, x0: float,
                   cfg: IterationConfig) -> IterationTrace:
    """Guaranteed mode for a self-map of a bounded interval.

    The caller asserts ``h(domain) ⊆ domain`` and that ``L`` bounds the
    slopes of ``h``.  Requires ``cfg.t <= 1/(1+L)``.  The run then converges
    monotonically to the nearest fixed point in the direction of travel;
    an iterate leaving the domain raises :class:`PreconditionViolation`.
    """
    h.domain.require_finite("iterate_hillam")
    bound = max_relaxation(L)
    if cfg.t > bound:
        raise ConfigError(f"t = {cfg.t} exceeds 1/(1+L) = {bound}")
    return _run(h, x0, cfg, guaranteed_mode=True)


def is_monotone(iterates, direction=None, ulps=4) -> bool:
    """Whether a trace moves one way only.

    Backward moves of at most ``ulps`` units in the last place are treated
    as rounding noise at the limit.
    """
    xs = list(iterates)
    if direction is None:
        ups = sum(b > a for a, b in zip(xs, xs[1:]))
        downs = sum(b < a for a, b in zip(xs, xs[1:]))
        direction = 1 if ups >= downs else -1
    for a, b in zip(xs, xs[1:]):
        if (b - a) * direction < 0 and abs(b - a) > ulps * math.ulp(max(abs(a), abs(b))):
            return False
    return True
