import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from families import PiecewiseLinear, random_selfmap
from krasfix import (
    BudgetExhausted, ConfigError, Converged, Diverged, DomainError, EvaluationError,
    ExitedInterval, Interval, IterationConfig, PreconditionViolation, RealFunction,
    SlopeBound, choose_t, classify_start, is_monotone, iterate, iterate_hillam, kras_step,
    max_relaxation, nearest_fixed_point,
)

DOTTIE = 0.739085133215160641655
SIN1 = math.sin(1.0)
COS01 = RealFunction(math.cos, Interval(0, 1))
COS_R = RealFunction(math.cos)
IDENT = RealFunction(lambda x: x)


@pytest.mark.parametrize("x,t", [(0.3, 0.1), (-7.0, 1.0), (1e10, 0.5)])
def test_step_identity_map(x, t):
    # exact in real arithmetic; the fixed evaluation order costs a few ulps
    assert abs(kras_step(IDENT, x, t) - x) <= 4 * math.ulp(x)


def test_step_cos():
    assert kras_step(COS_R, 0.0, 0.5) == 0.5
    assert kras_step(COS_R, 0.0, 1.0) == 1.0


def test_step_errors():
    with pytest.raises(DomainError):
        kras_step(COS01, 2.0, 0.5)
    with pytest.raises(ConfigError):
        kras_step(COS01, 0.5, 0.0)
    with pytest.raises(EvaluationError):
        kras_step(RealFunction(math.log), -1.0, 0.5)


def test_classify_start():
    r = classify_start(COS_R, 0.0, 1e-12)
    assert (r.initial_sign, r.direction) == ("above", "increasing")
    r = classify_start(COS_R, 1.0, 1e-12)
    assert (r.initial_sign, r.direction) == ("below", "decreasing")
    r = classify_start(IDENT, 0.3, 1e-12)
    assert (r.initial_sign, r.direction) == ("fixed", "stationary")
    assert not r.guaranteed


def test_classify_guaranteed_flag():
    L = SlopeBound(SIN1)
    assert classify_start(COS01, 0.0, 1e-12, t=max_relaxation(L), L=L, self_map=True).guaranteed
    assert not classify_start(COS01, 0.0, 1e-12, t=0.9, L=L, self_map=True).guaranteed
    assert not classify_start(COS_R, 0.0, 1e-12, t=0.1, L=L, self_map=True).guaranteed


def test_choose_t():
    assert choose_t(SlopeBound(1.0), 1.0) == 0.5
    assert choose_t(SlopeBound(0.0), 0.9) == 0.9
    assert choose_t(SlopeBound(SIN1)) == pytest.approx(0.543044125185779494, rel=1e-15)
    with pytest.raises(ConfigError):
        choose_t(SlopeBound(1.0), 0.0)


def test_iterate_cos_converges():
    tr = iterate(COS01, 0.0, IterationConfig(t=0.5430, tol=1e-9))
    assert isinstance(tr.outcome, Converged)
    assert tr.outcome.point == pytest.approx(DOTTIE, abs=1e-8)
    assert abs(math.cos(tr.outcome.point) - tr.outcome.point) <= 1e-9


def test_iterate_diverges_on_real_line():
    tr = iterate(RealFunction(lambda x: x + 1), 0.0,
                 IterationConfig(t=0.5, divergence_threshold=1e8))
    assert tr.outcome == Diverged("+inf", tr.iterates[-1])


def test_iterate_diverges_past_threshold():
    tr = iterate(RealFunction(lambda x: 2 * x), 1.0,
                 IterationConfig(t=1.0, divergence_threshold=1e6))
    assert isinstance(tr.outcome, Diverged)
    assert abs(tr.outcome.last) > 1e6


def test_iterate_exits_interval():
    tr = iterate(RealFunction(lambda x: x + 1, Interval(0, 1)), 0.5, IterationConfig(t=0.5))
    assert isinstance(tr.outcome, ExitedInterval)
    assert tr.outcome.side == "above"
    assert tr.values[-1] is None


def test_iterate_exits_half_line_below():
    tr = iterate(RealFunction(lambda x: x - 1, Interval(0, math.inf)), 3.0, IterationConfig(t=0.5))
    assert tr.outcome.kind == "exited_interval" and tr.outcome.side == "below"


def test_budget_exhausted_when_fixed_point_far_ahead():
    # fixed point at 1e6, too far for the budget; the escape scan must see it
    h = RealFunction(lambda x: x + 1e-3 * (1e6 - x))
    tr = iterate(h, 0.0, IterationConfig(t=1.0, max_iter=50))
    assert isinstance(tr.outcome, BudgetExhausted)


def test_budget_exhausted_on_bounded_domain():
    h = RealFunction(lambda x: 0.5 * x + 0.5, Interval(0, 2))
    tr = iterate(h, 0.0, IterationConfig(t=0.01, max_iter=5))
    assert tr.outcome == BudgetExhausted(tr.iterates[-1])


def test_already_fixed():
    tr = iterate(IDENT.with_domain(Interval(0, 1)), 0.25, IterationConfig())
    assert tr.outcome == Converged(0.25, 0.0, 0)
    assert tr.iterates == (0.25,)


def test_eval_error_attaches_partial_trace():
    def h(x):
        if x > 0.7:
            raise ValueError("boom")
        return x + 0.5
    with pytest.raises(EvaluationError) as info:
        iterate(RealFunction(h), 0.0, IterationConfig(t=0.5))
    assert info.value.trace.iterates[:2] == (0.0, 0.25)


def test_hillam_cos():
    L = SlopeBound(SIN1)
    tr = iterate_hillam(COS01, L, 0.0, IterationConfig(t=max_relaxation(L), tol=1e-12))
    assert isinstance(tr.outcome, Converged)
    assert tr.outcome.point == pytest.approx(DOTTIE, abs=1e-10)
    steps = np.diff(tr.iterates)
    assert np.all(steps > 0)


def test_hillam_constant():
    h = RealFunction(lambda x: 0.3, Interval(0, 1))
    tr = iterate_hillam(h, SlopeBound(0.0), 0.9, IterationConfig(t=1.0))
    assert tr.outcome == Converged(0.3, 0.0, 1)


def test_hillam_identity():
    h = IDENT.with_domain(Interval(0, 1))
    tr = iterate_hillam(h, SlopeBound(1.0), 0.25, IterationConfig(t=0.5))
    assert tr.outcome == Converged(0.25, 0.0, 0)


def test_hillam_rejects_large_t():
    with pytest.raises(ConfigError):
        iterate_hillam(COS01, SlopeBound(1.0), 0.0, IterationConfig(t=0.6))


def test_hillam_needs_finite_domain():
    with pytest.raises(ConfigError):
        iterate_hillam(COS_R, SlopeBound(1.0), 0.0, IterationConfig(t=0.5))


def test_hillam_detects_false_self_map():
    h = RealFunction(lambda x: x + 1, Interval(0, 1))
    with pytest.raises(PreconditionViolation) as info:
        iterate_hillam(h, SlopeBound(1.0), 0.5, IterationConfig(t=0.5))
    assert info.value.trace is not None


def test_half_relaxation_is_plain_average():
    xs = np.linspace(-50, 50, 2001)
    for x in xs:
        x = float(x)
        assert kras_step(COS_R, x, 0.5) == (x + math.cos(x)) / 2


@st.composite
def selfmap_and_start(draw):
    seed = draw(st.integers(0, 2 ** 32 - 1))
    rng = np.random.default_rng(seed)
    return random_selfmap(rng), float(draw(st.floats(0, 1)))


@settings(max_examples=60, deadline=None)
@given(selfmap_and_start())
def test_barrier_and_monotonicity(case):
    f, x0 = case
    h = f.function()
    t = max_relaxation(f.lipschitz)
    tr = iterate_hillam(h, SlopeBound(f.lipschitz), x0, IterationConfig(t=t, max_iter=100000))
    assert isinstance(tr.outcome, Converged)
    gap = f(x0) - x0
    exact = f.fixed_points()
    if abs(gap) <= 1e-12:
        return
    if gap > 0:
        c = min(p for p in exact if p > x0)
        assert all(x <= c + 1e-12 for x in tr.iterates)
        assert is_monotone(tr.iterates, 1)
    else:
        c = max(p for p in exact if p < x0)
        assert all(x >= c - 1e-12 for x in tr.iterates)
        assert is_monotone(tr.iterates, -1)
    assert tr.outcome.point == pytest.approx(c, abs=1e-8)


@settings(max_examples=40, deadline=None)
@given(selfmap_and_start())
def test_oracle_agreement(case):
    f, x0 = case
    h = f.function()
    L = SlopeBound(f.lipschitz)
    tr = iterate_hillam(h, L, x0, IterationConfig(t=max_relaxation(L), max_iter=100000))
    mode = classify_start(h, x0, 1e-12)
    if mode.direction == "stationary":
        return
    way = "up" if mode.direction == "increasing" else "down"
    c = nearest_fixed_point(h, h.domain, x0, way)
    assert tr.outcome.point == pytest.approx(c, abs=1e-8)
    # nothing detectable strictly between x0 and the limit
    lo, hi = sorted((x0, tr.outcome.point))
    grid = np.linspace(lo, hi, 513)[1:-1]
    signs = {np.sign(f(float(x)) - float(x)) for x in grid if abs(float(x) - c) > 1e-9}
    assert len(signs) <= 1


@settings(max_examples=60, deadline=None)
@given(st.floats(-1e3, 1e3), st.floats(0.01, 1.0), st.sampled_from(["up", "down", "cos", "pl"]))
def test_trichotomy(x0, t, which):
    if which == "up":
        h = RealFunction(lambda x: x + 1, Interval(-math.inf, 10.0))
    elif which == "down":
        h = RealFunction(lambda x: x - 1, Interval(-5.0, math.inf))
    elif which == "cos":
        h = COS_R
    else:
        f = PiecewiseLinear([-2000, 0, 2000], [-1000, 3, 1000])
        h = RealFunction(f)
    if not h.domain.contains(x0):
        return
    tr = iterate(h, x0, IterationConfig(t=t, max_iter=400, divergence_threshold=1e5))
    kinds = {"converged", "diverged", "exited_interval", "budget_exhausted"}
    assert tr.outcome.kind in kinds
    if tr.outcome.kind == "diverged":
        direction = 1 if tr.outcome.direction == "+inf" else -1
        assert not h.domain.bounded(direction)
    if tr.outcome.kind == "converged":
        p = tr.outcome.point
        assert abs(h(p) - p) <= 1e-12


def test_monotone_helper():
    assert is_monotone([0, 1, 2, 2, 2])
    assert is_monotone([3, 2, 1])
    assert not is_monotone([0, 1, 0.5, 2], 1)
    assert is_monotone([0.0, 1.0, 1.0 - 2 ** -52], 1)
