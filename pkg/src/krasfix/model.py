"""Value types shared by the solvers: intervals, functions, slope bounds,
iteration settings, outcomes and traces."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, ClassVar, Optional, Union

from .errors import ConfigError, EvaluationError

INF = math.inf


@dataclass(frozen=True)
class Interval:
    """Closed interval ``[lo, hi]``; either endpoint may be infinite."""

    lo: float = -INF
    hi: float = INF

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if math.isnan(lo) or math.isnan(hi):
            raise ConfigError("interval endpoints must not be NaN")
        if not lo < hi:
            raise ConfigError(f"interval requires lo < hi, got [{lo}, {hi}]")
        if lo == INF or hi == -INF:
            raise ConfigError(f"bad interval [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def real_line(cls) -> "Interval":
        return cls(-INF, INF)

    def __contains__(self, x) -> bool:
        return self.contains(x)

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi and not math.isnan(x)

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.lo) and math.isfinite(self.hi)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def bounded(self, direction: int) -> bool:
        """True if the interval has a finite endpoint in ``direction`` (+1 or -1)."""
        return math.isfinite(self.hi if direction > 0 else self.lo)

    def require_finite(self, what="operation"):
        if not self.is_finite:
            raise ConfigError(f"{what} needs a finite interval, got [{self.lo}, {self.hi}]")


def _checked(fn, x, label):
    try:
        y = fn(x)
    except EvaluationError:
        raise
    except (ArithmeticError, ValueError) as exc:
        raise EvaluationError(x, f"{label} failed: {exc}") from exc
    try:
        y = float(y)
    except (TypeError, ValueError) as exc:
        raise EvaluationError(x, f"{label} returned non-real {y!r}") from exc
    if not math.isfinite(y):
        raise EvaluationError(x, f"{label} returned {y}")
    return y


@dataclass(frozen=True)
class RealFunction:
    """A scalar map with its domain and optional first/second derivatives.

    Calling the object evaluates the map.  Any exception raised by the
    evaluator, and any non-finite result, surfaces as
    :class:`~krasfix.errors.EvaluationError`.
    """

    fn: Callable[[float], float]
    domain: Interval = field(default_factory=Interval.real_line)
    d1: Optional[Callable[[float], float]] = None
    d2: Optional[Callable[[float], float]] = None
    name: str = "h"

    def __call__(self, x: float) -> float:
        return _checked(self.fn, x, self.name)

    def derivative(self, x: float) -> float:
        if self.d1 is None:
            raise ConfigError(f"{self.name} has no first derivative")
        return _checked(self.d1, x, f"{self.name}'")

    def second_derivative(self, x: float) -> float:
        if self.d2 is None:
            raise ConfigError(f"{self.name} has no second derivative")
        return _checked(self.d2, x, f"{self.name}''")

    def with_domain(self, domain: Interval) -> "RealFunction":
        return RealFunction(self.fn, domain, self.d1, self.d2, self.name)


TWO_SIDED = "two_sided_lipschitz"
LOWER_ONLY = "lower_only"


@dataclass(frozen=True)
class SlopeBound:
    """Lipschitz constant (``two_sided_lipschitz``) or lower slope bound
    ``slope >= -value`` (``lower_only``)."""

    value: float
    kind: str = TWO_SIDED
    provenance: str = "user"

    def __post_init__(self):
        if not (self.value >= 0 and math.isfinite(self.value)):
            raise ConfigError(f"slope bound must be finite and >= 0, got {self.value}")
        if self.kind not in (TWO_SIDED, LOWER_ONLY):
            raise ConfigError(f"unknown slope bound kind {self.kind!r}")
        if self.provenance not in ("user", "estimated"):
            raise ConfigError(f"unknown provenance {self.provenance!r}")


def max_relaxation(L: Union[SlopeBound, float]) -> float:
    """Largest relaxation ``t`` with guaranteed monotone convergence: ``1/(1+L)``."""
    value = L.value if isinstance(L, SlopeBound) else float(L)
    if not value >= 0:
        raise ConfigError(f"slope bound must be >= 0, got {value}")
    return 1.0 / (1.0 + value)


@dataclass(frozen=True)
class IterationConfig:
    """Settings for one solve.

    ``boundary_slack`` is the relative distance (scaled by
    ``max(1, |endpoint|)``) an iterate may overshoot a finite endpoint before
    the run is classified as having left the interval.
    """

    t: float = 0.5
    tol: float = 1e-12
    max_iter: int = 1000
    divergence_threshold: float = 1e12
    boundary_slack: float = 1e-8

    def __post_init__(self):
        if not 0 < self.t <= 1:
            raise ConfigError(f"t must lie in (0, 1], got {self.t}")
        if not self.tol > 0:
            raise ConfigError(f"tol must be positive, got {self.tol}")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise ConfigError(f"max_iter must be a positive integer, got {self.max_iter}")
        if not self.divergence_threshold > 0:
            raise ConfigError("divergence_threshold must be positive")
        if not self.boundary_slack >= 0:
            raise ConfigError("boundary_slack must be >= 0")

    def step_small(self, x_new: float, x_old: float) -> bool:
        return abs(x_new - x_old) <= self.tol * max(1.0, abs(x_old))


# Outcomes


@dataclass(frozen=True)
class Converged:
    point: float
    residual: float
    iterations: int
    kind: ClassVar[str] = "converged"

    def to_dict(self):
        return {"kind": self.kind, "point": self.point,
                "residual": self.residual, "iterations": self.iterations}


@dataclass(frozen=True)
class Diverged:
    direction: str  # "+inf" or "-inf"
    last: float
    kind: ClassVar[str] = "diverged"

    def to_dict(self):
        return {"kind": self.kind, "direction": self.direction, "last": self.last}


@dataclass(frozen=True)
class ExitedInterval:
    side: str  # "below" (lo) or "above" (hi)
    last: float
    kind: ClassVar[str] = "exited_interval"

    def to_dict(self):
        return {"kind": self.kind, "side": self.side, "last": self.last}


@dataclass(frozen=True)
class BudgetExhausted:
    last: float
    kind: ClassVar[str] = "budget_exhausted"

    def to_dict(self):
        return {"kind": self.kind, "last": self.last}


Outcome = Union[Converged, Diverged, ExitedInterval, BudgetExhausted]


@dataclass(frozen=True)
class IterationTrace:
    """Iterates ``x_0, x_1, ...`` with the map value at each one.

    ``values[n]`` is ``h(x_n)``; it is ``None`` for a final iterate that left
    the domain and was never evaluated.  ``outcome`` is ``None`` only on
    partial traces attached to errors.
    """

    iterates: tuple
    values: tuple
    outcome: Optional[Outcome]
    mode: str = "fixed_point"

    def __post_init__(self):
        if not self.iterates:
            raise ValueError("trace needs at least x0")
        if len(self.values) != len(self.iterates):
            raise ValueError("one value per iterate")

    def __len__(self):
        return len(self.iterates)

    @property
    def steps(self) -> int:
        return len(self.iterates) - 1

    def residual(self, n: int) -> Optional[float]:
        hx = self.values[n]
        if hx is None:
            return None
        return abs(hx) if self.mode == "root" else abs(hx - self.iterates[n])
