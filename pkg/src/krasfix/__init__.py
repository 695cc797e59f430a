"""Damped fixed-point iteration and globally convergent Newton for scalar maps."""

from .engine import (
    ModeReport,
    choose_t,
    classify_start,
    is_monotone,
    iterate,
    iterate_hillam,
    kras_step,
)
from .errors import (
    BracketError,
    ConfigError,
    DerivativeZeroError,
    DomainError,
    EvaluationError,
    KrasfixError,
    PreconditionViolation,
)
from .lipschitz import SlopeEstimate, estimate_lipschitz, estimate_lower_slope
from .model import (
    BudgetExhausted,
    Converged,
    Diverged,
    ExitedInterval,
    Interval,
    IterationConfig,
    IterationTrace,
    RealFunction,
    SlopeBound,
    max_relaxation,
)
from .newton import (
    HypothesisReport,
    check_global_hypotheses,
    g_function,
    g_transform,
    newton_solve,
    newton_step,
)
from .oracle import FixedPointSet, bisect_root, find_fixed_points, nearest_fixed_point

__version__ = "0.1.0"
