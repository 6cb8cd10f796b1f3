"""Problem definitions: constrained static problems, dynamic schedules,
the linear article score, and the ZDT1 benchmark.

A constraint expression sees the raw (user-sense) objective vector and
the design vector; algorithms only ever see canonical minimization
objectives plus a scalar violation.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from moorank.core import ObjectiveSense, as_vector, canonicalize

DEFAULT_EQUALITY_TOL = 1e-6


class ConstraintKind(enum.Enum):
    INEQUALITY = "inequality"  # g(x) >= 0
    EQUALITY = "equality"  # h(x) = 0


@dataclass(frozen=True)
class Constraint:
    kind: ConstraintKind
    expression: Callable[[np.ndarray, np.ndarray], float]
    label: str = ""


def evaluate_constraints(
    objectives,
    design,
    constraints: Sequence[Constraint],
    eq_tol: float = DEFAULT_EQUALITY_TOL,
) -> tuple[bool, float]:
    """Feasibility flag and total violation magnitude.

    Violation sums max(0, -g) over inequality constraints and |h| over
    equality constraints. Equality feasibility allows residuals up to
    ``eq_tol`` (exact zero is unattainable in floating point); with only
    inequality constraints, feasible is exactly violation == 0.
    """
    obj = np.asarray(objectives, dtype=np.float64)
    des = np.asarray(design, dtype=np.float64)
    violation = 0.0
    feasible = True
    for c in constraints:
        value = float(c.expression(obj, des))
        if not np.isfinite(value):
            raise ValueError(f"constraint {c.label or '<unlabeled>'} returned non-finite value")
        if c.kind is ConstraintKind.INEQUALITY:
            shortfall = max(0.0, -value)
            violation += shortfall
            if shortfall > 0.0:
                feasible = False
        else:
            residual = abs(value)
            violation += residual
            if residual > eq_tol:
                feasible = False
    return feasible, violation


class BatchEvaluation(NamedTuple):
    """Result of evaluating a design matrix against one problem."""

    canonical: np.ndarray  # (B, m), minimization sense
    violations: np.ndarray  # (B,)
    feasible: np.ndarray  # (B,) bool, equality tolerance applied
    raw: np.ndarray  # (B, m), user sense


@dataclass(frozen=True, eq=False)
class ProblemSpec:
    """The static constrained problem: box bounds, senses, objectives.

    ``objective_fn`` maps one design vector to the raw objective vector;
    ``batch_objective_fn``, when provided, must agree with it row-wise
    and exists purely so vectorizable objectives evaluate in bulk.
    Evaluation must be deterministic and side-effect-free.
    """

    n: int
    bounds: np.ndarray
    m: int
    senses: tuple[ObjectiveSense, ...]
    objective_fn: Callable[[np.ndarray], np.ndarray]
    constraints: tuple[Constraint, ...] = ()
    batch_objective_fn: Callable[[np.ndarray], np.ndarray] | None = None
    eq_tol: float = DEFAULT_EQUALITY_TOL
    name: str = ""

    def __post_init__(self):
        bounds = np.asarray(self.bounds, dtype=np.float64)
        if bounds.shape != (self.n, 2):
            raise ValueError(f"bounds must have shape ({self.n}, 2), got {bounds.shape}")
        if np.any(bounds[:, 0] > bounds[:, 1]):
            raise ValueError("every lower bound must not exceed its upper bound")
        bounds.setflags(write=False)
        object.__setattr__(self, "bounds", bounds)
        if self.m < 1 or len(self.senses) != self.m:
            raise ValueError("senses must list one entry per objective")
        object.__setattr__(self, "constraints", tuple(self.constraints))

    def evaluate_raw_batch(self, designs: np.ndarray) -> np.ndarray:
        """Raw (user-sense) objectives for a (B, n) design matrix."""
        X = np.asarray(designs, dtype=np.float64)
        if self.batch_objective_fn is not None:
            raw = np.asarray(self.batch_objective_fn(X), dtype=np.float64)
        else:
            raw = np.stack([np.asarray(self.objective_fn(x), dtype=np.float64) for x in X])
        if raw.shape != (X.shape[0], self.m):
            raise ValueError(f"objective function returned shape {raw.shape}, expected ({X.shape[0]}, {self.m})")
        return raw

    def evaluate_batch(self, designs: np.ndarray) -> BatchEvaluation:
        """Canonical objectives, violations, feasibility, and raw objectives."""
        X = np.asarray(designs, dtype=np.float64)
        raw = self.evaluate_raw_batch(X)
        violations = np.zeros(X.shape[0])
        feasible = np.ones(X.shape[0], dtype=bool)
        if self.constraints:
            for i in range(X.shape[0]):
                feasible[i], violations[i] = evaluate_constraints(
                    raw[i], X[i], self.constraints, self.eq_tol
                )
        return BatchEvaluation(canonicalize(raw, self.senses), violations, feasible, raw)

    def evaluate(self, design) -> tuple[np.ndarray, float]:
        """Canonical objectives and violation for one design vector."""
        x = as_vector(design, "design")
        result = self.evaluate_batch(x[None, :])
        return result.canonical[0], float(result.violations[0])


@dataclass(frozen=True)
class ScheduleStep:
    duration: int
    problem: ProblemSpec

    def __post_init__(self):
        if self.duration < 1:
            raise ValueError("step duration must be a positive number of generations")


@dataclass(frozen=True)
class DynamicSchedule:
    """Time-indexed sequence of problems; time is counted in generations.

    Only objectives and constraints may change between steps; dimension,
    senses, and bounds are shared so a population carries over.
    """

    steps: tuple[ScheduleStep, ...]

    def __post_init__(self):
        steps = tuple(self.steps)
        if not steps:
            raise ValueError("schedule must contain at least one step")
        first = steps[0].problem
        for s in steps[1:]:
            p = s.problem
            if p.n != first.n or p.m != first.m or p.senses != first.senses:
                raise ValueError("all schedule steps must share n, m, and senses")
            if not np.array_equal(p.bounds, first.bounds):
                raise ValueError("all schedule steps must share bounds")
        object.__setattr__(self, "steps", steps)

    @property
    def total_generations(self) -> int:
        return sum(s.duration for s in self.steps)

    def step_boundaries(self) -> list[int]:
        """Generation index at which each step ends (exclusive)."""
        out, acc = [], 0
        for s in self.steps:
            acc += s.duration
            out.append(acc)
        return out


def static_schedule(problem: ProblemSpec, generations: int) -> DynamicSchedule:
    """A single-step schedule: the static problem as a degenerate dynamic one."""
    return DynamicSchedule(steps=(ScheduleStep(duration=generations, problem=problem),))


def problem_at(schedule: DynamicSchedule, generation: int) -> ProblemSpec:
    """Problem active at a generation; past the end, the last step persists."""
    if generation < 0:
        raise ValueError("generation must be nonnegative")
    acc = 0
    for step in schedule.steps:
        acc += step.duration
        if generation < acc:
            return step.problem
    return schedule.steps[-1].problem


@dataclass(frozen=True)
class ActivitySignal:
    """User-activity counts on one article; freshness in hours (smaller = newer)."""

    freshness: float
    views: float
    likes: float
    comments: float

    def __post_init__(self):
        vals = (self.freshness, self.views, self.likes, self.comments)
        if not all(np.isfinite(v) for v in vals):
            raise ValueError("activity signal contains non-finite values")
        if any(v < 0 for v in vals):
            raise ValueError("activity signal values must be nonnegative")


def article_score(weights: Sequence[float], activity: ActivitySignal) -> float:
    """Linear additive article score over the four activity signals."""
    w = np.asarray(weights, dtype=np.float64)
    if w.shape != (4,):
        raise ValueError("weights must be the four score coefficients")
    if not np.all(np.isfinite(w)):
        raise ValueError("weights contain non-finite values")
    signal = np.array([activity.freshness, activity.views, activity.likes, activity.comments])
    return float(w @ signal)


def zdt1(x) -> np.ndarray:
    """ZDT1 benchmark (minimize both); true front is f2 = 1 - sqrt(f1)."""
    xv = np.asarray(x, dtype=np.float64)
    if xv.ndim != 1 or xv.shape[0] < 2:
        raise ValueError("zdt1 needs at least two variables")
    if np.any(xv < 0.0) or np.any(xv > 1.0):
        raise ValueError("zdt1 input must lie in the unit box")
    f1 = xv[0]
    g = 1.0 + 9.0 * np.sum(xv[1:]) / (xv.shape[0] - 1)
    f2 = g * (1.0 - np.sqrt(f1 / g))
    return np.array([f1, f2])


def _zdt1_batch(X: np.ndarray) -> np.ndarray:
    if np.any(X < 0.0) or np.any(X > 1.0):
        raise ValueError("zdt1 input must lie in the unit box")
    f1 = X[:, 0]
    g = 1.0 + 9.0 * X[:, 1:].sum(axis=1) / (X.shape[1] - 1)
    f2 = g * (1.0 - np.sqrt(f1 / g))
    return np.column_stack([f1, f2])


def zdt1_problem(n: int = 10) -> ProblemSpec:
    """ZDT1 wrapped as a ProblemSpec on the unit box."""
    bounds = np.repeat([[0.0, 1.0]], n, axis=0)
    return ProblemSpec(
        n=n,
        bounds=bounds,
        m=2,
        senses=(ObjectiveSense.MINIMIZE, ObjectiveSense.MINIMIZE),
        objective_fn=zdt1,
        batch_objective_fn=_zdt1_batch,
        name=f"zdt1-n{n}",
    )
