"""The two optimizers: the dynamic elitist genetic algorithm and the
brute-force multi-objective grid search baseline.

Both sort with the kernel backend; the genetic loop re-evaluates every
surviving design each generation so objective changes are detected the
generation they happen.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from moorank import kernels
from moorank.core import Solution
from moorank.metrics import ScalingParams
from moorank.operators import (
    HypermutationState,
    OperatorParams,
    detect_change,
    draw_distinct_pair,
    hypermutation_tick,
    make_rng,
    polynomial_mutation,
    sbx_crossover,
    tournament_winner,
)
from moorank.problems import DynamicSchedule, ProblemSpec, problem_at


@dataclass(frozen=True)
class RunParams:
    """Genetic run configuration.

    ``hypermutation`` defaults to a boost-to-1.0 controller built on the
    operator mutation rate; when given explicitly, its base rate must
    match ``operators.p_m``. ``history_scaling``, when set, scales
    objectives before the per-generation hypervolume is recorded.
    """

    population_size: int
    generations: int
    operators: OperatorParams
    hypermutation: HypermutationState | None = None
    seed: int = 0
    change_tol: float = 1e-9
    reference: tuple[float, float] = (2.0, 2.0)
    history_scaling: ScalingParams | None = None

    def __post_init__(self):
        if self.population_size < 2:
            raise ValueError("population_size must be at least 2")
        if self.generations < 1:
            raise ValueError("generations must be at least 1")
        if self.change_tol < 0:
            raise ValueError("change_tol must be nonnegative")
        if self.hypermutation is None:
            object.__setattr__(
                self,
                "hypermutation",
                HypermutationState(base_p_m=self.operators.p_m),
            )
        elif self.hypermutation.base_p_m != self.operators.p_m:
            raise ValueError("hypermutation base_p_m must equal operators.p_m")


@dataclass(frozen=True)
class GenerationRecord:
    generation: int
    hypervolume: float
    effective_p_m: float
    feasible_count: int
    front0_size: int
    min_violation: float


@dataclass(frozen=True, eq=False)
class StepFront:
    """Front-0 snapshot at the last generation of one schedule step."""

    step_index: int
    generation: int
    solutions: tuple[Solution, ...]


@dataclass(frozen=True, eq=False)
class RunResult:
    final_pareto: tuple[Solution, ...]
    history: tuple[GenerationRecord, ...]
    wall_time: float
    final_front_feasible: bool
    step_fronts: tuple[StepFront, ...]


def _select_indices(fronts: Sequence[np.ndarray], crowding: np.ndarray, k: int) -> np.ndarray:
    """Rank-then-crowding truncation: whole fronts in rank order, the
    overflowing front by descending crowding, ties by input index."""
    chosen: list[int] = []
    for front in fronts:
        members = [int(i) for i in front]
        if len(chosen) + len(members) <= k:
            chosen.extend(members)
            if len(chosen) == k:
                break
        else:
            members.sort(key=lambda i: (-crowding[i], i))
            chosen.extend(members[: k - len(chosen)])
            break
    return np.asarray(chosen, dtype=np.int64)


def environmental_selection(merged: Sequence[Solution], k: int) -> list[Solution]:
    """Keep at most ``k`` solutions by rank, then crowding distance."""
    if k < 1:
        raise ValueError("k must be positive")
    ranks = []
    crowding = np.empty(len(merged))
    for i, sol in enumerate(merged):
        if sol.rank is None or sol.crowding is None:
            raise ValueError("environmental selection needs fresh rank and crowding")
        ranks.append(sol.rank)
        crowding[i] = sol.crowding
    order = sorted(set(ranks))
    fronts = [np.array([i for i, r in enumerate(ranks) if r == rank]) for rank in order]
    return [merged[i] for i in _select_indices(fronts, crowding, k)]


def _sort_population(
    objectives: np.ndarray, violations: np.ndarray
) -> tuple[list[np.ndarray], np.ndarray, np.ndarray]:
    fronts = kernels.non_dominated_sort(objectives, violations)
    ranks = np.empty(objectives.shape[0], dtype=np.int64)
    crowding = np.empty(objectives.shape[0])
    for rank, front in enumerate(fronts):
        ranks[front] = rank
        crowding[front] = kernels.crowding_distance(objectives[front])
    return fronts, ranks, crowding


def _evaluate(problem: ProblemSpec, designs: np.ndarray, generation: int):
    try:
        result = problem.evaluate_batch(designs)
    except Exception as exc:
        raise RuntimeError(f"objective evaluation failed at generation {generation}: {exc}") from exc
    bad = np.flatnonzero(~np.isfinite(result.canonical).all(axis=1))
    if bad.size:
        raise RuntimeError(
            f"non-finite objective at generation {generation} "
            f"for design {designs[bad[0]].tolist()}"
        )
    return result


def _tournament(
    rng, count: int, violations: np.ndarray, ranks: np.ndarray, crowding: np.ndarray
) -> int:
    i, j = draw_distinct_pair(rng, count)
    pick = tournament_winner(
        violations[i], ranks[i], crowding[i], violations[j], ranks[j], crowding[j]
    )
    return i if pick == 0 else j


def _breed(
    designs: np.ndarray,
    violations: np.ndarray,
    ranks: np.ndarray,
    crowding: np.ndarray,
    params: OperatorParams,
    bounds: np.ndarray,
    rng,
) -> np.ndarray:
    k = designs.shape[0]
    children = np.empty_like(designs)
    filled = 0
    while filled < k:
        a = _tournament(rng, k, violations, ranks, crowding)
        b = _tournament(rng, k, violations, ranks, crowding)
        c1, c2 = sbx_crossover(designs[a], designs[b], params, bounds, rng)
        children[filled] = polynomial_mutation(c1, params, bounds, rng)
        filled += 1
        if filled < k:
            children[filled] = polynomial_mutation(c2, params, bounds, rng)
            filled += 1
    return children


def _snapshot_generations(schedule: DynamicSchedule, total_generations: int) -> dict[int, int]:
    """Map generation index -> 1-based step index for step-front snapshots."""
    out: dict[int, int] = {}
    start = 0
    boundaries = schedule.step_boundaries()
    for idx, end in enumerate(boundaries, start=1):
        if start >= total_generations:
            break
        is_last = idx == len(boundaries)
        effective_end = total_generations if (is_last and total_generations > end) else min(end, total_generations)
        out[effective_end - 1] = idx
        start = end
    return out


def _make_solutions(
    designs: np.ndarray,
    objectives: np.ndarray,
    violations: np.ndarray,
    ranks: np.ndarray,
    crowding: np.ndarray,
    indices: np.ndarray,
) -> tuple[Solution, ...]:
    return tuple(
        Solution(
            design=designs[i],
            objectives=objectives[i],
            violation=float(violations[i]),
            rank=int(ranks[i]),
            crowding=float(crowding[i]),
        )
        for i in indices
    )


def run_do_nsga2(schedule: DynamicSchedule, params: RunParams) -> RunResult:
    """Run the dynamic elitist genetic optimizer over a schedule.

    Each generation: re-evaluate survivors against the active problem,
    detect objective change and tick the hypermutation controller, merge
    with the previous children, sort with constraint bookkeeping, keep
    the best K, record history, and breed the next children. Returns the
    final front 0 (feasible members only, when any exist).
    """
    start_time = time.perf_counter()
    rng = make_rng(params.seed)
    problem = problem_at(schedule, 0)
    k = params.population_size
    bounds = problem.bounds
    lower, upper = bounds[:, 0], bounds[:, 1]
    m = problem.m

    designs = lower + (upper - lower) * rng.random((k, problem.n))
    evaluation = _evaluate(problem, designs, 0)
    objectives, violations = evaluation.canonical, evaluation.violations
    _, ranks, crowding = _sort_population(objectives, violations)

    hyper = params.hypermutation
    assert hyper is not None
    children = _breed(
        designs, violations, ranks, crowding,
        replace(params.operators, p_m=hyper.effective_p_m), bounds, rng,
    )

    snapshots = _snapshot_generations(schedule, params.generations)
    history: list[GenerationRecord] = []
    step_fronts: list[StepFront] = []
    ref0, ref1 = params.reference

    for t in range(1, params.generations + 1):
        gen = t - 1
        problem = problem_at(schedule, gen)

        survivor_eval = _evaluate(problem, designs, gen)
        changed = detect_change(objectives, survivor_eval.canonical, params.change_tol)
        hyper, effective_p_m = hypermutation_tick(hyper, changed)

        child_eval = _evaluate(problem, children, gen)
        merged_designs = np.vstack([designs, children])
        merged_obj = np.vstack([survivor_eval.canonical, child_eval.canonical])
        merged_viol = np.concatenate([survivor_eval.violations, child_eval.violations])

        fronts, ranks_all, crowding_all = _sort_population(merged_obj, merged_viol)
        selected = _select_indices(fronts, crowding_all, k)
        designs = merged_designs[selected]
        objectives = merged_obj[selected]
        violations = merged_viol[selected]
        ranks = ranks_all[selected]
        crowding = crowding_all[selected]

        front0 = np.flatnonzero(ranks == 0)
        if m == 2:
            hv_points = objectives[front0]
            if params.history_scaling is not None:
                hv_points = params.history_scaling.apply(hv_points)
            hv = float(kernels.hypervolume_2d(np.ascontiguousarray(hv_points), ref0, ref1))
        else:
            hv = math.nan
        history.append(
            GenerationRecord(
                generation=gen,
                hypervolume=hv,
                effective_p_m=effective_p_m,
                feasible_count=int(np.count_nonzero(violations == 0.0)),
                front0_size=int(front0.size),
                min_violation=float(violations.min()),
            )
        )

        if gen in snapshots:
            step_fronts.append(
                StepFront(
                    step_index=snapshots[gen],
                    generation=gen,
                    solutions=_make_solutions(
                        designs, objectives, violations, ranks, crowding, front0
                    ),
                )
            )

        if t < params.generations:
            children = _breed(
                designs, violations, ranks, crowding,
                replace(params.operators, p_m=effective_p_m), bounds, rng,
            )

    front0 = np.flatnonzero(ranks == 0)
    feasible_front = front0[violations[front0] == 0.0]
    final_front_feasible = feasible_front.size > 0
    final_indices = feasible_front if final_front_feasible else front0
    final = _make_solutions(designs, objectives, violations, ranks, crowding, final_indices)

    return RunResult(
        final_pareto=final,
        history=tuple(history),
        wall_time=time.perf_counter() - start_time,
        final_front_feasible=final_front_feasible,
        step_fronts=tuple(step_fronts),
    )


@dataclass(frozen=True)
class GridParams:
    """Grid granularity: each variable takes floor(100/inc)+1 evenly
    spaced values between its observed min and max, both inclusive."""

    inc: float
    cap: int = 10_000_000

    def __post_init__(self):
        if not 0.0 < self.inc <= 100.0:
            raise ValueError("inc must be a percentage in (0, 100]")
        if self.cap < 1:
            raise ValueError("cap must be positive")

    @property
    def points_per_variable(self) -> int:
        return math.floor(100.0 / self.inc) + 1


@dataclass(frozen=True, eq=False)
class GridSearchResult:
    solutions: tuple[Solution, ...]
    evaluation_count: int
    feasible: bool  # False means no candidate met the constraints


def run_grid_search(data_bounds, problem: ProblemSpec, grid: GridParams) -> GridSearchResult:
    """Exhaustive grid evaluation followed by a non-dominated filter.

    Candidates that meet the constraints are sorted and front 0 is
    returned. When nothing is feasible, the front of the full evaluated
    set is returned with ``feasible=False`` so the caller still gets the
    best available trade-offs.
    """
    bounds = np.asarray(data_bounds, dtype=np.float64)
    if bounds.shape != (problem.n, 2):
        raise ValueError(f"data_bounds must have shape ({problem.n}, 2), got {bounds.shape}")
    if not np.all(np.isfinite(bounds)):
        raise ValueError("data_bounds must be finite")

    v = grid.points_per_variable
    total = v**problem.n
    if total > grid.cap:
        raise ValueError(f"grid of {total} evaluations exceeds the cap of {grid.cap}")

    axes = [np.linspace(bounds[i, 0], bounds[i, 1], v) for i in range(problem.n)]
    mesh = np.meshgrid(*axes, indexing="ij")
    candidates = np.column_stack([m.reshape(-1) for m in mesh])

    evaluation = _evaluate(problem, candidates, 0)
    if evaluation.feasible.any():
        kept = np.flatnonzero(evaluation.feasible)
        all_feasible = True
    else:
        kept = np.arange(total)
        all_feasible = False

    fronts = kernels.non_dominated_sort(evaluation.canonical[kept], None)
    front0 = kept[fronts[0]]
    crowding = kernels.crowding_distance(evaluation.canonical[front0])
    solutions = tuple(
        Solution(
            design=candidates[i],
            objectives=evaluation.canonical[i],
            violation=float(evaluation.violations[i]),
            rank=0,
            crowding=float(crowding[pos]),
        )
        for pos, i in enumerate(front0)
    )
    return GridSearchResult(solutions=solutions, evaluation_count=total, feasible=all_feasible)
