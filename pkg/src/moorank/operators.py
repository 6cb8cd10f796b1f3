"""Genetic variation and selection operators.

Every operator takes an explicit random source so that a fixed seed
gives a bit-identical run. The draw order is part of the contract:

* tournament: two index draws (second redrawn while equal to the first)
* crossover: one coin; if it succeeds, one batch of per-variable u's
* mutation: one batch of per-variable coins, then one batch of u's
  (the u batch is drawn whether or not any coin succeeded)
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from moorank.core import Solution

RandomSource = np.random.Generator


def make_rng(seed: int) -> RandomSource:
    """Seeded uniform variate stream; same seed, same stream."""
    return np.random.default_rng(seed)


@dataclass(frozen=True)
class OperatorParams:
    """Crossover / mutation probabilities and spread factors."""

    p_c: float = 0.9
    eta_c: float = 15.0
    p_m: float = 0.1
    eta_m: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.p_c <= 1.0:
            raise ValueError(f"p_c must be in [0, 1], got {self.p_c}")
        if not 0.0 <= self.p_m <= 1.0:
            raise ValueError(f"p_m must be in [0, 1], got {self.p_m}")
        if not (np.isfinite(self.eta_c) and self.eta_c > 0):
            raise ValueError(f"eta_c must be positive and finite, got {self.eta_c}")
        if not (np.isfinite(self.eta_m) and self.eta_m > 0):
            raise ValueError(f"eta_m must be positive and finite, got {self.eta_m}")


@dataclass(frozen=True)
class HypermutationState:
    """Mutation-rate boost controller for dynamic objectives.

    While ``remaining > 0`` the effective mutation probability is
    ``boosted_p_m``; a detected change re-arms the counter to ``epoch``.
    """

    base_p_m: float
    boosted_p_m: float = 1.0
    epoch: int = 10
    remaining: int = 0

    def __post_init__(self):
        if not 0.0 <= self.base_p_m <= 1.0:
            raise ValueError("base_p_m must be in [0, 1]")
        if not self.base_p_m <= self.boosted_p_m <= 1.0:
            raise ValueError("boosted_p_m must lie in [base_p_m, 1]")
        if self.epoch < 1:
            raise ValueError("epoch must be a positive integer")
        if not 0 <= self.remaining <= self.epoch:
            raise ValueError("remaining must lie in [0, epoch]")

    @property
    def effective_p_m(self) -> float:
        return self.boosted_p_m if self.remaining > 0 else self.base_p_m


def hypermutation_tick(
    state: HypermutationState, changed: bool
) -> tuple[HypermutationState, float]:
    """Advance the hypermutation counter by one generation.

    A change re-arms the boost for ``epoch`` generations; otherwise the
    counter decays toward the base rate. Returns the new state and the
    mutation probability to use this generation.
    """
    if changed:
        new = replace(state, remaining=state.epoch)
    else:
        new = replace(state, remaining=max(0, state.remaining - 1))
    return new, new.effective_p_m


def detect_change(prev, reevaluated, tol: float = 1e-9) -> bool:
    """True iff any objective component moved by more than ``tol``.

    ``reevaluated`` must be the current objective function applied to
    the same designs that produced ``prev``.
    """
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    a = np.asarray(prev, dtype=np.float64)
    b = np.asarray(reevaluated, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"objective lists differ in shape: {a.shape} vs {b.shape}")
    return bool(np.any(np.abs(a - b) > tol))


def _check_bounds(x: np.ndarray, lower: np.ndarray, upper: np.ndarray, who: str) -> None:
    if np.any(x < lower) or np.any(x > upper):
        raise ValueError(f"{who} lies outside the variable bounds")


def sbx_crossover(
    p1,
    p2,
    params: OperatorParams,
    bounds,
    rng: RandomSource,
) -> tuple[np.ndarray, np.ndarray]:
    """Simulated binary crossover of two in-bounds parents.

    With probability 1 - p_c the parents are returned unchanged. On a
    crossover, every variable is recombined with its own u draw through
    the spread factor beta, and children are clamped into the bounds.
    """
    x1 = np.asarray(p1, dtype=np.float64)
    x2 = np.asarray(p2, dtype=np.float64)
    b = np.asarray(bounds, dtype=np.float64)
    lower, upper = b[:, 0], b[:, 1]
    _check_bounds(x1, lower, upper, "parent 1")
    _check_bounds(x2, lower, upper, "parent 2")

    if rng.random() > params.p_c:
        return x1.copy(), x2.copy()

    u = rng.random(x1.shape[0])
    exponent = 1.0 / (params.eta_c + 1.0)
    beta = np.where(
        u <= 0.5,
        (2.0 * u) ** exponent,
        (1.0 / (2.0 * (1.0 - u))) ** exponent,
    )
    c1 = 0.5 * ((1.0 + beta) * x1 + (1.0 - beta) * x2)
    c2 = 0.5 * ((1.0 - beta) * x1 + (1.0 + beta) * x2)
    return np.clip(c1, lower, upper), np.clip(c2, lower, upper)


def polynomial_mutation(
    x,
    params: OperatorParams,
    bounds,
    rng: RandomSource,
) -> np.ndarray:
    """Highly-disruptive polynomial mutation, clamped to bounds.

    Each variable mutates independently with probability p_m. The
    perturbation delta_q is drawn from the polynomial distribution with
    spread eta_m; u = 0.5 leaves the variable exactly unchanged.
    Variables with a degenerate bound (hi == lo) never move.
    """
    xv = np.asarray(x, dtype=np.float64)
    b = np.asarray(bounds, dtype=np.float64)
    lower, upper = b[:, 0], b[:, 1]
    _check_bounds(xv, lower, upper, "mutation input")

    n = xv.shape[0]
    coins = rng.random(n)
    u = rng.random(n)

    span = upper - lower
    live = (coins < params.p_m) & (span > 0.0)
    if not np.any(live):
        return xv.copy()

    safe_span = np.where(span > 0.0, span, 1.0)
    d1 = (xv - lower) / safe_span
    d2 = (upper - xv) / safe_span
    exponent = 1.0 / (params.eta_m + 1.0)
    low_branch = (2.0 * u + (1.0 - 2.0 * u) * (1.0 - d1) ** (params.eta_m + 1.0)) ** exponent - 1.0
    high_branch = 1.0 - (2.0 * (1.0 - u) + 2.0 * (u - 0.5) * (1.0 - d2) ** (params.eta_m + 1.0)) ** exponent
    delta_q = np.where(u <= 0.5, low_branch, high_branch)

    out = xv.copy()
    out[live] = xv[live] + delta_q[live] * span[live]
    return np.clip(out, lower, upper)


def tournament_winner(
    viol_a: float,
    rank_a: int,
    crowd_a: float,
    viol_b: float,
    rank_b: int,
    crowd_b: float,
) -> int:
    """Constraint-dominance cascade; 0 picks the first candidate.

    Feasible beats infeasible, then smaller violation, then lower rank,
    then larger crowding distance; a full tie keeps the first.
    """
    feas_a = viol_a == 0.0
    feas_b = viol_b == 0.0
    if feas_a != feas_b:
        return 0 if feas_a else 1
    if not feas_a:
        if viol_a < viol_b:
            return 0
        if viol_b < viol_a:
            return 1
        return 0
    if rank_a != rank_b:
        return 0 if rank_a < rank_b else 1
    if crowd_a != crowd_b:
        return 0 if crowd_a > crowd_b else 1
    return 0


def draw_distinct_pair(rng: RandomSource, n: int) -> tuple[int, int]:
    """Two distinct uniform indices; the second redraws while it collides."""
    i = int(rng.integers(n))
    j = int(rng.integers(n))
    while j == i:
        j = int(rng.integers(n))
    return i, j


def constrained_tournament_select(pop: Sequence[Solution], rng: RandomSource) -> int:
    """Binary tournament over the population, returning the winner index."""
    if len(pop) < 2:
        raise ValueError("tournament needs a population of at least 2")
    i, j = draw_distinct_pair(rng, len(pop))
    a, b = pop[i], pop[j]
    if a.rank is None or b.rank is None or a.crowding is None or b.crowding is None:
        raise ValueError("tournament candidates lack rank/crowding from a sort pass")
    pick = tournament_winner(a.violation, a.rank, a.crowding, b.violation, b.rank, b.crowding)
    return i if pick == 0 else j
