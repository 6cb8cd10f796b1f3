"""Dominance, fast non-dominated sorting, and crowding distance.

All comparisons are minimization-sense; apply
:func:`moorank.core.canonicalize` first for maximization objectives.
The quadratic sorting work is delegated to the active kernel backend.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from moorank import kernels


class Dominance(enum.Enum):
    A_DOMINATES_B = "a_dominates_b"
    B_DOMINATES_A = "b_dominates_a"
    NON_DOMINATED = "non_dominated"


def dominates(a, b) -> Dominance:
    """Pairwise dominance relation between two objective vectors.

    A dominates B iff A is no worse in every component and strictly
    better in at least one. Identical vectors are mutually non-dominated.
    """
    av = np.asarray(a, dtype=np.float64)
    bv = np.asarray(b, dtype=np.float64)
    if av.shape != bv.shape or av.ndim != 1:
        raise ValueError(f"objective vectors must share one dimension, got {av.shape} vs {bv.shape}")
    if np.all(av <= bv) and np.any(av < bv):
        return Dominance.A_DOMINATES_B
    if np.all(bv <= av) and np.any(bv < av):
        return Dominance.B_DOMINATES_A
    return Dominance.NON_DOMINATED


@dataclass(frozen=True, eq=False)
class FrontPartition:
    """Ranked fronts over a population, front 0 = non-dominated set.

    ``fronts[k]`` holds input indices in ascending order; a solution's
    rank is the index of the front containing it.
    """

    fronts: tuple[np.ndarray, ...]

    def __len__(self) -> int:
        return len(self.fronts)

    @property
    def size(self) -> int:
        return sum(f.size for f in self.fronts)

    def ranks(self) -> np.ndarray:
        """Rank per input index."""
        out = np.empty(self.size, dtype=np.int64)
        for k, front in enumerate(self.fronts):
            out[front] = k
        return out


def fast_non_dominated_sort(
    objectives, violations: np.ndarray | None = None
) -> FrontPartition:
    """Sort objective vectors into ranked non-dominated fronts.

    With ``violations``, constrained domination applies (feasible beats
    infeasible, smaller violation beats larger among infeasible); with
    all-zero or absent violations this is plain objective dominance.
    """
    obj = np.ascontiguousarray(objectives, dtype=np.float64)
    if obj.ndim != 2 or obj.shape[0] == 0:
        raise ValueError("objectives must be a nonempty 2-D array")
    if not np.all(np.isfinite(obj)):
        raise ValueError("objectives contain non-finite values")
    viol = None
    if violations is not None:
        viol = np.ascontiguousarray(violations, dtype=np.float64)
        if viol.shape != (obj.shape[0],):
            raise ValueError("violations must have one entry per objective vector")
    fronts = kernels.non_dominated_sort(obj, viol)
    return FrontPartition(fronts=tuple(fronts))


def crowding_distance(front) -> np.ndarray:
    """Crowding distance for one mutually non-dominated front.

    Returned in input order; boundary solutions per objective get +inf,
    interior solutions sum normalized neighbour gaps. A front of one or
    two solutions is all +inf.
    """
    obj = np.ascontiguousarray(front, dtype=np.float64)
    if obj.ndim != 2 or obj.shape[0] == 0:
        raise ValueError("front must be a nonempty 2-D array")
    return kernels.crowding_distance(obj)
