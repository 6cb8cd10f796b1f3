"""Shared domain types and the min/max sign-convention boundary.

Every algorithm in this package works strictly in minimization sense.
User-facing problems may declare maximization objectives; those are
negated exactly once, at the problem boundary, by :func:`canonicalize`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np


class ObjectiveSense(enum.Enum):
    MINIMIZE = "minimize"
    MAXIMIZE = "maximize"


def as_vector(values, name: str = "vector") -> np.ndarray:
    """Coerce to a 1-D float64 array and reject non-finite entries."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError(f"{name} must be non-empty")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def canonicalize(raw, senses: Sequence[ObjectiveSense]) -> np.ndarray:
    """Map a raw objective vector to internal minimization sense.

    Maximize components are negated, minimize components pass through.
    The operation is its own inverse, so it also maps internal values
    back to user sense.
    """
    arr = np.asarray(raw, dtype=np.float64)
    if arr.shape[-1] != len(senses):
        raise ValueError(
            f"objective vector has {arr.shape[-1]} components but {len(senses)} senses given"
        )
    signs = np.array(
        [-1.0 if s is ObjectiveSense.MAXIMIZE else 1.0 for s in senses]
    )
    return arr * signs


@dataclass(frozen=True, eq=False)
class Solution:
    """One candidate: a design vector with its evaluated objectives.

    ``objectives`` are always minimization-sense. ``rank`` and ``crowding``
    stay ``None`` until a sort pass populates them; reading them before
    that is a bug, not a default.
    """

    design: np.ndarray
    objectives: np.ndarray
    violation: float = 0.0
    rank: int | None = None
    crowding: float | None = None

    def __post_init__(self):
        design = as_vector(self.design, "design")
        objectives = as_vector(self.objectives, "objectives")
        design.setflags(write=False)
        objectives.setflags(write=False)
        object.__setattr__(self, "design", design)
        object.__setattr__(self, "objectives", objectives)
        if self.violation < 0:
            raise ValueError("violation must be nonnegative")

    @property
    def feasible(self) -> bool:
        return self.violation == 0.0
