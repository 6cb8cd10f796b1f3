"""Solution-set quality metrics: min-max scaling, exact 2-D hypervolume,
a Monte-Carlo hypervolume estimator, average per-solution hypervolume,
and the Confidence Uncertainty metric.

All hypervolume computations are minimization-sense.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from moorank import kernels


@dataclass(frozen=True, eq=False)
class ScalingParams:
    """Per-objective (min, max) used for min-max normalization."""

    mins: np.ndarray
    maxs: np.ndarray

    def __post_init__(self):
        mins = np.asarray(self.mins, dtype=np.float64)
        maxs = np.asarray(self.maxs, dtype=np.float64)
        if mins.shape != maxs.shape or mins.ndim != 1:
            raise ValueError("mins and maxs must be matching 1-D arrays")
        if np.any(mins > maxs):
            raise ValueError("each objective min must not exceed its max")
        mins.setflags(write=False)
        maxs.setflags(write=False)
        object.__setattr__(self, "mins", mins)
        object.__setattr__(self, "maxs", maxs)

    @classmethod
    def fit(cls, points) -> "ScalingParams":
        pts = np.asarray(points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[0] == 0:
            raise ValueError("cannot fit scaling on an empty point set")
        return cls(mins=pts.min(axis=0), maxs=pts.max(axis=0))

    def apply(self, points) -> np.ndarray:
        """Map each objective to (y - min) / (max - min); a constant
        objective (max == min) maps to 0."""
        pts = np.asarray(points, dtype=np.float64)
        span = self.maxs - self.mins
        safe = np.where(span > 0.0, span, 1.0)
        scaled = (pts - self.mins) / safe
        return np.where(span > 0.0, scaled, 0.0)


def min_max_scale(points) -> tuple[np.ndarray, ScalingParams]:
    """Scale a point set into the unit box, returning the fitted params."""
    params = ScalingParams.fit(points)
    return params.apply(points), params


@dataclass(frozen=True)
class HypervolumeResult:
    value: float
    reference: tuple[float, ...]
    scaled: bool = False


def hypervolume_2d(points, reference, scaled: bool = False) -> HypervolumeResult:
    """Exact two-objective hypervolume by sort-and-sweep.

    The value is the area of the union of boxes [p, reference]; points
    at or beyond the reference contribute nothing.
    """
    pts = np.asarray(points, dtype=np.float64)
    ref = np.asarray(reference, dtype=np.float64)
    if ref.shape != (2,):
        raise ValueError(f"reference must have 2 components, got shape {ref.shape}")
    if pts.size == 0:
        pts = pts.reshape(0, 2)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError(f"points must be (k, 2), got shape {pts.shape}")
    value = kernels.hypervolume_2d(pts, float(ref[0]), float(ref[1]))
    return HypervolumeResult(value=float(value), reference=(float(ref[0]), float(ref[1])), scaled=scaled)


def hypervolume_mc(
    points, reference, samples: int, seed: int
) -> tuple[float, float]:
    """Monte-Carlo hypervolume estimate and its standard error.

    Uniform samples over the box spanned by the ideal point and the
    reference are classified by direct domination checks against every
    point, so the estimate is independent of the sweep implementation.
    """
    pts = np.asarray(points, dtype=np.float64)
    ref = np.asarray(reference, dtype=np.float64)
    if samples < 1:
        raise ValueError("samples must be positive")
    if pts.size == 0:
        return 0.0, 0.0
    if pts.ndim != 2 or pts.shape[1] != ref.shape[0] or ref.ndim != 1:
        raise ValueError("points and reference dimensions disagree")
    if ref.shape[0] < 2:
        raise ValueError("hypervolume needs at least two objectives")

    lo = np.minimum(pts.min(axis=0), ref)
    box = np.prod(ref - lo)
    if box <= 0.0:
        return 0.0, 0.0

    rng = np.random.default_rng(seed)
    hits = 0
    chunk = 131072
    remaining = samples
    while remaining > 0:
        size = min(chunk, remaining)
        sample = lo + (ref - lo) * rng.random((size, ref.shape[0]))
        dominated = np.zeros(size, dtype=bool)
        for p in pts:
            dominated |= np.all(sample >= p, axis=1)
        hits += int(dominated.sum())
        remaining -= size
    frac = hits / samples
    stderr = float(box * np.sqrt(frac * (1.0 - frac) / samples))
    return float(box * frac), stderr


def average_hypervolume(points, reference) -> float:
    """Mean single-point hypervolume: per point, the box volume to the
    reference with negative extents clamped to zero."""
    pts = np.asarray(points, dtype=np.float64)
    ref = np.asarray(reference, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise ValueError("average hypervolume needs a nonempty point set")
    if pts.shape[1] != ref.shape[0]:
        raise ValueError("points and reference dimensions disagree")
    extents = np.clip(ref - pts, 0.0, None)
    return float(np.mean(np.prod(extents, axis=1)))


@dataclass(frozen=True, eq=False)
class IntervalSet:
    """Per-solution, per-objective 90% interval bounds."""

    lo90: np.ndarray
    hi90: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.lo90, dtype=np.float64)
        hi = np.asarray(self.hi90, dtype=np.float64)
        if lo.shape != hi.shape or lo.ndim != 2:
            raise ValueError("interval bounds must be matching (n, m) arrays")
        if np.any(lo > hi):
            raise ValueError("every lo90 must not exceed its hi90")
        lo.setflags(write=False)
        hi.setflags(write=False)
        object.__setattr__(self, "lo90", lo)
        object.__setattr__(self, "hi90", hi)


def confidence_uncertainty(intervals: IntervalSet) -> tuple[np.ndarray, float]:
    """Per-solution CU and the set mean.

    Interval widths are min-max normalized per objective across the
    solution set (a constant width column normalizes to 0); a solution's
    CU is the product of its normalized widths. Smaller is better.
    """
    widths = intervals.hi90 - intervals.lo90
    if widths.shape[0] == 0:
        raise ValueError("confidence uncertainty needs at least one solution")
    normalized, _ = min_max_scale(widths)
    per_solution = np.prod(normalized, axis=1)
    return per_solution, float(per_solution.mean())
