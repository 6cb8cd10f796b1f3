"""Pure numpy implementations of the hot kernels.

Semantics here are the reference: the compiled backend in ``_native.pyx``
must produce bit-identical results (same fronts, same float values) so
that a run is reproducible regardless of which backend is active.
"""

from __future__ import annotations

import numpy as np


def non_dominated_sort(
    objectives: np.ndarray, violations: np.ndarray | None = None
) -> list[np.ndarray]:
    """Partition row indices of ``objectives`` into ranked fronts.

    Minimization-sense dominance. When ``violations`` is given, the
    constrained-domination rule applies: a feasible row dominates any
    infeasible row, and among infeasible rows the smaller violation
    dominates; objective dominance only decides feasible pairs.

    Returns a list of int64 index arrays, ascending index order inside
    each front.
    """
    obj = np.ascontiguousarray(objectives, dtype=np.float64)
    n = obj.shape[0]
    # dom[i, j] is True when row i dominates row j
    less_eq = (obj[:, None, :] <= obj[None, :, :]).all(axis=-1)
    strictly = (obj[:, None, :] < obj[None, :, :]).any(axis=-1)
    dom = less_eq & strictly
    if violations is not None:
        viol = np.ascontiguousarray(violations, dtype=np.float64)
        feas = viol == 0.0
        both_feas = feas[:, None] & feas[None, :]
        cdom = dom & both_feas
        cdom |= feas[:, None] & ~feas[None, :]
        both_inf = ~feas[:, None] & ~feas[None, :]
        cdom |= both_inf & (viol[:, None] < viol[None, :])
        dom = cdom
    np.fill_diagonal(dom, False)

    counts = dom.sum(axis=0)
    assigned = np.zeros(n, dtype=bool)
    fronts: list[np.ndarray] = []
    current = np.flatnonzero(counts == 0)
    while current.size:
        fronts.append(current.astype(np.int64))
        assigned[current] = True
        counts = counts - dom[current].sum(axis=0)
        current = np.flatnonzero(~assigned & (counts == 0))
    return fronts


def crowding_distance(objectives: np.ndarray) -> np.ndarray:
    """Crowding distance of a mutually non-dominated front, input order.

    Boundary solutions on any objective get +inf. Interior solutions
    accumulate the normalized gap between their sorted neighbours; an
    objective whose values are all equal contributes nothing. Ties sort
    stably, i.e. by input index.
    """
    obj = np.ascontiguousarray(objectives, dtype=np.float64)
    n, m = obj.shape
    dist = np.zeros(n)
    if n <= 2:
        dist[:] = np.inf
        return dist
    for j in range(m):
        col = obj[:, j]
        order = np.argsort(col, kind="stable")
        dist[order[0]] = np.inf
        dist[order[-1]] = np.inf
        span = col[order[-1]] - col[order[0]]
        if span > 0.0:
            gaps = (col[order[2:]] - col[order[:-2]]) / span
            dist[order[1:-1]] += gaps
    return dist


def hypervolume_2d(points: np.ndarray, ref0: float, ref1: float) -> float:
    """Exact area dominated by ``points`` and bounded by the reference.

    Sort-and-sweep over f1: each staircase point adds the rectangle
    between itself, the reference, and the best f2 seen so far. Points
    at or beyond the reference contribute nothing.
    """
    pts = np.ascontiguousarray(points, dtype=np.float64)
    if pts.shape[0] == 0:
        return 0.0
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    area = 0.0
    cur_f2 = ref1
    for idx in order:
        p0 = pts[idx, 0]
        p1 = pts[idx, 1]
        if p0 >= ref0 or p1 >= cur_f2:
            continue
        area += (ref0 - p0) * (cur_f2 - p1)
        cur_f2 = p1
    return area
