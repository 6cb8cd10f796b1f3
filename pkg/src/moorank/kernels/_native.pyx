# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels.

Must stay bit-identical to ``fallback.py``: same fronts, same float
values, same tie handling (ties resolve by input index everywhere).
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY
from libc.stdlib cimport free, malloc, qsort

cnp.import_array()

ctypedef struct KeyIdx:
    double v0
    double v1
    Py_ssize_t idx


cdef int _cmp_keyidx(const void* a, const void* b) noexcept nogil:
    cdef const KeyIdx* x = <const KeyIdx*> a
    cdef const KeyIdx* y = <const KeyIdx*> b
    if x.v0 < y.v0:
        return -1
    if x.v0 > y.v0:
        return 1
    if x.v1 < y.v1:
        return -1
    if x.v1 > y.v1:
        return 1
    if x.idx < y.idx:
        return -1
    if x.idx > y.idx:
        return 1
    return 0


def non_dominated_sort(objectives, violations=None):
    """See fallback.non_dominated_sort."""
    cdef double[:, ::1] obj = np.ascontiguousarray(objectives, dtype=np.float64)
    cdef Py_ssize_t n = obj.shape[0]
    cdef Py_ssize_t m = obj.shape[1]
    cdef bint constrained = violations is not None
    cdef double[::1] viol
    if constrained:
        viol = np.ascontiguousarray(violations, dtype=np.float64)

    dom_arr = np.zeros((n, n), dtype=np.uint8)
    cdef cnp.uint8_t[:, ::1] dom = dom_arr
    counts_arr = np.zeros(n, dtype=np.int64)
    cdef cnp.int64_t[::1] counts = counts_arr

    cdef Py_ssize_t i, j, k
    cdef double a, b
    cdef bint fi, fj, le_ij, lt_ij, le_ji, lt_ji
    for i in range(n):
        for j in range(i + 1, n):
            if constrained:
                fi = viol[i] == 0.0
                fj = viol[j] == 0.0
                if fi and not fj:
                    dom[i, j] = 1
                    counts[j] += 1
                    continue
                if fj and not fi:
                    dom[j, i] = 1
                    counts[i] += 1
                    continue
                if not fi and not fj:
                    if viol[i] < viol[j]:
                        dom[i, j] = 1
                        counts[j] += 1
                    elif viol[j] < viol[i]:
                        dom[j, i] = 1
                        counts[i] += 1
                    continue
            le_ij = True
            lt_ij = False
            le_ji = True
            lt_ji = False
            for k in range(m):
                a = obj[i, k]
                b = obj[j, k]
                if a < b:
                    lt_ij = True
                    le_ji = False
                elif b < a:
                    lt_ji = True
                    le_ij = False
                if not le_ij and not le_ji:
                    break
            if le_ij and lt_ij:
                dom[i, j] = 1
                counts[j] += 1
            elif le_ji and lt_ji:
                dom[j, i] = 1
                counts[i] += 1

    assigned_arr = np.zeros(n, dtype=np.uint8)
    cdef cnp.uint8_t[::1] assigned = assigned_arr
    cdef cnp.int64_t* buf = <cnp.int64_t*> malloc(n * sizeof(cnp.int64_t))
    if buf == NULL:
        raise MemoryError()
    cdef Py_ssize_t size, f
    fronts = []
    try:
        size = 0
        for i in range(n):
            if counts[i] == 0:
                buf[size] = i
                size += 1
        while size > 0:
            front = np.empty(size, dtype=np.int64)
            for i in range(size):
                front[i] = buf[i]
                assigned[buf[i]] = 1
            fronts.append(front)
            for i in range(size):
                f = buf[i]
                for j in range(n):
                    if dom[f, j]:
                        counts[j] -= 1
            size = 0
            for j in range(n):
                if not assigned[j] and counts[j] == 0:
                    buf[size] = j
                    size += 1
    finally:
        free(buf)
    return fronts


def crowding_distance(objectives):
    """See fallback.crowding_distance."""
    cdef double[:, ::1] obj = np.ascontiguousarray(objectives, dtype=np.float64)
    cdef Py_ssize_t n = obj.shape[0]
    cdef Py_ssize_t m = obj.shape[1]
    dist_arr = np.zeros(n, dtype=np.float64)
    cdef double[::1] dist = dist_arr
    cdef Py_ssize_t i, j
    if n <= 2:
        for i in range(n):
            dist[i] = INFINITY
        return dist_arr

    cdef KeyIdx* keys = <KeyIdx*> malloc(n * sizeof(KeyIdx))
    if keys == NULL:
        raise MemoryError()
    cdef double span
    try:
        for j in range(m):
            for i in range(n):
                keys[i].v0 = obj[i, j]
                keys[i].v1 = 0.0
                keys[i].idx = i
            qsort(keys, n, sizeof(KeyIdx), _cmp_keyidx)
            dist[keys[0].idx] = INFINITY
            dist[keys[n - 1].idx] = INFINITY
            span = keys[n - 1].v0 - keys[0].v0
            if span > 0.0:
                for i in range(1, n - 1):
                    dist[keys[i].idx] += (keys[i + 1].v0 - keys[i - 1].v0) / span
    finally:
        free(keys)
    return dist_arr


def hypervolume_2d(points, double ref0, double ref1):
    """See fallback.hypervolume_2d."""
    cdef double[:, ::1] pts = np.ascontiguousarray(points, dtype=np.float64)
    cdef Py_ssize_t n = pts.shape[0]
    if n == 0:
        return 0.0
    cdef KeyIdx* keys = <KeyIdx*> malloc(n * sizeof(KeyIdx))
    if keys == NULL:
        raise MemoryError()
    cdef Py_ssize_t i
    cdef double area = 0.0
    cdef double cur_f2 = ref1
    cdef double p0, p1
    try:
        for i in range(n):
            keys[i].v0 = pts[i, 0]
            keys[i].v1 = pts[i, 1]
            keys[i].idx = i
        qsort(keys, n, sizeof(KeyIdx), _cmp_keyidx)
        for i in range(n):
            p0 = keys[i].v0
            p1 = keys[i].v1
            if p0 >= ref0 or p1 >= cur_f2:
                continue
            area += (ref0 - p0) * (cur_f2 - p1)
            cur_f2 = p1
    finally:
        free(keys)
    return area
