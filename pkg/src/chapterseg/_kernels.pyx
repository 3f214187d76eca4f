# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: pair overlaps, overlap-cut density, DP placement.

Contracts match chapterseg._kernels_py exactly.
"""

import numpy as np

BACKEND = "compiled"


cdef inline double _merge_count(const int[:] ids, long a0, long a1,
                                long b0, long b1) nogil:
    cdef long i = a0, j = b0
    cdef double count = 0.0
    while i < a1 and j < b1:
        if ids[i] < ids[j]:
            i += 1
        elif ids[i] > ids[j]:
            j += 1
        else:
            count += 1.0
            i += 1
            j += 1
    return count


def pair_overlaps(ids, offsets, int window):
    """overlaps[d-1, x] = multiset overlap of sentences x and x+d, d<=window."""
    cdef int[:] ids_v = np.ascontiguousarray(ids, dtype=np.int32)
    cdef long[:] off_v = np.ascontiguousarray(offsets, dtype=np.int64)
    cdef long n = off_v.shape[0] - 1
    out = np.zeros((window, n), dtype=np.float64)
    cdef double[:, :] out_v = out
    cdef long x, d, dmax
    with nogil:
        for x in range(n):
            if off_v[x + 1] == off_v[x]:
                continue
            dmax = window if window < n - 1 - x else n - 1 - x
            for d in range(1, dmax + 1):
                out_v[d - 1, x] = _merge_count(
                    ids_v, off_v[x], off_v[x + 1],
                    off_v[x + d], off_v[x + d + 1],
                )
    return out


def density_at_gaps(ids, offsets, gaps, int window):
    """Overlap-cut density at each gap; see the fallback for the contract."""
    cdef long[:] off_v = np.ascontiguousarray(offsets, dtype=np.int64)
    cdef long[:] gaps_v = np.ascontiguousarray(gaps, dtype=np.int64)
    cdef long n = off_v.shape[0] - 1
    overlaps = pair_overlaps(ids, offsets, window)
    cdef double[:, :] ov = overlaps
    out = np.zeros(gaps_v.shape[0], dtype=np.float64)
    cdef double[:] out_v = out
    cdef long gi, gap, a, a_max, x, d, d_hi
    cdef double total, inv_a
    with nogil:
        for gi in range(gaps_v.shape[0]):
            gap = gaps_v[gi]
            total = 0.0
            a_max = window if window < gap + 1 else gap + 1
            for a in range(1, a_max + 1):
                x = gap - a + 1
                d_hi = window if window < n - 1 - x else n - 1 - x
                if d_hi < a:
                    continue
                inv_a = 1.0 / a
                for d in range(a, d_hi + 1):
                    total += ov[d - 1, x] * inv_a / (d - a + 1)
            out_v[gi] = total
    return out


def dp_place(gaps, scores, int p, double alpha, double length, long n):
    """Minimum-cost placement of exactly p breaks; ties prefer the
    earlier predecessor.  Same cost fold as the fallback."""
    cdef long[:] gaps_v = np.ascontiguousarray(gaps, dtype=np.int64)
    cdef double[:] scores_v = np.ascontiguousarray(scores, dtype=np.float64)
    cdef long c = gaps_v.shape[0]
    if p < 1 or p > c:
        raise ValueError(f"need 1 <= p <= {c}, got {p}")
    cdef double oma = 1.0 - alpha
    parents = np.full((p, c), -1, dtype=np.int64)
    cdef long[:, :] parents_v = parents
    best = np.empty(c, dtype=np.float64)
    prev = np.empty(c, dtype=np.float64)
    cdef double[:] best_v = best
    cdef double[:] prev_v = prev
    cdef long j, jp, k, lo, argm
    cdef double t, cand, m

    with nogil:
        for j in range(c):
            t = (gaps_v[j] + 1.0) / length
            best_v[j] = oma * (t * t) - alpha * scores_v[j]

        for k in range(2, p + 1):
            for j in range(c):
                prev_v[j] = best_v[j]
            lo = k - 2
            for j in range(k - 1, c):
                m = 0.0
                argm = -1
                for jp in range(lo, j):
                    t = (gaps_v[j] - gaps_v[jp]) / length
                    cand = prev_v[jp] + oma * (t * t)
                    if argm < 0 or cand < m:
                        m = cand
                        argm = jp
                parents_v[k - 1, j] = argm
                best_v[j] = m - alpha * scores_v[j]

    cdef double total = 0.0
    cdef long jstar = -1
    for j in range(p - 1, c):
        t = ((n - 1) - gaps_v[j]) / length
        cand = best_v[j] + oma * (t * t)
        if jstar < 0 or cand < total:
            total = cand
            jstar = j

    breaks = np.empty(p, dtype=np.int64)
    cdef long[:] breaks_v = breaks
    j = jstar
    for k in range(p, 0, -1):
        breaks_v[k - 1] = gaps_v[j]
        j = parents_v[k - 1, j]
    return total, breaks
