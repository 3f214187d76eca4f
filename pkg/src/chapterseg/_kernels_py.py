"""Pure-Python/numpy fallback for the hot kernels.

Same contracts as the compiled chapterseg._kernels module; selected at
import time by chapterseg.kernels when the extension is unavailable or
CHAPTERSEG_PURE_PYTHON is set.
"""

from __future__ import annotations

from collections import Counter

import numpy as np

BACKEND = "python"


def _sentence_counters(ids: np.ndarray, offsets: np.ndarray):
    n = len(offsets) - 1
    return [Counter(ids[offsets[k] : offsets[k + 1]].tolist()) for k in range(n)]


def pair_overlaps(ids, offsets, window: int) -> np.ndarray:
    """overlaps[d-1, x] = multiset overlap of sentences x and x+d, d<=window."""
    ids = np.asarray(ids, dtype=np.int32)
    offsets = np.asarray(offsets, dtype=np.int64)
    n = len(offsets) - 1
    counters = _sentence_counters(ids, offsets)
    out = np.zeros((window, n), dtype=np.float64)
    for x in range(n):
        cx = counters[x]
        if not cx:
            continue
        for d in range(1, min(window, n - 1 - x) + 1):
            cy = counters[x + d]
            if cy:
                out[d - 1, x] = float(sum((cx & cy).values()))
    return out


def density_at_gaps(ids, offsets, gaps, window: int) -> np.ndarray:
    """Overlap-cut density at each gap index in ``gaps``.

    Pairs (x, y) with x <= gap < y and y - x <= window contribute
    overlap(x, y) / (left * right) with left = gap - x + 1 and
    right = y - gap.
    """
    offsets = np.asarray(offsets, dtype=np.int64)
    n = len(offsets) - 1
    overlaps = pair_overlaps(ids, offsets, window)
    inv = 1.0 / np.arange(1, window + 1, dtype=np.float64)
    out = np.zeros(len(gaps), dtype=np.float64)
    for gi, gap in enumerate(gaps):
        total = 0.0
        a_max = min(window, gap + 1)
        for a in range(1, a_max + 1):
            x = gap - a + 1
            d_hi = min(window, n - 1 - x)
            if d_hi < a:
                continue
            col = overlaps[a - 1 : d_hi, x]
            total += inv[a - 1] * float(np.dot(col, inv[: d_hi - a + 1]))
        out[gi] = total
    return out


def dp_place(gaps, scores, p: int, alpha: float, length: float, n: int):
    """Minimum-cost placement of exactly p breaks over candidate gaps.

    Per-segment cost is (1 - alpha) * (len / length)^2 minus
    alpha * score at each chosen break; the first segment is anchored at
    virtual gap -1 and the final segment ends at virtual gap n - 1.
    Ties prefer the earlier predecessor.  Returns (total_cost, breaks).
    """
    gaps = np.asarray(gaps, dtype=np.int64)
    scores = np.asarray(scores, dtype=np.float64)
    c = len(gaps)
    if not 1 <= p <= c:
        raise ValueError(f"need 1 <= p <= {c}, got {p}")
    oma = 1.0 - alpha
    g = gaps.astype(np.float64)
    parents = np.full((p, c), -1, dtype=np.int64)

    t = (g + 1.0) / length
    best = oma * (t * t) - alpha * scores

    for k in range(2, p + 1):
        prev = best
        best = np.full(c, np.inf)
        lo = k - 2  # earliest feasible predecessor index
        for j in range(k - 1, c):
            t = (g[j] - g[lo:j]) / length
            cand = prev[lo:j] + oma * (t * t)
            m = int(np.argmin(cand))
            parents[k - 1, j] = lo + m
            best[j] = cand[m] - alpha * scores[j]

    t = ((n - 1) - g[p - 1 :]) / length
    totals = best[p - 1 :] + oma * (t * t)
    jstar = (p - 1) + int(np.argmin(totals))
    total = float(totals[jstar - (p - 1)])

    breaks = np.empty(p, dtype=np.int64)
    j = jstar
    for k in range(p, 0, -1):
        breaks[k - 1] = gaps[j]
        j = parents[k - 1, j]
    return total, breaks
