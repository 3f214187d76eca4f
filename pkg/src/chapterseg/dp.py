"""Global break placement by dynamic programming.

Places exactly P breaks over the candidate gaps, minimizing

    sum over segments of (1 - alpha) * (segment_len / L)^2
    - alpha * sum of scores at the chosen breaks

where L = N / (P + 1) is the ideal chapter length.  The first segment is
anchored at a virtual boundary before sentence 0 and the last segment
runs to the end of the book, so alpha = 0 yields equidistant breaks.
The squared relative length replaces a linear per-segment charge, which
telescopes to a constant over any placement and therefore cannot prefer
equal segments; squaring is the minimal strictly-convex choice that
matches the per-segment scale at the ideal length.

alpha = 1 reduces to picking the P highest-scoring candidates.  Cost
ties are broken toward the earlier predecessor, making the output
deterministic.  Complexity O(P * C^2) for C candidates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .scores import ScoreSeries
from .segmentation import Segmentation


@dataclass(frozen=True)
class DpConfig:
    alpha: float = 0.8
    p: int = 1

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")
        if self.p < 0:
            raise ValueError("p must be >= 0")


def ideal_length(n_sentences: int, p: int) -> float:
    return n_sentences / (p + 1)


def segment(
    candidates: ScoreSeries, config: DpConfig, n_sentences: int
) -> Segmentation:
    """Optimal placement of config.p breaks among the candidate gaps.

    If fewer candidates than breaks exist, all candidates are used and
    the result is flagged "insufficient-candidates".
    """
    if n_sentences < 1:
        raise ValueError("n_sentences must be >= 1")
    length = ideal_length(n_sentences, config.p)
    p = config.p
    gaps = np.asarray(candidates.gaps, dtype=np.int64)
    values = np.asarray(candidates.values, dtype=np.float64)
    flags: tuple[str, ...] = ()
    if p == 0:
        total = (1.0 - config.alpha) * (n_sentences / length) ** 2
        return Segmentation(breaks=(), total_cost=float(total), flags=())
    if len(gaps) == 0:
        raise ValueError("no candidates supplied for p > 0")
    if len(gaps) < p:
        # best effort: use every candidate; L keeps the requested P
        flags = ("insufficient-candidates",)
        p = len(gaps)
    total, breaks = kernels.dp_place(
        gaps, values, p, config.alpha, length, n_sentences
    )
    return Segmentation(
        breaks=tuple(int(b) for b in breaks),
        total_cost=float(total),
        flags=flags,
    )


def placement_cost(
    breaks: list[int],
    score_by_gap: dict[int, float],
    alpha: float,
    length: float,
    n_sentences: int,
) -> float:
    """Total cost of a concrete placement, folded in DP evaluation order."""
    oma = 1.0 - alpha
    total = 0.0
    prev = -1
    for b in breaks:
        t = (b - prev) / length
        total = total + oma * (t * t)
        total = total - alpha * score_by_gap[b]
        prev = b
    t = ((n_sentences - 1) - prev) / length
    return total + oma * (t * t)
