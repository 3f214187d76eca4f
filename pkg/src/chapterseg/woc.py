"""Weighted overlap-cut densities, local minima, and break selection.

The density of a candidate break point counts lemma overlaps between
sentence pairs spanning it, weighted down by distance.  For gap ``i``
(between sentences S_i and S_{i+1}) and window ``w``::

    d_i = sum over pairs (x, y) with i-w <= x <= i < y <= x+w of
          overlap(x, y) / (left * right)

where ``overlap`` is the multiset intersection size of the two
sentences' content lemmas and indices outside the book are skipped.

Boundary distance convention: distances are measured in sentence steps
from the gap, with S_i and S_{i+1} both at distance 1, i.e.
``left = i - x + 1`` and ``right = y - i``.  A literal reading that puts
S_i at distance 0 would divide by zero for the pair nearest the gap;
this shift is the minimal total convention and preserves relative
weighting.  Densities are evaluated at paragraph gaps only, but the
window spans sentences.
"""

from __future__ import annotations

import csv
import io
from collections import Counter
from dataclasses import dataclass

import numpy as np

from . import kernels
from .corpus import Book, Sentence
from .segmentation import Segmentation

SUPPORTED_WINDOWS = (50, 100, 150, 200)


@dataclass(frozen=True)
class WocConfig:
    window: int = 200

    def __post_init__(self):
        if self.window < 1:
            raise ValueError(f"window must be >= 1, got {self.window}")


@dataclass(frozen=True)
class DensitySeries:
    """Densities at paragraph gaps plus the located minima."""

    gaps: tuple[int, ...]
    values: tuple[float, ...]
    minima: tuple[tuple[int, float], ...]  # (gap index, prominence)


def sentence_overlap(a: Sentence, b: Sentence, multiset: bool = True) -> int:
    """Number of common content lemmas between two sentences."""
    ca, cb = Counter(a.content_lemmas), Counter(b.content_lemmas)
    if not multiset:
        return len(set(ca) & set(cb))
    return sum((ca & cb).values())


def encode_book(book: Book) -> tuple[np.ndarray, np.ndarray]:
    """Lemmas as sorted int32 id arrays in CSR layout (ids, offsets)."""
    vocab = {}
    for s in book.sentences:
        for lemma in s.content_lemmas:
            vocab.setdefault(lemma, None)
    for i, lemma in enumerate(sorted(vocab)):
        vocab[lemma] = i
    offsets = np.zeros(len(book.sentences) + 1, dtype=np.int64)
    chunks = []
    for k, s in enumerate(book.sentences):
        ids = sorted(vocab[lemma] for lemma in s.content_lemmas)
        chunks.append(np.asarray(ids, dtype=np.int32))
        offsets[k + 1] = offsets[k] + len(ids)
    ids = np.concatenate(chunks) if chunks else np.zeros(0, dtype=np.int32)
    return ids, offsets


def compute_density(book: Book, i: int, config: WocConfig) -> float:
    """Density at a single gap index (IndexError outside [0, N-2])."""
    n = book.n_sentences
    if not 0 <= i <= n - 2:
        raise IndexError(f"gap {i} outside [0, {n - 2}]")
    ids, offsets = encode_book(book)
    out = kernels.density_at_gaps(ids, offsets, np.asarray([i]), config.window)
    return float(out[0])


def density_series(book: Book, config: WocConfig) -> DensitySeries:
    """Densities at every paragraph gap, with minima and prominences."""
    gaps = np.asarray(book.paragraph_breaks, dtype=np.int64)
    if len(gaps) == 0:
        return DensitySeries((), (), ())
    ids, offsets = encode_book(book)
    values = kernels.density_at_gaps(ids, offsets, gaps, config.window)
    minima = find_minima(list(map(int, gaps)), list(map(float, values)))
    return DensitySeries(
        gaps=tuple(int(g) for g in gaps),
        values=tuple(float(v) for v in values),
        minima=tuple(minima),
    )


def find_minima(
    gaps: list[int], values: list[float]
) -> list[tuple[int, float]]:
    """Local minima over the gap-ordered series, with prominences.

    A minimum is strictly below both neighbors; a flat valley yields its
    leftmost point.  Prominence is measured against the lower of the two
    maxima separating the minimum from strictly deeper values (or the
    series ends).
    """
    n = len(values)
    minima_idx = []
    j = 0
    while j < n:
        k = j
        while k + 1 < n and values[k + 1] == values[j]:
            k += 1
        if (
            j > 0
            and k < n - 1
            and values[j - 1] > values[j]
            and values[k + 1] > values[j]
        ):
            minima_idx.append(j)
        j = k + 1
    out = []
    for m in minima_idx:
        v = values[m]
        left_max = v
        i = m - 1
        while i >= 0 and values[i] >= v:
            left_max = max(left_max, values[i])
            i -= 1
        right_max = v
        i = m + 1
        while i < n and values[i] >= v:
            right_max = max(right_max, values[i])
            i += 1
        out.append((gaps[m], min(left_max, right_max) - v))
    return out


def select_breaks(
    minima: list[tuple[int, float]], p: int
) -> Segmentation:
    """The p most prominent minima, as break positions sorted by gap.

    Ties prefer the smaller gap index; if fewer than p minima exist the
    result carries all of them plus a shortfall flag.
    """
    if p < 0:
        raise ValueError("p must be >= 0")
    ranked = sorted(minima, key=lambda gp: (-gp[1], gp[0]))
    chosen = ranked[:p]
    flags = ("shortfall",) if len(chosen) < p else ()
    return Segmentation(
        breaks=tuple(sorted(g for g, _ in chosen)),
        total_cost=None,
        flags=flags,
    )


def density_csv(series: DensitySeries) -> str:
    """CSV dump: gap_index,d_i,is_minimum,prominence."""
    prominences = dict(series.minima)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["gap_index", "d_i", "is_minimum", "prominence"])
    for gap, value in zip(series.gaps, series.values):
        is_min = gap in prominences
        writer.writerow(
            [gap, f"{value:.12g}", int(is_min), f"{prominences.get(gap, 0.0):.12g}"]
        )
    return buf.getvalue()
