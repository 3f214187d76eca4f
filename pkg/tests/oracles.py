"""Independent reference implementations used to check the package.

Each oracle deliberately takes a different algorithmic route than the
code under test: enumeration instead of DP, quadratic scans instead of
single passes, greedy construction instead of lookup tables.
"""

from __future__ import annotations

import math
import re
from itertools import combinations

import numpy as np

# --------------------------------------------------------------------------
# corpus: paragraph-gap counting by line scanning

def count_paragraph_gaps(text: str) -> int:
    """Number of blank-line separations between non-empty blocks."""
    blocks = 0
    in_block = False
    for line in text.replace("\r\n", "\n").replace("\r", "\n").split("\n"):
        if line.strip():
            if not in_block:
                blocks += 1
            in_block = True
        else:
            in_block = False
    return max(0, blocks - 1)


# --------------------------------------------------------------------------
# roman numerals: greedy subtractive renderer

_GREEDY = (
    (1000, "M"), (900, "CM"), (500, "D"), (400, "CD"), (100, "C"),
    (90, "XC"), (50, "L"), (40, "XL"), (10, "X"), (9, "IX"),
    (5, "V"), (4, "IV"), (1, "I"),
)


def roman_greedy(n: int) -> str:
    out = []
    for value, glyph in _GREEDY:
        while n >= value:
            out.append(glyph)
            n -= value
    return "".join(out)


# --------------------------------------------------------------------------
# WOC: brute-force density and quadratic prominence

def brute_density(book, gap: int, window: int) -> float:
    """Literal double sum over spanning pairs, exact accumulation."""
    n = book.n_sentences
    terms = []
    for x in range(gap - window, gap + 1):
        if x < 0:
            continue
        for y in range(gap + 1, x + window + 1):
            if y > n - 1:
                continue
            cx = dict_count(book.sentences[x].content_lemmas)
            cy = dict_count(book.sentences[y].content_lemmas)
            overlap = sum(min(c, cy.get(w, 0)) for w, c in cx.items())
            if overlap:
                terms.append(overlap / ((gap - x + 1) * (y - gap)))
    return math.fsum(terms)


def dict_count(items) -> dict:
    out: dict = {}
    for it in items:
        out[it] = out.get(it, 0) + 1
    return out


def overlap_band(book, window: int) -> dict:
    """Precomputed pair overlaps for all pairs within ``window``."""
    counters = [dict_count(s.content_lemmas) for s in book.sentences]
    n = book.n_sentences
    band: dict = {}
    for x in range(n):
        cx = counters[x]
        if not cx:
            continue
        for y in range(x + 1, min(x + window, n - 1) + 1):
            cy = counters[y]
            if not cy:
                continue
            ov = sum(min(c, cy.get(w, 0)) for w, c in cx.items())
            if ov:
                band[(x, y)] = ov
    return band


def band_density(band: dict, gap: int, window: int, n: int) -> float:
    """Same double sum as brute_density, over a precomputed band."""
    terms = []
    for x in range(max(0, gap - window), gap + 1):
        for y in range(gap + 1, min(x + window, n - 1) + 1):
            ov = band.get((x, y))
            if ov:
                terms.append(ov / ((gap - x + 1) * (y - gap)))
    return math.fsum(terms)


def prominence_reference(values: list[float]) -> list[tuple[int, float]]:
    """O(n^2) minima + prominences: leftmost-of-plateau minima, contours
    walled by strictly deeper values or the series ends."""
    n = len(values)
    out = []
    for m in range(n):
        v = values[m]
        if m > 0 and values[m - 1] == v:
            continue  # not leftmost of its plateau
        e = m
        while e + 1 < n and values[e + 1] == v:
            e += 1
        if m == 0 or e == n - 1:
            continue
        if not (values[m - 1] > v and values[e + 1] > v):
            continue
        left_wall = None
        for i in range(m - 1, -1, -1):
            if values[i] < v:
                left_wall = i
                break
        left_region = values[(left_wall + 1 if left_wall is not None else 0): m]
        left_max = max(left_region) if left_region else v
        right_wall = None
        for i in range(m + 1, n):
            if values[i] < v:
                right_wall = i
                break
        right_region = values[m + 1 : (right_wall if right_wall is not None else n)]
        right_max = max(right_region) if right_region else v
        out.append((m, min(left_max, right_max) - v))
    return out


# --------------------------------------------------------------------------
# candidate selection: token-level top-k

def topk_candidate_lines(line_texts: list[str], scores: list[float]) -> set[int]:
    tokens = []
    for i, text in enumerate(line_texts):
        for pos in range(len(text.split())):
            tokens.append((-scores[i], i, pos))
    tokens.sort()
    k = math.ceil(0.10 * len(tokens))
    return {i for _, i, _ in tokens[:k]}


# --------------------------------------------------------------------------
# DP: exhaustive enumeration with the same cost fold

def fold_cost(breaks, score_by_gap, alpha, length, n_sentences) -> float:
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


def dp_enumeration(gaps, scores, p, alpha, length, n_sentences):
    """(min cost, tie-canonical breaks): reversed-lexicographically
    smallest placement among the exact argmin set."""
    score_by_gap = dict(zip(gaps, scores))
    best_cost = None
    best_breaks = None
    for combo in combinations(gaps, p):
        cost = fold_cost(combo, score_by_gap, alpha, length, n_sentences)
        key = tuple(reversed(combo))
        if best_cost is None or cost < best_cost or (
            cost == best_cost and key < tuple(reversed(best_breaks))
        ):
            best_cost = cost
            best_breaks = combo
    return best_cost, list(best_breaks)


# --------------------------------------------------------------------------
# metrics: segment-id formulation of Pk and WindowDiff

def segment_ids(breaks, n_sentences: int) -> list[int]:
    ids = []
    seg = 0
    bset = set(breaks)
    for i in range(n_sentences):
        ids.append(seg)
        if i in bset:
            seg += 1
    return ids


def pk_reference(ref_breaks, hyp_breaks, n_sentences: int, k: int) -> float:
    rid = segment_ids(ref_breaks, n_sentences)
    hid = segment_ids(hyp_breaks, n_sentences)
    disagreements = 0
    windows = 0
    for i in range(n_sentences - k):
        same_ref = rid[i] == rid[i + k]
        same_hyp = hid[i] == hid[i + k]
        disagreements += int(same_ref != same_hyp)
        windows += 1
    return disagreements / windows


def wd_reference(ref_breaks, hyp_breaks, n_sentences: int, k: int) -> float:
    rid = segment_ids(ref_breaks, n_sentences)
    hid = segment_ids(hyp_breaks, n_sentences)
    penalties = 0
    windows = 0
    for i in range(n_sentences - k):
        penalties += int((rid[i + k] - rid[i]) != (hid[i + k] - hid[i]))
        windows += 1
    return penalties / windows


# --------------------------------------------------------------------------
# misc

def best_match_key(rule) -> tuple:
    """The documented winner ordering, recomputed from rule metadata."""
    from chapterseg.rules import TITLE_KINDS, ElementKind

    return (
        rule.n_elements,
        int(ElementKind.KEYWORD in rule.elements),
        int(rule.number_kind is not None),
        int(any(k in TITLE_KINDS for k in rule.elements)),
        -rule.index,
    )


def permutation_pvalue(a: list[float], b: list[float], rng, trials: int = 2000) -> float:
    """One-sided p for mean(a) > mean(b) by label permutation."""
    observed = np.mean(a) - np.mean(b)
    pooled = np.asarray(list(a) + list(b))
    na = len(a)
    hits = 0
    for _ in range(trials):
        rng.shuffle(pooled)
        if np.mean(pooled[:na]) - np.mean(pooled[na:]) >= observed:
            hits += 1
    return (hits + 1) / (trials + 1)
