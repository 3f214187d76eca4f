"""Training-sample construction for both scorer tasks."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .config import ScorerConfig
from .tokenization import NEWLINE_TOKEN, encode_words, mark_newlines, word_stream


@dataclass(frozen=True)
class HeaderSample:
    """Fixed-length token window with 1-labels on the header tokens."""

    ids: tuple[int, ...]
    labels: tuple[int, ...]


@dataclass(frozen=True)
class PairSample:
    """Sequence pair around a gap; label 0 = chapter break, 1 = continuation."""

    ids_a: tuple[int, ...]
    ids_b: tuple[int, ...]
    label: int


def _header_token_flags(words, word_index, header_spans) -> list[bool]:
    spans = [(s, e) for s, e, *_ in header_spans]

    def inside(wi: int) -> bool:
        _, ws, we = words[wi]
        return any(ws >= s and we <= e for s, e in spans)

    return [inside(word_index[t]) for t in range(len(word_index))]


def _header_runs(flags: list[bool]) -> list[tuple[int, int]]:
    runs = []
    t = 0
    while t < len(flags):
        if flags[t]:
            u = t
            while u + 1 < len(flags) and flags[u + 1]:
                u += 1
            runs.append((t, u))
            t = u + 1
        else:
            t += 1
    return runs


def header_samples(
    text: str,
    header_spans,
    tok,
    cfg: ScorerConfig,
    rng: random.Random,
) -> list[HeaderSample]:
    """Windows of ``sequence_length`` tokens around each header.

    Each window holds x tokens before the header, the k header tokens,
    and y after, with x + k + y = sequence_length and x drawn uniformly
    per sample so headers do not always sit at the window center.
    """
    words = word_stream(text)
    ids, word_index = encode_words(tok, words)
    flags = _header_token_flags(words, word_index, header_spans)
    seq = cfg.sequence_length
    out = []
    for a, b in _header_runs(flags):
        k = b - a + 1
        if k >= seq or len(ids) < seq:
            continue
        for _ in range(cfg.header_augment):
            x = rng.randint(0, seq - k)
            start = max(0, min(a - x, len(ids) - seq))
            window = ids[start : start + seq]
            labels = [int(flags[start + j]) for j in range(seq)]
            out.append(HeaderSample(tuple(window), tuple(labels)))
    return out


def _paragraph_bounds(sentences, gaps, gap: int) -> tuple[tuple[int, int], tuple[int, int]]:
    """Char spans of the paragraphs immediately before and after a gap."""
    prev = max((g for g in gaps if g < gap), default=-1)
    nxt = min((g for g in gaps if g > gap), default=None)
    before = (sentences[prev + 1][0], sentences[gap][1])
    after_end = sentences[nxt][1] if nxt is not None else sentences[-1][1]
    after = (sentences[gap + 1][0], after_end)
    return before, after


def break_pairs(
    text: str,
    structure: dict,
    chapter_breaks,
    tok,
    cfg: ScorerConfig,
) -> dict[int, PairSample]:
    """One PairSample per paragraph gap of the stripped book.

    single_paragraph: one paragraph from each side of the gap.
    full_window: up to ``side_tokens`` tokens from before and after.
    """
    gaps = list(structure["paragraph_breaks"])
    sentences = structure["sentences"]
    breaks = set(chapter_breaks)

    def side_ids(snippet: str) -> list[int]:
        return tok(mark_newlines(snippet), add_special_tokens=False)["input_ids"]

    out: dict[int, PairSample] = {}
    for gap in gaps:
        if cfg.variant == "single_paragraph":
            (a0, a1), (b0, b1) = _paragraph_bounds(sentences, gaps, gap)
            ids_a = side_ids(text[a0:a1])[-cfg.side_tokens :]
            ids_b = side_ids(text[b0:b1])[: cfg.side_tokens]
        else:
            ids_a = side_ids(text[: sentences[gap][1]])[-cfg.side_tokens :]
            ids_b = side_ids(text[sentences[gap + 1][0] :])[: cfg.side_tokens]
        out[gap] = PairSample(
            tuple(ids_a), tuple(ids_b), 0 if gap in breaks else 1
        )
    return out


def balanced_pair_set(
    pairs_by_book: dict[str, dict[int, PairSample]], rng: random.Random
) -> list[PairSample]:
    """All samples with the minority class repeated to rough balance.

    Negatives (label 0) exist only at chapter boundaries and positives
    only at within-chapter paragraph gaps, so negatives are scarce.
    """
    neg = [
        s for pairs in pairs_by_book.values() for s in pairs.values()
        if s.label == 0
    ]
    pos = [
        s for pairs in pairs_by_book.values() for s in pairs.values()
        if s.label == 1
    ]
    if not neg or not pos:
        raise ValueError("need both break and continuation samples")
    repeat = max(1, round(len(pos) / len(neg)))
    samples = pos + neg * repeat
    rng.shuffle(samples)
    return samples
