"""Inference: per-line header scores and per-gap break scores.

Output JSON matches the score-file formats the segmentation pipeline
consumes: ``{"book_id", "line_scores": [...]}`` aligned to
``splitlines()``, and ``{"book_id", "entries": [[gap, score], ...]}``
over paragraph gaps, raw scores in [0, 1).
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import torch

from .config import ScorerConfig
from .data import PairSample, break_pairs
from .tokenization import NEWLINE_TOKEN, encode_words, word_stream
from .training import collate_pair_batch

MAX_SCORE = 1.0 - 1e-9  # score files carry raw values strictly below 1


def score_header_lines(text: str, model, tok, cfg: ScorerConfig) -> list[float]:
    """Per-line header confidence via sliding-window token scores.

    Windows of ``sequence_length`` tokens slide by ``stride``; per-token
    scores are max-pooled across overlapping windows, mean-pooled from
    subwords to words, and max-pooled from words to lines.
    """
    lines = text.splitlines()
    words = word_stream(text)
    ids, word_index = encode_words(tok, words)
    if not ids:
        return [0.0] * len(lines)
    seq = cfg.sequence_length
    token_scores = np.zeros(len(ids))
    starts = list(range(0, max(1, len(ids) - seq + 1), cfg.stride))
    if starts[-1] + seq < len(ids):
        starts.append(max(0, len(ids) - seq))
    model.eval()
    with torch.no_grad():
        for s in starts:
            window = ids[s : s + seq]
            logits = model(input_ids=torch.tensor([window])).logits[0]
            p = torch.softmax(logits, dim=-1)[:, 1].numpy()
            token_scores[s : s + len(p)] = np.maximum(
                token_scores[s : s + len(p)], p
            )
    word_scores: dict[int, list[float]] = {}
    for t, wi in enumerate(word_index):
        word_scores.setdefault(wi, []).append(float(token_scores[t]))
    line_of_word = []
    li = 0
    for word, _, _ in words:
        line_of_word.append(li)
        if word == NEWLINE_TOKEN:
            li += 1
    out = [0.0] * len(lines)
    for wi, scores in word_scores.items():
        if words[wi][0] == NEWLINE_TOKEN:
            continue
        line = line_of_word[wi]
        out[line] = max(out[line], min(float(np.mean(scores)), MAX_SCORE))
    return out


def score_break_gaps(
    text: str, structure: dict, model, tok, cfg: ScorerConfig
) -> list[tuple[int, float]]:
    """Class-0 (break) probability for every paragraph gap."""
    pairs = break_pairs(text, structure, chapter_breaks=(), tok=tok, cfg=cfg)
    model.eval()
    out = []
    with torch.no_grad():
        for gap in structure["paragraph_breaks"]:
            sample = pairs[gap]
            ids, token_type, mask, _ = collate_pair_batch(
                [PairSample(sample.ids_a, sample.ids_b, 0)],
                tok.cls_token_id, tok.sep_token_id, tok.pad_token_id,
            )
            logits = model(
                input_ids=ids, token_type_ids=token_type, attention_mask=mask
            ).logits
            p0 = float(torch.softmax(logits, dim=-1)[0, 0])
            out.append((int(gap), min(p0, MAX_SCORE)))
    return out


def write_line_scores(book_id: str, scores: list[float], path) -> None:
    payload = {
        "book_id": book_id,
        "line_scores": [round(float(s), 9) for s in scores],
    }
    Path(path).write_text(json.dumps(payload, sort_keys=True), encoding="utf-8")


def write_gap_scores(book_id: str, entries, path) -> None:
    payload = {
        "book_id": book_id,
        "entries": [[int(g), round(float(s), 9)] for g, s in entries],
    }
    Path(path).write_text(json.dumps(payload, sort_keys=True), encoding="utf-8")
