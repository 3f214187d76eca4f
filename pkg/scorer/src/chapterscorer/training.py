"""Training loops for the header and break scorers.

Both consume only the primary pipeline's external files: plain-text
books, ground-truth JSON, and structure JSON dumps.
"""

from __future__ import annotations

import json
import random
from pathlib import Path

import torch

from .config import ScorerConfig
from .data import balanced_pair_set, break_pairs, header_samples
from .modeling import build_pair_model, build_token_model, save_artifact
from .tokenization import train_wordpiece, wrap


def _seed_everything(seed: int):
    random.seed(seed)
    torch.manual_seed(seed)


def _load_corpus(books_dir, truth_dir):
    books = {}
    for path in sorted(Path(books_dir).glob("*.txt")):
        truth_path = Path(truth_dir) / f"{path.stem}.json"
        if not truth_path.exists():
            continue
        books[path.stem] = (
            path.read_text(encoding="utf-8"),
            json.loads(truth_path.read_text(encoding="utf-8")),
        )
    if not books:
        raise ValueError(f"no (book, truth) pairs under {books_dir}")
    return books


def collate_token_batch(batch, pad_id: int):
    width = max(len(s.ids) for s in batch)
    ids = torch.full((len(batch), width), pad_id, dtype=torch.long)
    labels = torch.full((len(batch), width), -100, dtype=torch.long)
    mask = torch.zeros((len(batch), width), dtype=torch.long)
    for i, s in enumerate(batch):
        ids[i, : len(s.ids)] = torch.tensor(s.ids)
        labels[i, : len(s.labels)] = torch.tensor(s.labels)
        mask[i, : len(s.ids)] = 1
    return ids, labels, mask


def collate_pair_batch(batch, cls_id: int, sep_id: int, pad_id: int):
    seqs, types, labels = [], [], []
    for s in batch:
        ids = [cls_id, *s.ids_a, sep_id, *s.ids_b, sep_id]
        tt = [0] * (len(s.ids_a) + 2) + [1] * (len(s.ids_b) + 1)
        seqs.append(ids[:512])
        types.append(tt[:512])
        labels.append(s.label)
    width = max(len(s) for s in seqs)
    ids = torch.full((len(seqs), width), pad_id, dtype=torch.long)
    token_type = torch.zeros((len(seqs), width), dtype=torch.long)
    mask = torch.zeros((len(seqs), width), dtype=torch.long)
    for i, (s, t) in enumerate(zip(seqs, types)):
        ids[i, : len(s)] = torch.tensor(s)
        token_type[i, : len(t)] = torch.tensor(t)
        mask[i, : len(s)] = 1
    return ids, token_type, mask, torch.tensor(labels)


def train_header_model(
    books_dir, truth_dir, out_dir, cfg: ScorerConfig | None = None
) -> dict:
    """Fine-tune token classification to mark header tokens."""
    cfg = cfg or ScorerConfig()
    _seed_everything(cfg.seed)
    rng = random.Random(cfg.seed)
    books = _load_corpus(books_dir, truth_dir)
    raw = train_wordpiece((t for t, _ in books.values()), cfg.vocab_size)
    tok = wrap(raw)
    samples = []
    for text, truth in books.values():
        samples.extend(
            header_samples(text, truth["header_spans"], tok, cfg, rng)
        )
    if not samples:
        raise ValueError("no header samples could be built")
    n_pos = sum(sum(s.labels) for s in samples)
    n_neg = sum(len(s.labels) for s in samples) - n_pos
    weight = min(50.0, n_neg / max(1, n_pos))
    model = build_token_model(cfg, raw.get_vocab_size())
    loss_fn = torch.nn.CrossEntropyLoss(
        weight=torch.tensor([1.0, weight]), ignore_index=-100
    )
    opt = torch.optim.AdamW(model.parameters(), lr=cfg.learning_rate)
    model.train()
    losses = []
    for _ in range(cfg.epochs):
        rng.shuffle(samples)
        total = 0.0
        for i in range(0, len(samples), cfg.batch_size):
            ids, labels, mask = collate_token_batch(
                samples[i : i + cfg.batch_size], tok.pad_token_id
            )
            logits = model(input_ids=ids, attention_mask=mask).logits
            loss = loss_fn(logits.reshape(-1, 2), labels.reshape(-1))
            opt.zero_grad()
            loss.backward()
            opt.step()
            total += float(loss.detach())
        losses.append(total)
    save_artifact(model, raw, cfg, "headers", out_dir)
    return {"samples": len(samples), "epoch_losses": losses}


def train_break_model(
    stripped_dir, truth_dir, structure_dir, out_dir,
    cfg: ScorerConfig | None = None,
) -> dict:
    """Fine-tune next-sentence-style pair classification; class 0 = break."""
    cfg = cfg or ScorerConfig()
    _seed_everything(cfg.seed)
    rng = random.Random(cfg.seed)
    books = _load_corpus(stripped_dir, truth_dir)
    raw = train_wordpiece((t for t, _ in books.values()), cfg.vocab_size)
    tok = wrap(raw)
    pairs_by_book = {}
    for book_id, (text, truth) in books.items():
        structure = json.loads(
            (Path(structure_dir) / f"{book_id}.json").read_text(encoding="utf-8")
        )
        pairs_by_book[book_id] = break_pairs(
            text, structure, truth["chapter_breaks"], tok, cfg
        )
    samples = balanced_pair_set(pairs_by_book, rng)
    model = build_pair_model(cfg, raw.get_vocab_size())
    opt = torch.optim.AdamW(model.parameters(), lr=cfg.learning_rate)
    model.train()
    losses = []
    for _ in range(cfg.epochs):
        rng.shuffle(samples)
        total = 0.0
        for i in range(0, len(samples), cfg.batch_size):
            ids, token_type, mask, labels = collate_pair_batch(
                samples[i : i + cfg.batch_size],
                tok.cls_token_id, tok.sep_token_id, tok.pad_token_id,
            )
            out = model(
                input_ids=ids, token_type_ids=token_type,
                attention_mask=mask, labels=labels,
            )
            opt.zero_grad()
            out.loss.backward()
            opt.step()
            total += float(out.loss.detach())
        losses.append(total)
    save_artifact(model, raw, cfg, "breaks", out_dir)
    return {"samples": len(samples), "epoch_losses": losses}
