"""WordPiece tokenizer trained on the working corpus.

The tokenizer carries a dedicated ``[NL]`` special token so models see
line structure: every newline in the input is surfaced as one token.
"""

from __future__ import annotations

import re
from pathlib import Path

from tokenizers import Tokenizer, models, normalizers, pre_tokenizers, trainers
from transformers import PreTrainedTokenizerFast

NEWLINE_TOKEN = "[NL]"
SPECIAL_TOKENS = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]", NEWLINE_TOKEN]


def mark_newlines(text: str) -> str:
    return text.replace("\n", f" {NEWLINE_TOKEN} ")


def train_wordpiece(texts, vocab_size: int) -> Tokenizer:
    """Train a cased WordPiece tokenizer over the given texts."""
    raw = Tokenizer(models.WordPiece(unk_token="[UNK]"))
    raw.normalizer = normalizers.BertNormalizer(lowercase=False)
    raw.pre_tokenizer = pre_tokenizers.BertPreTokenizer()
    trainer = trainers.WordPieceTrainer(
        vocab_size=vocab_size, special_tokens=SPECIAL_TOKENS
    )
    raw.train_from_iterator((mark_newlines(t) for t in texts), trainer)
    return raw


def wrap(raw: Tokenizer) -> PreTrainedTokenizerFast:
    return PreTrainedTokenizerFast(
        tokenizer_object=raw,
        unk_token="[UNK]",
        pad_token="[PAD]",
        cls_token="[CLS]",
        sep_token="[SEP]",
        mask_token="[MASK]",
        additional_special_tokens=[NEWLINE_TOKEN],
    )


def save_tokenizer(raw: Tokenizer, path: str | Path) -> None:
    raw.save(str(path))


def load_tokenizer(path: str | Path) -> Tokenizer:
    return Tokenizer.from_file(str(path))


_WORD_RE = re.compile(r"\S+")


def word_stream(text: str) -> list[tuple[str, int, int]]:
    """Whitespace words with char spans, with [NL] markers between lines.

    Line indexing matches ``text.splitlines()``: a word belongs to line
    ``i`` iff exactly ``i`` [NL] markers precede it.
    """
    words: list[tuple[str, int, int]] = []
    pos = 0
    lines = text.split("\n")
    for li, line in enumerate(lines):
        for m in _WORD_RE.finditer(line):
            words.append((m.group(0), pos + m.start(), pos + m.end()))
        pos += len(line)
        if li < len(lines) - 1:
            words.append((NEWLINE_TOKEN, pos, pos + 1))
            pos += 1
    return words


def encode_words(
    tok: PreTrainedTokenizerFast, words: list[tuple[str, int, int]]
) -> tuple[list[int], list[int]]:
    """Subword ids plus, per subword, the index of its source word."""
    nl_id = tok.convert_tokens_to_ids(NEWLINE_TOKEN)
    unk_id = tok.unk_token_id
    ids: list[int] = []
    word_index: list[int] = []
    for wi, (word, _, _) in enumerate(words):
        if word == NEWLINE_TOKEN:
            sub = [nl_id]
        else:
            sub = tok(word, add_special_tokens=False)["input_ids"] or [unk_id]
        ids.extend(sub)
        word_index.extend([wi] * len(sub))
    return ids, word_index
