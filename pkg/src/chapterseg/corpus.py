"""Plain-text book loading, sentence/paragraph indexing, and lemmatization.

A book is modeled as an ordered list of sentences plus the set of
*paragraph breaks*: gap index ``i`` names the point between sentence
``S_i`` and ``S_{i+1}``, and is a paragraph break when the source text had
two or more newline characters (a blank line) between them.  All
downstream break-point math works on these gap indices.
"""

from __future__ import annotations

import json
import re
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

from ._stopwords import STOPWORDS
from .errors import EmptyBookError, SchemaError

DEFAULT_ABBREVIATIONS = frozenset(
    """mr mrs ms dr st prof capt col gen maj lt sgt rev hon vs etc jr sr no
    vol ch sec fig op cf al e.g i.e""".split()
)


@dataclass(frozen=True)
class TokenizerConfig:
    """Knobs for sentence splitting and lemma extraction."""

    abbreviations: frozenset[str] = DEFAULT_ABBREVIATIONS
    lemma_multiset: bool = True  # False -> set semantics for content_lemmas


DEFAULT_CONFIG = TokenizerConfig()


@dataclass(frozen=True)
class Sentence:
    """One sentence with its char span in the raw text and content lemmas."""

    index: int
    text: str
    start: int
    end: int
    content_lemmas: tuple[str, ...]

    def lemma_counter(self) -> Counter:
        return Counter(self.content_lemmas)


@dataclass(frozen=True)
class Book:
    """Immutable sentence/paragraph index structure over one text."""

    id: str
    raw_text: str
    sentences: tuple[Sentence, ...]
    paragraph_breaks: tuple[int, ...]

    @property
    def n_sentences(self) -> int:
        return len(self.sentences)

    def structure_dict(self) -> dict:
        """Index structure as plain JSON data (external interface)."""
        return {
            "book_id": self.id,
            "n_sentences": self.n_sentences,
            "sentences": [[s.start, s.end] for s in self.sentences],
            "paragraph_breaks": list(self.paragraph_breaks),
        }


@dataclass(frozen=True)
class GroundTruth:
    """Reference header spans and chapter breaks for one book."""

    book_id: str
    header_spans: tuple[tuple[int, int, str], ...]
    chapter_breaks: tuple[int, ...]

    def to_dict(self) -> dict:
        return {
            "book_id": self.book_id,
            "header_spans": [[s, e, t] for s, e, t in self.header_spans],
            "chapter_breaks": list(self.chapter_breaks),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GroundTruth":
        try:
            spans = tuple(
                (int(s), int(e), str(t)) for s, e, t in data["header_spans"]
            )
            breaks = tuple(int(b) for b in data["chapter_breaks"])
            book_id = str(data["book_id"])
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"malformed ground truth: {exc}") from exc
        if list(breaks) != sorted(set(breaks)):
            raise SchemaError("chapter_breaks must be strictly increasing")
        return cls(book_id=book_id, header_spans=spans, chapter_breaks=breaks)


def load_ground_truth(path: str | Path) -> GroundTruth:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError(f"cannot read ground truth {path}: {exc}") from exc
    return GroundTruth.from_dict(data)


# --------------------------------------------------------------------------
# Lemmatization: deterministic suffix rules with a small irregular table.

_IRREGULAR = {
    "ran": "run", "came": "come", "went": "go", "gone": "go", "going": "go",
    "said": "say", "saw": "see", "seen": "see", "made": "make",
    "took": "take", "taken": "take", "gave": "give", "given": "give",
    "found": "find", "told": "tell", "knew": "know", "known": "know",
    "thought": "think", "brought": "bring", "bought": "buy",
    "caught": "catch", "taught": "teach", "held": "hold", "kept": "keep",
    "slept": "sleep", "stood": "stand", "understood": "understand",
    "wrote": "write", "written": "write", "spoke": "speak",
    "spoken": "speak", "broke": "break", "broken": "break",
    "chose": "choose", "chosen": "choose", "drove": "drive",
    "driven": "drive", "ate": "eat", "eaten": "eat", "fell": "fall",
    "fallen": "fall", "felt": "feel", "fought": "fight", "flew": "fly",
    "flown": "fly", "forgot": "forget", "forgotten": "forget",
    "got": "get", "gotten": "get", "grew": "grow", "grown": "grow",
    "heard": "hear", "hid": "hide", "hidden": "hide", "lost": "lose",
    "met": "meet", "paid": "pay", "rode": "ride", "ridden": "ride",
    "rose": "rise", "risen": "rise", "sang": "sing", "sung": "sing",
    "sat": "sit", "sold": "sell", "sent": "send", "shot": "shoot",
    "showed": "show", "shown": "show", "sank": "sink", "swam": "swim",
    "threw": "throw", "thrown": "throw", "wore": "wear", "worn": "wear",
    "won": "win", "men": "man", "women": "woman", "children": "child",
    "mice": "mouse", "geese": "goose", "feet": "foot", "teeth": "tooth",
    "wives": "wife", "knives": "knife", "lives": "life", "leaves": "leaf",
    "wolves": "wolf", "shelves": "shelf", "thieves": "thief",
    "better": "good", "best": "good", "worse": "bad", "worst": "bad",
}

_VOWELS = set("aeiou")


def _looks_cvce(stem: str) -> bool:
    """Consonant-vowel-consonant ending, the silent-e restoration cue."""
    if len(stem) < 3:
        return False
    c2, v, c1 = stem[-3], stem[-2], stem[-1]
    return (
        c1 not in _VOWELS and c1 not in "wxy"
        and v in _VOWELS
        and c2 not in _VOWELS
    )


def _strip_suffixes(t: str) -> str:
    if t in _IRREGULAR:
        return _IRREGULAR[t]
    if len(t) > 4 and t.endswith("ies"):
        return t[:-3] + "y"
    if len(t) > 4 and t.endswith(("sses", "shes", "ches", "xes", "zes")):
        return t[:-2]
    if len(t) > 3 and t.endswith("s") and not t.endswith(("ss", "us", "is")):
        return t[:-1]
    for suffix in ("ing", "ed"):
        if len(t) > len(suffix) + 2 and t.endswith(suffix):
            if suffix == "ed" and t.endswith("ied"):
                return t[:-3] + "y"
            stem = t[: -len(suffix)]
            if (
                len(stem) >= 3
                and stem[-1] == stem[-2]
                and stem[-1] not in _VOWELS
                and not stem.endswith(("ll", "ss", "zz"))
            ):
                return stem[:-1]
            if _looks_cvce(stem):
                return stem + "e"
            return stem
    return t


def lemmatize(token: str) -> str:
    """Map a token to its lemma via fixed, deterministic suffix rules.

    Lowercases, strips plural -s/-es/-ies, -ing, and -ed endings (with
    doubled-consonant and silent-e handling), and applies a small
    irregular-form table.  Rules run to a fixpoint, so the function is
    total and idempotent: ``lemmatize(lemmatize(t)) == lemmatize(t)``.
    """
    t = token.lower()
    for _ in range(8):
        stripped = _strip_suffixes(t)
        if stripped == t:
            return t
        t = stripped
    return t


_WORD_RE = re.compile(r"[A-Za-z]+(?:['’][A-Za-z]+)*")


def content_lemmas(text: str, multiset: bool = True) -> tuple[str, ...]:
    """Lemmas of the content words in ``text``.

    Stopwords and pure punctuation never appear (the token pattern only
    admits alphabetic words, so numerals are excluded as well).  Returned
    sorted, with repeats kept under multiset semantics.
    """
    out = []
    for tok in _WORD_RE.findall(text):
        low = tok.lower()
        if low.endswith(("'s", "’s")):
            low = low[:-2]
        if not low or low in STOPWORDS:
            continue
        lemma = lemmatize(low)
        if not lemma or lemma in STOPWORDS:
            continue
        out.append(lemma)
    if not multiset:
        out = list(set(out))
    return tuple(sorted(out))


# --------------------------------------------------------------------------
# Sentence splitting: rule-based on [.?!] + closing quotes, with an
# abbreviation guard.  Sentences never cross paragraph boundaries.

_TERMINATOR_RE = re.compile(r"[.!?]+[\"'”’)\]]*")
_LAST_WORD_RE = re.compile(r"([A-Za-z]+)\.?$")


def _is_abbreviation(prefix: str, abbreviations: frozenset[str]) -> bool:
    m = _LAST_WORD_RE.search(prefix)
    if not m:
        return False
    word = m.group(1)
    return word.lower() in abbreviations or (len(word) == 1 and word.isupper())


def split_sentences(text: str, config: TokenizerConfig = DEFAULT_CONFIG):
    """Split one paragraph into sentences; yields (start, end) local spans."""
    spans = []
    start = 0
    n = len(text)
    for m in _TERMINATOR_RE.finditer(text):
        end = m.end()
        if end >= n:
            break
        tail = text[end:]
        if not tail.strip():
            break
        # only a bare period can be an abbreviation dot
        if m.group(0)[0] == "." and "!" not in m.group(0) and "?" not in m.group(0):
            if _is_abbreviation(text[: m.start() + 1], config.abbreviations):
                continue
        follow = tail.lstrip()
        if not follow or follow[0].islower():
            continue
        if not tail[0].isspace():
            continue
        spans.append((start, end))
        start = end + (len(tail) - len(follow))
    if text[start:].strip():
        spans.append((start, n))
    # tighten spans to non-whitespace extents
    tight = []
    for s, e in spans:
        seg = text[s:e]
        ls = len(seg) - len(seg.lstrip())
        rs = len(seg) - len(seg.rstrip())
        tight.append((s + ls, e - rs))
    return tight


_BLANK_RE = re.compile(r"^[ \t]*$")


def _paragraph_blocks(text: str):
    """Maximal runs of non-blank lines, as (start, end) char spans."""
    blocks = []
    pos = 0
    cur_start = None
    cur_end = None
    for line in text.splitlines(keepends=True):
        stripped = line.rstrip("\n")
        if _BLANK_RE.match(stripped):
            if cur_start is not None:
                blocks.append((cur_start, cur_end))
                cur_start = None
        else:
            if cur_start is None:
                cur_start = pos
            cur_end = pos + len(stripped.rstrip())
        pos += len(line)
    if cur_start is not None:
        blocks.append((cur_start, cur_end))
    return blocks


def book_from_text(
    book_id: str, text: str, config: TokenizerConfig = DEFAULT_CONFIG
) -> Book:
    """Build the Book index structure from already-loaded text."""
    text = text.replace("\r\n", "\n").replace("\r", "\n")
    if not text.strip():
        raise EmptyBookError(f"book {book_id!r} has no text")
    sentences: list[Sentence] = []
    paragraph_breaks: list[int] = []
    blocks = _paragraph_blocks(text)
    for bi, (bs, be) in enumerate(blocks):
        block = text[bs:be]
        for ls, le in split_sentences(block, config):
            idx = len(sentences)
            sent_text = block[ls:le]
            sentences.append(
                Sentence(
                    index=idx,
                    text=sent_text,
                    start=bs + ls,
                    end=bs + le,
                    content_lemmas=content_lemmas(
                        sent_text, multiset=config.lemma_multiset
                    ),
                )
            )
        if bi < len(blocks) - 1 and sentences:
            gap = len(sentences) - 1
            if not paragraph_breaks or paragraph_breaks[-1] != gap:
                paragraph_breaks.append(gap)
    # the final gap index N-1 is not a valid break position
    n = len(sentences)
    paragraph_breaks = [g for g in paragraph_breaks if g < n - 1]
    return Book(
        id=book_id,
        raw_text=text,
        sentences=tuple(sentences),
        paragraph_breaks=tuple(paragraph_breaks),
    )


def load_book(
    path: str | Path, config: TokenizerConfig = DEFAULT_CONFIG
) -> Book:
    """Load one plain-text book; invalid UTF-8 bytes are replaced."""
    path = Path(path)
    raw = path.read_bytes()
    text = raw.decode("utf-8", errors="replace")
    if not text.strip():
        raise EmptyBookError(f"{path} is empty")
    return book_from_text(path.stem, text, config)
