"""Seeded synthetic corpus generator.

Builds novels with known header formats, front matter, optional table of
contents, optional decoy headers, and per-chapter vocabulary pools, so
pipeline tests have exact ground truth.  All randomness flows from one
``random.Random`` seed; identical seeds produce identical corpora.
"""

from __future__ import annotations

import csv
import json
import random
import re
from dataclasses import dataclass
from pathlib import Path

from . import numerals
from ._stopwords import STOPWORDS
from .corpus import GroundTruth
from .rules import KEYWORDS, ElementKind, generate_rules

# header formats the generator can render, all present in the inventory
HEADER_FORMATS = (
    "kw-ru", "kw-ru-p", "kw-dg", "kw-dg-p", "kw-cw", "kw-ow", "kw-rl",
    "ru", "ru-p", "dg-p-tu", "kw-dg-tu", "kw-dg-p-tu", "kw-ru-p-tu",
    "kw-ru-tu", "kw-cw-p-tu", "kw-ow-p", "ru-p-tm", "kw-dg-p-tm",
    "kw-ru-p-tm", "kw-p-dg", "cw", "kw-cw-p", "dg", "kw-cw-tu",
)

_ONSETS = "br st gr th kr pl dr fl sm bl tr gl vr sk shr spr".split()
_NUCLEI = "a e o u i ai ea ou or ar".split()
_CODAS = "nd rk lm nt rn th mp lt sk rd ck ng n r m p t k b g".split()

_NUMBER_WORDS = frozenset(
    list(numerals._UNITS)
    + list(numerals._TENS)
    + list(numerals._ORDINAL_UNITS)
    + list(numerals._ORDINAL_TENS)
    + ["hundred", "hundredth"]
)


@dataclass(frozen=True)
class SynthProfile:
    """Shape knobs for one corpus."""

    chapters: tuple[int, int] = (5, 10)
    paragraphs: tuple[int, int] = (4, 8)
    sentences: tuple[int, int] = (2, 5)
    nouns_per_chapter: int = 12
    verbs_per_chapter: int = 8
    shared_nouns: int = 6
    shared_fraction: float = 0.15
    toc_probability: float = 0.5
    preface_probability: float = 0.5
    decoys_per_book: int = 0
    trend: bool = False  # derive chapter count from author birth year


STANDARD_PROFILE = SynthProfile()
TWO_DISJOINT_PROFILE = SynthProfile(
    chapters=(2, 2),
    paragraphs=(6, 10),
    shared_nouns=0,
    shared_fraction=0.0,
    toc_probability=0.0,
    preface_probability=0.0,
)
LONG_PROFILE = SynthProfile(
    chapters=(4, 6),
    paragraphs=(30, 45),
    sentences=(2, 4),
    nouns_per_chapter=40,
    verbs_per_chapter=20,
    toc_probability=0.0,
    preface_probability=0.0,
)


@dataclass(frozen=True)
class SynthBook:
    book_id: str
    text: str
    truth: GroundTruth
    manifest: dict


def _make_word(rng: random.Random) -> str:
    parts = [rng.choice(_ONSETS), rng.choice(_NUCLEI)]
    if rng.random() < 0.4:
        parts += [rng.choice(_ONSETS), rng.choice(_NUCLEI)]
    parts.append(rng.choice(_CODAS))
    return "".join(parts)


def _safe_word(rng: random.Random, taken: set[str]) -> str:
    while True:
        w = _make_word(rng)
        if len(w) < 4 or w in taken:
            continue
        if w in STOPWORDS or w in KEYWORDS or w in _NUMBER_WORDS:
            continue
        if all(c in "mdclxvi" for c in w):
            continue
        taken.add(w)
        return w


_GLUE_TEMPLATES = (
    "The {n1} {v} the {n2}.",
    "A {n1} {v} the {n2}.",
    "The {n1} and the {n2} {v}.",
    "That {n1} {v} this {n2}.",
)


def _sentence(rng: random.Random, nouns, verbs) -> str:
    tpl = rng.choice(_GLUE_TEMPLATES)
    n1 = rng.choice(nouns)
    n2 = rng.choice([n for n in nouns if n != n1] or nouns)
    return tpl.format(n1=n1, n2=n2, v=rng.choice(verbs) + "ed")


def _title_case(words: str) -> str:
    return re.sub(r"[a-z]+", lambda m: m.group(0).capitalize(), words)


def _render_number(kind: ElementKind, n: int, number_style: str) -> str:
    if kind is ElementKind.ROMAN_UPPER:
        return numerals.render_roman(n)
    if kind is ElementKind.ROMAN_LOWER:
        return numerals.render_roman(n).lower()
    if kind is ElementKind.DIGITS:
        return str(n)
    if kind is ElementKind.CARDINAL_WORD:
        words = numerals.render_cardinal(n)
    else:
        words = numerals.render_ordinal(n)
    return words.upper() if number_style == "upper" else _title_case(words)


def _render_title(kind: ElementKind, words: list[str]) -> str:
    if kind is ElementKind.TITLE_UPPER:
        return "THE " + " ".join(w.upper() for w in words)
    return "The " + " ".join(w.capitalize() for w in words)


def render_header(
    rule, number: int, title_words: list[str], keyword_word: str,
    number_style: str,
) -> str:
    """Render one heading line following the rule's element sequence."""
    parts: list[str] = []
    for kind in rule.elements:
        if kind is ElementKind.KEYWORD:
            parts.append(keyword_word)
        elif kind is ElementKind.PUNCTUATION:
            parts[-1] = parts[-1] + "."
        elif kind in (ElementKind.TITLE_UPPER, ElementKind.TITLE_MIXED):
            parts.append(_render_title(kind, title_words))
        else:
            parts.append(_render_number(kind, number, number_style))
    return " ".join(parts)


def _chapter_count(profile: SynthProfile, birth_year: int, rng) -> int:
    if not profile.trend:
        return rng.randint(*profile.chapters)
    if birth_year <= 1875:
        base = 30
    else:
        base = max(8, 30 - 3 * ((birth_year - 1875) // 10))
    return max(2, base + rng.randint(-2, 2))


def generate_book(
    book_id: str,
    seed: int,
    profile: SynthProfile = STANDARD_PROFILE,
    rule_id: str | None = None,
) -> SynthBook:
    rng = random.Random(seed)
    taken: set[str] = set()
    shared_nouns = [_safe_word(rng, taken) for _ in range(profile.shared_nouns)]
    title_pool = [_safe_word(rng, taken) for _ in range(12)]
    rules = [r for r in generate_rules() if r.id in HEADER_FORMATS]
    if rule_id is None:
        rule = rng.choice(rules)
    else:
        rule = next(r for r in rules if r.id == rule_id)
    keyword_word = rng.choice(("Chapter", "Chapter", "Chapter", "Part", "Book"))
    if rng.random() < 0.5:
        keyword_word = keyword_word.upper()
    number_style = rng.choice(("upper", "title"))
    birth_year = rng.randint(1700, 1949)
    n_chapters = _chapter_count(profile, birth_year, rng)

    chapters = []
    for ci in range(n_chapters):
        nouns = [_safe_word(rng, taken) for _ in range(profile.nouns_per_chapter)]
        verbs = [_safe_word(rng, taken) for _ in range(profile.verbs_per_chapter)]
        paragraphs = []
        sentence_count = 0
        for _ in range(rng.randint(*profile.paragraphs)):
            n_sent = rng.randint(*profile.sentences)
            sents = []
            for _ in range(n_sent):
                pool = nouns
                if shared_nouns and rng.random() < profile.shared_fraction:
                    pool = nouns + shared_nouns
                sents.append(_sentence(rng, pool, verbs))
            paragraphs.append(" ".join(sents))
            sentence_count += n_sent
        title_words = rng.sample(title_pool, rng.randint(1, 2))
        header = render_header(
            rule, ci + 1, title_words, keyword_word, number_style
        )
        chapters.append(
            {
                "header": header,
                "paragraphs": paragraphs,
                "sentences": sentence_count,
            }
        )

    # decoys: constant out-of-sequence number in a format unlike the book's
    decoy_lines = []
    if profile.decoys_per_book > 0:
        decoy_text = (
            "Stave Nine Hundred" if rule.id in ("ru", "ru-p") else "CMXC"
        )
        targets = list(range(n_chapters - 1))
        rng.shuffle(targets)
        for ci in targets[: profile.decoys_per_book]:
            ch = chapters[ci]
            pos = rng.randint(1, len(ch["paragraphs"]))
            ch["paragraphs"].insert(pos, decoy_text)
            ch["sentences"] += 1
            decoy_lines.append({"chapter": ci, "text": decoy_text})

    # assemble text with char offsets
    pieces: list[str] = []
    offset = 0

    def emit(s: str):
        nonlocal offset
        pieces.append(s)
        offset += len(s)

    book_title = " ".join(w.upper() for w in rng.sample(title_pool, 2))
    author = " ".join(w.capitalize() for w in rng.sample(title_pool, 2))
    emit(f"{book_title}\n\nby {author}\n")
    if rng.random() < profile.preface_probability:
        emit("\n\n\n")
        emit("PREFACE\n\n")
        emit(_sentence(rng, shared_nouns or title_pool, ["wander"]) + " ")
        emit(_sentence(rng, shared_nouns or title_pool, ["linger"]) + "\n")
    if rng.random() < profile.toc_probability:
        emit("\n\n\n")
        emit("CONTENTS\n\n")
        for ch in chapters:
            emit(ch["header"] + "\n")
    emit("\n\n\n")

    header_spans = []
    for ci, ch in enumerate(chapters):
        if ci > 0:
            emit("\n\n")
        start = offset
        emit(ch["header"])
        header_spans.append((start, offset, ch["header"]))
        emit("\n\n")
        emit("\n\n".join(ch["paragraphs"]))
    emit("\n")
    text = "".join(pieces)

    breaks = []
    cum = 0
    for ch in chapters[:-1]:
        cum += ch["sentences"]
        breaks.append(cum - 1)
    truth = GroundTruth(
        book_id=book_id,
        header_spans=tuple(header_spans),
        chapter_breaks=tuple(breaks),
    )
    manifest = {
        "book_id": book_id,
        "seed": seed,
        "rule_id": rule.id,
        "birth_year": birth_year,
        "n_chapters": n_chapters,
        "headers": [ch["header"] for ch in chapters],
        "sentence_counts": [ch["sentences"] for ch in chapters],
        "bodies": ["\n\n".join(ch["paragraphs"]) for ch in chapters],
        "decoys": decoy_lines,
        "front_matter_end": header_spans[0][0],
    }
    return SynthBook(book_id=book_id, text=text, truth=truth, manifest=manifest)


def generate_corpus(
    out_dir: str | Path,
    n_books: int,
    seed: int,
    profile: SynthProfile = STANDARD_PROFILE,
    min_formats: int = 0,
) -> list[SynthBook]:
    """Write a corpus under out_dir: books/, truth/, metadata.csv, manifest.json.

    With min_formats > 0 the first books cycle through that many header
    formats so the corpus provably spans them.
    """
    out = Path(out_dir)
    (out / "books").mkdir(parents=True, exist_ok=True)
    (out / "truth").mkdir(parents=True, exist_ok=True)
    rng = random.Random(seed)
    books = []
    forced = list(HEADER_FORMATS[:min_formats])
    for i in range(n_books):
        book_id = f"book{i:04d}"
        book_seed = rng.randrange(1 << 30)
        rule_id = forced[i] if i < len(forced) else None
        book = generate_book(book_id, book_seed, profile, rule_id=rule_id)
        (out / "books" / f"{book_id}.txt").write_text(
            book.text, encoding="utf-8"
        )
        (out / "truth" / f"{book_id}.json").write_text(
            json.dumps(book.truth.to_dict(), sort_keys=True), encoding="utf-8"
        )
        books.append(book)
    with (out / "metadata.csv").open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["book_id", "author_birth_year"])
        for book in books:
            writer.writerow([book.book_id, book.manifest["birth_year"]])
    (out / "manifest.json").write_text(
        json.dumps([b.manifest for b in books], sort_keys=True),
        encoding="utf-8",
    )
    return books
