"""Five-stage header annotation pipeline.

Stages: front-matter identification, candidate generation, rule matching,
missing-chapter hunt, and refinement.  Candidates come either from an
external per-line confidence file or from a built-in heuristic, so the
pipeline runs self-contained but accepts any score source.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, replace

from . import numerals
from .corpus import (
    DEFAULT_CONFIG,
    Book,
    GroundTruth,
    book_from_text,
    split_sentences,
)
from .errors import BookMismatchError, ScoreAlignmentError
from .rules import (
    KEYWORDS,
    ElementKind,
    HeaderRule,
    RuleMatch,
    best_match,
    generate_rules,
)

FRONT_MATTER_MARKERS = frozenset(
    {
        "preface",
        "table of contents",
        "contents",
        "foreword",
        "introduction",
        "dedication",
        "acknowledgments",
        "acknowledgements",
        "epigraph",
        "copyright",
        "illustrations",
        "list of illustrations",
    }
)

# candidate heuristic bounds
MAX_HEADING_TOKENS = 8
HEURISTIC_CONFIDENCE = 0.5
TOP_TOKEN_FRACTION = 0.10

# front-matter scan knobs
MIN_TOC_RUN = 3
PROSE_SENTENCES_BREAK = 2
BLANK_RUN_BREAK = 3


@dataclass(frozen=True)
class Line:
    """One physical line with its char span (newline excluded)."""

    index: int
    start: int
    end: int
    text: str


def split_lines(text: str) -> list[Line]:
    lines = []
    pos = 0
    for raw in text.splitlines(keepends=True):
        body = raw.rstrip("\n")
        lines.append(Line(index=len(lines), start=pos, end=pos + len(body), text=body))
        pos += len(raw)
    return lines


@dataclass(frozen=True)
class CandidateLine:
    line_index: int
    char_span: tuple[int, int]
    confidence: float
    source: str  # "external-scores" | "heuristic"


@dataclass(frozen=True)
class Header:
    """A rule match placed at a physical line."""

    line_index: int
    span: tuple[int, int]
    rule_id: str
    rule_index: int
    number: int | None
    number_format: ElementKind | None
    title: str | None
    keyword: str | None

    @classmethod
    def from_match(cls, line: Line, match: RuleMatch) -> "Header":
        return cls(
            line_index=line.index,
            span=(line.start, line.start + len(line.text.rstrip())),
            rule_id=match.rule_id,
            rule_index=match.rule_index,
            number=match.number,
            number_format=match.number_format,
            title=match.title,
            keyword=match.keyword,
        )


@dataclass(frozen=True)
class HuntSearch:
    """One synthesized search for a missing chapter number."""

    number: int
    rule_id: str
    after_line: int
    before_line: int
    found: bool


@dataclass(frozen=True)
class HeaderAnnotation:
    book_id: str
    front_matter_end: int
    headers: tuple[Header, ...]
    flags: tuple[str, ...] = ()
    stage1_candidates: tuple[CandidateLine, ...] = ()
    stage2_headers: tuple[Header, ...] = ()
    searches: tuple[HuntSearch, ...] = ()

    def to_dict(self) -> dict:
        return {
            "book_id": self.book_id,
            "front_matter_end": self.front_matter_end,
            "headers": [
                {
                    "span": [h.span[0], h.span[1]],
                    "rule_id": h.rule_id,
                    "number": h.number,
                    "title": h.title,
                }
                for h in self.headers
            ],
        }


# --------------------------------------------------------------------------
# Cheap prefilter: every rule starts with a keyword or a numeral, so lines
# whose first token is neither can be skipped without trying 160 regexes.

_FIRST_TOKEN_RE = re.compile(r"[ \t]*([^\s]+)")
_PUNCT_STRIP = ".:—–-"
_NUMBER_FIRST_WORDS = frozenset(
    w
    for w in (
        list(numerals._UNITS[1:20])
        + list(numerals._TENS)
        + list(numerals._ORDINAL_UNITS[1:20])
        + list(numerals._ORDINAL_TENS)
        + ["hundredth"]
    )
)


def line_may_match(text: str) -> bool:
    m = _FIRST_TOKEN_RE.match(text)
    if not m:
        return False
    tok = m.group(1).strip(_PUNCT_STRIP)
    if not tok:
        return False
    low = tok.split("-")[0].lower()
    if low in KEYWORDS or low in _NUMBER_FIRST_WORDS:
        return True
    if tok.isdigit():
        return True
    if all(c in "MDCLXVI" for c in tok) or all(c in "mdclxvi" for c in tok):
        return True
    return False


def match_line(line: Line, rules) -> Header | None:
    text = line.text.rstrip()
    if not text or not line_may_match(text):
        return None
    m = best_match(text, rules)
    if m is None:
        return None
    return Header.from_match(line, m)


# --------------------------------------------------------------------------
# Stage 1a: front matter

def _is_blank(line: Line) -> bool:
    return not line.text.strip()


def _is_marker(line: Line) -> bool:
    t = line.text.strip().strip(_PUNCT_STRIP + " \t").lower()
    return t in FRONT_MATTER_MARKERS


def _prose_sentences_between(lines, lo: int, hi: int, limit: int) -> int:
    """Count sentences in lines[lo+1:hi]; stops once limit is reachable."""
    buf: list[str] = []
    for line in lines[lo + 1 : hi]:
        if _is_blank(line):
            continue
        buf.append(line.text)
        if len(buf) >= 2 * limit + 4:
            break
    text = " ".join(buf)
    return len(split_sentences(text)) if text.strip() else 0


def _cue_before_prose(lines, lo: int, hi: int) -> bool:
    """True when a marker line or blank run appears after line ``lo``
    before two prose sentences do (the signature of a TOC tail)."""
    blanks = 0
    buf: list[str] = []
    for line in lines[lo + 1 : hi]:
        if _is_blank(line):
            blanks += 1
            if blanks >= BLANK_RUN_BREAK:
                return True
            continue
        blanks = 0
        if _is_marker(line):
            return True
        buf.append(line.text)
        if len(split_sentences(" ".join(buf))) >= PROSE_SENTENCES_BREAK:
            return False
    return True


@dataclass(frozen=True)
class FrontMatterScan:
    offset: int
    flags: tuple[str, ...]
    heading_lines: tuple[int, ...]  # rule-matching lines kept as headings
    toc_lines: tuple[int, ...]


def detect_front_matter(book: Book, rules=None) -> FrontMatterScan:
    """Find the char offset of the first chapter heading.

    Everything before the first heading is front matter.  Blocks of three
    or more rule-matching lines with fewer than two prose sentences
    between consecutive members are treated as a table of contents, not
    headings; marker keywords (Preface, Contents, ...) and runs of three
    or more blank lines additionally delimit front-matter sections.
    """
    if rules is None:
        rules = generate_rules()
    lines = split_lines(book.raw_text)
    matched: list[tuple[int, Header]] = []
    for line in lines:
        h = match_line(line, rules)
        if h is not None and not _is_marker(line):
            matched.append((line.index, h))

    if not matched:
        return FrontMatterScan(0, ("no-heading-found",), (), ())

    # chain matches into runs; a chain breaks on >=2 prose sentences,
    # a marker line, or a run of >=3 blank lines between two matches
    def links(prev_idx: int, next_idx: int) -> bool:
        blanks = 0
        for line in lines[prev_idx + 1 : next_idx]:
            if _is_blank(line):
                blanks += 1
                if blanks >= BLANK_RUN_BREAK:
                    return False
            else:
                blanks = 0
                if _is_marker(line):
                    return False
        prose = _prose_sentences_between(
            lines, prev_idx, next_idx, PROSE_SENTENCES_BREAK
        )
        return prose < PROSE_SENTENCES_BREAK

    runs: list[list[tuple[int, Header]]] = [[matched[0]]]
    for item in matched[1:]:
        if links(runs[-1][-1][0], item[0]):
            runs[-1].append(item)
        else:
            runs.append([item])

    toc_lines: list[int] = []
    heading_lines: list[int] = []
    flags: list[str] = []
    for ri, run in enumerate(runs):
        if len(run) >= MIN_TOC_RUN:
            next_line = runs[ri + 1][0][0] if ri + 1 < len(runs) else len(lines)
            keep_last = not _cue_before_prose(lines, run[-1][0], next_line)
            members = run[:-1] if keep_last else run
            toc_lines.extend(idx for idx, _ in members)
            if keep_last:
                heading_lines.append(run[-1][0])
            if members:
                flags.append("toc-detected")
        else:
            heading_lines.extend(idx for idx, _ in run)

    if not heading_lines:
        return FrontMatterScan(0, ("no-heading-found",), (), tuple(toc_lines))
    first = min(heading_lines)
    return FrontMatterScan(
        offset=lines[first].start,
        flags=tuple(dict.fromkeys(flags)),
        heading_lines=tuple(sorted(heading_lines)),
        toc_lines=tuple(sorted(toc_lines)),
    )


# --------------------------------------------------------------------------
# Stage 1b: candidate lines

_CLOSING_QUOTES = "\"'”’)]"
_TERMINAL_WORD_RE = re.compile(
    r"([A-Za-z0-9'’-]+)[.!?]+[\"'”’)\]]*$"
)


def _sentence_terminated(text: str) -> bool:
    """Prose-sentence ending: terminal punctuation after a lowercase word.

    Headings routinely end with a period too ("Chapter I."), so bare
    terminal punctuation is not enough; the lowercase final word is the
    prose signature.  False positives here are cheap (rule matching
    rejects them), missed headings are not.
    """
    t = text.rstrip()
    if not t or t.rstrip(_CLOSING_QUOTES)[-1:] not in (".", "!", "?"):
        return False
    m = _TERMINAL_WORD_RE.search(t)
    return m is not None and m.group(1)[0].islower()


def generate_candidates(
    book: Book, line_scores: list[float] | None = None
) -> list[CandidateLine]:
    """Candidate heading lines, from external scores or the heuristic.

    With scores: a line is a candidate when at least one of its tokens
    falls in the top 10% of all tokens by confidence, where every token
    inherits its line's score.  Lines are taken in (score desc, index
    asc) order until the token budget ceil(0.10 * total) is exhausted.

    Without scores: short (<= 8 tokens), paragraph-initial lines that do
    not end like a sentence, at confidence 0.5.
    """
    lines = split_lines(book.raw_text)
    if line_scores is not None:
        if len(line_scores) != len(lines):
            raise ScoreAlignmentError(
                f"{len(line_scores)} scores for {len(lines)} lines"
            )
        token_counts = [len(line.text.split()) for line in lines]
        total = sum(token_counts)
        budget = math.ceil(TOP_TOKEN_FRACTION * total)
        order = sorted(
            range(len(lines)),
            key=lambda i: (-line_scores[i], i),
        )
        out = []
        for i in order:
            if budget <= 0:
                break
            if token_counts[i] == 0:
                continue
            out.append(
                CandidateLine(
                    line_index=i,
                    char_span=(lines[i].start, lines[i].end),
                    confidence=float(line_scores[i]),
                    source="external-scores",
                )
            )
            budget -= token_counts[i]
        out.sort(key=lambda c: c.line_index)
        return out

    out = []
    prev_blank = True
    for line in lines:
        if _is_blank(line):
            prev_blank = True
            continue
        tokens = len(line.text.split())
        if (
            prev_blank
            and 0 < tokens <= MAX_HEADING_TOKENS
            and not _sentence_terminated(line.text)
        ):
            out.append(
                CandidateLine(
                    line_index=line.index,
                    char_span=(line.start, line.end),
                    confidence=HEURISTIC_CONFIDENCE,
                    source="heuristic",
                )
            )
        prev_blank = False
    return out


# --------------------------------------------------------------------------
# Stage 2: rule matching over candidates

def match_candidates(
    book: Book, candidates: list[CandidateLine], rules, min_offset: int = 0
) -> list[Header]:
    lines = split_lines(book.raw_text)
    headers = []
    for cand in candidates:
        line = lines[cand.line_index]
        if line.start < min_offset:
            continue
        h = match_line(line, rules)
        if h is not None:
            headers.append(h)
    return headers


# --------------------------------------------------------------------------
# Stage 3: missing chapter hunt

def _increasing_runs(numbered: list[Header]) -> list[list[Header]]:
    """Maximal strictly-increasing runs of the found chapter numbers.

    A decrease (or repeat) starts a new run, which models chapter
    numbering restarts in multi-part books.
    """
    runs: list[list[Header]] = []
    for h in numbered:
        if runs and h.number > runs[-1][-1].number:
            runs[-1].append(h)
        else:
            runs.append([h])
    return runs


def _dominant_rule(run: list[Header], rules_by_id) -> HeaderRule:
    counts: dict[str, int] = {}
    for h in run:
        counts[h.rule_id] = counts.get(h.rule_id, 0) + 1
    best_count = max(counts.values())
    modal = [rid for rid, c in counts.items() if c == best_count]
    rid = min(modal, key=lambda r: rules_by_id[r].index)
    return rules_by_id[rid]


def plan_missing_searches(headers: list[Header], rules) -> list[HuntSearch]:
    """Searches implied by gaps inside increasing runs of found numbers."""
    rules_by_id = {r.id: r for r in rules}
    numbered = [h for h in headers if h.number is not None]
    searches = []
    for run in _increasing_runs(numbered):
        rule = _dominant_rule(run, rules_by_id)
        for prev, nxt in zip(run, run[1:]):
            for miss in range(prev.number + 1, nxt.number):
                searches.append(
                    HuntSearch(
                        number=miss,
                        rule_id=rule.id,
                        after_line=prev.line_index,
                        before_line=nxt.line_index,
                        found=False,
                    )
                )
    return searches


def hunt_missing(
    headers: list[Header], book: Book, rules
) -> tuple[list[Header], list[HuntSearch]]:
    """Search the body for chapter numbers missing from increasing runs.

    Each missing number is rendered in its run's dominant rule/format and
    full-line searched between the two flanking found headers; hits are
    promoted to matches.  Never removes an existing match.
    """
    rules_by_id = {r.id: r for r in rules}
    lines = split_lines(book.raw_text)
    searches = plan_missing_searches(headers, rules)
    found_headers: list[Header] = []
    done: list[HuntSearch] = []
    claimed = {h.line_index for h in headers}
    for search in searches:
        rule = rules_by_id[search.rule_id]
        pattern = rule.specialize(search.number)
        hit = None
        for line in lines[search.after_line + 1 : search.before_line]:
            if line.index in claimed or _is_blank(line):
                continue
            if pattern.match(line.text.rstrip()) is not None:
                hit = line
                break
        if hit is None:
            done.append(search)
            continue
        match = match_line(hit, [rule])
        if match is None:  # specialized form matched but strict parse failed
            done.append(search)
            continue
        claimed.add(hit.index)
        found_headers.append(match)
        done.append(replace(search, found=True))
    merged = sorted(headers + found_headers, key=lambda h: h.line_index)
    return merged, done


# --------------------------------------------------------------------------
# Stage 4: refinement

def refine(headers: list[Header], book: Book, rules) -> list[Header]:
    """Drop matches sitting between consecutive same-rule chapter numbers.

    A header positioned between two headers whose numbers are n and n+1
    under the same rule is a false positive unless it also matches that
    rule.  Single pass; never adds matches.
    """
    rules_by_id = {r.id: r for r in rules}
    lines = split_lines(book.raw_text)
    headers = sorted(headers, key=lambda h: h.line_index)
    doomed: set[int] = set()
    by_rule: dict[str, list[Header]] = {}
    for h in headers:
        if h.number is not None:
            by_rule.setdefault(h.rule_id, []).append(h)
    for rule_id, group in by_rule.items():
        rule = rules_by_id[rule_id]
        for prev, nxt in zip(group, group[1:]):
            if nxt.number != prev.number + 1:
                continue
            for h in headers:
                if not prev.line_index < h.line_index < nxt.line_index:
                    continue
                if h.line_index in doomed:
                    continue
                line = lines[h.line_index]
                if rule.compiled.match(line.text.rstrip()) is None:
                    doomed.add(h.line_index)
    return [h for h in headers if h.line_index not in doomed]


# --------------------------------------------------------------------------
# Pipeline driver and evaluation

def annotate_book(
    book: Book,
    rules=None,
    line_scores: list[float] | None = None,
) -> HeaderAnnotation:
    """Run all five stages and return the annotation with stage snapshots."""
    if rules is None:
        rules = generate_rules()
    scan = detect_front_matter(book, rules)
    candidates = generate_candidates(book, line_scores)
    lines = split_lines(book.raw_text)
    toc = set(scan.toc_lines)
    candidates = [
        c
        for c in candidates
        if lines[c.line_index].start >= scan.offset and c.line_index not in toc
    ]
    matched = match_candidates(book, candidates, rules, min_offset=scan.offset)
    merged, searches = hunt_missing(matched, book, rules)
    final = refine(merged, book, rules)
    return HeaderAnnotation(
        book_id=book.id,
        front_matter_end=scan.offset,
        headers=tuple(final),
        flags=scan.flags,
        stage1_candidates=tuple(candidates),
        stage2_headers=tuple(merged),
        searches=tuple(searches),
    )


def _spans_overlap(a: tuple[int, int], b: tuple[int, int]) -> bool:
    return a[0] < b[1] and b[0] < a[1]


def evaluate_spans(
    pred_spans: list[tuple[int, int]], truth_spans: list[tuple[int, int]]
) -> tuple[float, float, float]:
    """Overlap-based precision/recall/F1 over char spans."""
    if not pred_spans and not truth_spans:
        return 1.0, 1.0, 1.0
    tp_pred = sum(
        1 for p in pred_spans if any(_spans_overlap(p, t) for t in truth_spans)
    )
    tp_truth = sum(
        1 for t in truth_spans if any(_spans_overlap(p, t) for p in pred_spans)
    )
    precision = tp_pred / len(pred_spans) if pred_spans else 0.0
    recall = tp_truth / len(truth_spans) if truth_spans else 0.0
    if precision + recall == 0.0:
        return precision, recall, 0.0
    f1 = 2 * precision * recall / (precision + recall)
    return precision, recall, f1


def evaluate_headers(
    pred: HeaderAnnotation, truth: GroundTruth
) -> tuple[float, float, float]:
    """Precision/recall/F1 of predicted headers against reference spans.

    A prediction counts as a true positive when its char span overlaps a
    reference span; F1 is 0 when P + R is 0.
    """
    if pred.book_id != truth.book_id:
        raise BookMismatchError(f"{pred.book_id!r} vs {truth.book_id!r}")
    return evaluate_spans(
        [h.span for h in pred.headers],
        [(s, e) for s, e, _ in truth.header_spans],
    )


def stage_metrics(
    annotation: HeaderAnnotation, truth: GroundTruth
) -> dict[str, tuple[float, float, float]]:
    """Per-stage P/R/F1: candidates, matched+hunted, refined."""
    if annotation.book_id != truth.book_id:
        raise BookMismatchError(f"{annotation.book_id!r} vs {truth.book_id!r}")
    truth_spans = [(s, e) for s, e, _ in truth.header_spans]
    return {
        "stage1": evaluate_spans(
            [c.char_span for c in annotation.stage1_candidates], truth_spans
        ),
        "stage2": evaluate_spans(
            [h.span for h in annotation.stage2_headers], truth_spans
        ),
        "stage3": evaluate_spans(
            [h.span for h in annotation.headers], truth_spans
        ),
    }


# --------------------------------------------------------------------------
# Cue stripping

@dataclass(frozen=True)
class StripResult:
    book_id: str
    text: str
    ground_truth: GroundTruth
    bodies: tuple[str, ...]
    flags: tuple[str, ...] = ()


def strip_book(book: Book, annotation: HeaderAnnotation, config=None) -> StripResult:
    """Remove front matter and header lines; join chapters with one blank line.

    Chapter breaks are recorded as sentence-gap indices of the stripped
    text, which by construction coincide with paragraph breaks.
    """
    if config is None:
        config = DEFAULT_CONFIG
    flags: list[str] = []
    headers = sorted(annotation.headers, key=lambda h: h.span[0])
    if not headers:
        flags.append("no-headers")
        text = book.raw_text.strip("\n")
        truth = GroundTruth(book.id, (), ())
        return StripResult(book.id, text, truth, (text,), tuple(flags))
    lines = split_lines(book.raw_text)
    bodies = []
    for i, h in enumerate(headers):
        body_start = lines[h.line_index].end
        if i + 1 < len(headers):
            body_end = headers[i + 1].span[0]
        else:
            body_end = len(book.raw_text)
        body = book.raw_text[body_start:body_end].strip("\n").strip()
        if body:
            bodies.append(body)
        else:
            flags.append(f"empty-chapter-{i}")
    text = "\n\n".join(bodies)
    breaks = []
    cum = 0
    for body in bodies[:-1]:
        cum += len(book_from_text(book.id, body, config).sentences)
        breaks.append(cum - 1)
    truth = GroundTruth(
        book_id=book.id,
        header_spans=tuple(
            (h.span[0], h.span[1], book.raw_text[h.span[0] : h.span[1]])
            for h in headers
        ),
        chapter_breaks=tuple(breaks),
    )
    return StripResult(book.id, text, truth, tuple(bodies), tuple(flags))
