"""Break-confidence score series: ingestion, transforms, normalization.

External score files carry raw classifier confidences per paragraph gap;
WOC supplies prominences.  Both are brought onto a uniform ScoreSeries
that the global segmenter consumes.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from pathlib import Path

import jsonschema

from .corpus import Book
from .errors import (
    EmptySeriesError,
    GapMismatchError,
    SchemaError,
    ScoreDomainError,
)

GAP_SCORES_SCHEMA = {
    "type": "object",
    "required": ["book_id", "entries"],
    "properties": {
        "book_id": {"type": "string"},
        "entries": {
            "type": "array",
            "items": {
                "type": "array",
                "prefixItems": [
                    {"type": "integer", "minimum": 0},
                    {"type": "number", "minimum": 0, "exclusiveMaximum": 1},
                ],
                "minItems": 2,
                "maxItems": 2,
            },
        },
    },
    "additionalProperties": False,
}

LINE_SCORES_SCHEMA = {
    "type": "object",
    "required": ["book_id", "line_scores"],
    "properties": {
        "book_id": {"type": "string"},
        "line_scores": {
            "type": "array",
            "items": {"type": "number", "minimum": 0, "maximum": 1},
        },
    },
    "additionalProperties": False,
}


@dataclass(frozen=True)
class TransformConfig:
    c: float = 10.0
    threshold: float = 0.9

    def __post_init__(self):
        if self.c <= 0:
            raise ValueError("c must be positive")
        if not 0.0 <= self.threshold < 1.0:
            raise ValueError("threshold must lie in [0, 1)")


@dataclass(frozen=True)
class ScoreSeries:
    """Per-gap confidence entries, strictly increasing by gap index."""

    book_id: str
    entries: tuple[tuple[int, float], ...]
    source: str  # "woc-prominence" | "external"
    transformed: bool = False

    def __post_init__(self):
        gaps = [g for g, _ in self.entries]
        if gaps != sorted(set(gaps)):
            raise ValueError("entry gaps must be strictly increasing")

    @property
    def gaps(self) -> tuple[int, ...]:
        return tuple(g for g, _ in self.entries)

    @property
    def values(self) -> tuple[float, ...]:
        return tuple(v for _, v in self.entries)


def validate_gap_scores(data: dict) -> None:
    try:
        jsonschema.validate(data, GAP_SCORES_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise SchemaError(f"gap score file invalid: {exc.message}") from exc


def validate_line_scores(data: dict) -> None:
    try:
        jsonschema.validate(data, LINE_SCORES_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise SchemaError(f"line score file invalid: {exc.message}") from exc


def load_scores(path: str | Path, book: Book | None = None) -> ScoreSeries:
    """Load and validate an external gap-score file.

    When a book is supplied, every entry gap must be one of its
    paragraph breaks.
    """
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError(f"cannot read score file {path}: {exc}") from exc
    validate_gap_scores(data)
    entries = tuple((int(g), float(s)) for g, s in data["entries"])
    series = ScoreSeries(
        book_id=data["book_id"], entries=entries, source="external"
    )
    if book is not None:
        breaks = set(book.paragraph_breaks)
        bad = [g for g in series.gaps if g not in breaks]
        if bad:
            raise GapMismatchError(
                f"gaps {bad[:5]} are not paragraph breaks of {book.id!r}"
            )
    return series


def save_scores(series: ScoreSeries, path: str | Path) -> None:
    """Serialize with 12-significant-digit decimal scores.

    Values are quantized on first save; thereafter save(load(f)) is
    byte-identical to f.
    """
    payload = {
        "book_id": series.book_id,
        "entries": [[g, float(f"{v:.12g}")] for g, v in series.entries],
    }
    Path(path).write_text(
        json.dumps(payload, sort_keys=True, indent=None), encoding="utf-8"
    )


def log_transform(
    series: ScoreSeries, config: TransformConfig, lenient: bool = False
) -> ScoreSeries:
    """Drop entries below threshold, then map s -> -ln(1 - s) / c.

    The threshold applies to raw scores.  Scores of exactly 1.0 raise
    ScoreDomainError, or clamp to 1 - 1e-9 with a warning when lenient.
    """
    out = []
    for gap, s in series.entries:
        if s >= 1.0 or s < 0.0:
            if lenient and s == 1.0:
                warnings.warn(f"clamping saturated score at gap {gap}")
                s = 1.0 - 1e-9
            else:
                raise ScoreDomainError(f"score {s} at gap {gap} outside [0, 1)")
        if s < config.threshold:
            continue
        out.append((gap, -math.log(1.0 - s) / config.c))
    return ScoreSeries(
        book_id=series.book_id,
        entries=tuple(out),
        source=series.source,
        transformed=True,
    )


def normalize_prominences(
    minima: list[tuple[int, float]], book_id: str = ""
) -> ScoreSeries:
    """Min-max normalize WOC prominences onto [0, 1].

    All-equal prominences map to 1.0 so the segmenter still sees
    candidates; an empty input raises EmptySeriesError.
    """
    if not minima:
        raise EmptySeriesError("no minima to normalize")
    values = [p for _, p in minima]
    lo, hi = min(values), max(values)
    if hi == lo:
        entries = [(g, 1.0) for g, _ in minima]
    else:
        entries = [(g, (p - lo) / (hi - lo)) for g, p in minima]
    return ScoreSeries(
        book_id=book_id,
        entries=tuple(sorted(entries)),
        source="woc-prominence",
        transformed=True,
    )
