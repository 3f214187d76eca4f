"""Chapter-heading rule grammar: generation, matching, and export.

Rules are built from constituent elements (keyword, numeral in five
notations, separator punctuation, title in two casings).  Every valid
element sequence from the production table below compiles to one anchored
full-line regular expression.  The table is deliberately explicit so the
generated inventory is deterministic, order-stable, and countable.

Production table
----------------
A rule is ``keyword? number? title?`` with at least one of keyword/number
present, where

* number is one of five notations: uppercase/lowercase Roman numerals,
  cardinal words, ordinal words, decimal digits;
* title is uppercase (all cased letters uppercase) or mixed
  (headline-style capitalization, at least one lowercase letter);
* a separator punctuation element may fill each junction between present
  elements, plus one trailing position.

Counting the separator subsets: keyword-only has 1 junction slot
(trailing), keyword+number and keyword+title have 2, keyword+number+title
has 3, number-only 1, number+title 2, which yields
``2 + 5*4 + 2*4 + 10*8 + 5*2 + 10*4 = 160`` rules.
"""

from __future__ import annotations

import enum
import json
import re
from dataclasses import dataclass
from itertools import product

from . import numerals


class ElementKind(str, enum.Enum):
    KEYWORD = "keyword"
    PUNCTUATION = "punctuation"
    TITLE_UPPER = "title_upper"
    TITLE_MIXED = "title_mixed"
    ROMAN_UPPER = "roman_upper"
    ROMAN_LOWER = "roman_lower"
    CARDINAL_WORD = "cardinal_word"
    ORDINAL_WORD = "ordinal_word"
    DIGITS = "digits"

    def __str__(self) -> str:
        return self.value


NUMBER_KINDS = (
    ElementKind.ROMAN_UPPER,
    ElementKind.ROMAN_LOWER,
    ElementKind.CARDINAL_WORD,
    ElementKind.ORDINAL_WORD,
    ElementKind.DIGITS,
)
TITLE_KINDS = (ElementKind.TITLE_UPPER, ElementKind.TITLE_MIXED)

KEYWORDS = ("chapter", "section", "volume", "book", "part", "stave", "canto")

# element priority for tie-breaking: keyword > number > title > punctuation
_PRIORITY = {ElementKind.KEYWORD: 3}
_PRIORITY.update({k: 2 for k in NUMBER_KINDS})
_PRIORITY.update({k: 1 for k in TITLE_KINDS})
_PRIORITY[ElementKind.PUNCTUATION] = 0

# separator punctuation allowed inside headings: period, colon, dashes
PUNCT_PATTERN = r"[.:—–-]+"

_KEYWORD_PATTERN = f"(?i:{'|'.join(KEYWORDS)})"
# uppercase titles may contain digits but need at least one uppercase letter
_TITLE_UPPER_PATTERN = (
    r"(?=[^a-z]*[A-Z])[A-Z0-9][A-Z0-9'’-]*"
    r"(?:[ \t]+[A-Z0-9][A-Z0-9'’-]*)*"
)
_TITLE_LOWER_LINKWORDS = (
    "of the and a an in on at to for with or nor from by"
).split()
_TITLE_MIXED_PATTERN = (
    r"(?=[^a-z\n]*[a-z])[A-Z][A-Za-z'’-]*"
    r"(?:[ \t]+(?:" + "|".join(_TITLE_LOWER_LINKWORDS) + r"|[A-Z][A-Za-z'’-]*))*"
)

_FRAGMENTS = {
    ElementKind.KEYWORD: f"(?P<keyword>{_KEYWORD_PATTERN})",
    ElementKind.PUNCTUATION: PUNCT_PATTERN,
    ElementKind.TITLE_UPPER: f"(?P<title>{_TITLE_UPPER_PATTERN})",
    ElementKind.TITLE_MIXED: f"(?P<title>{_TITLE_MIXED_PATTERN})",
    ElementKind.ROMAN_UPPER: "(?P<number>{})".format(numerals.ROMAN_UPPER_PATTERN),
    ElementKind.ROMAN_LOWER: "(?P<number>{})".format(numerals.ROMAN_LOWER_PATTERN),
    ElementKind.CARDINAL_WORD: "(?P<number>{})".format(numerals.CARDINAL_WORD_PATTERN),
    ElementKind.ORDINAL_WORD: "(?P<number>{})".format(numerals.ORDINAL_WORD_PATTERN),
    ElementKind.DIGITS: "(?P<number>{})".format(numerals.DIGITS_PATTERN),
}

MAX_TITLE_LENGTH = 120

_SHORT_CODES = {
    ElementKind.KEYWORD: "kw",
    ElementKind.PUNCTUATION: "p",
    ElementKind.TITLE_UPPER: "tu",
    ElementKind.TITLE_MIXED: "tm",
    ElementKind.ROMAN_UPPER: "ru",
    ElementKind.ROMAN_LOWER: "rl",
    ElementKind.CARDINAL_WORD: "cw",
    ElementKind.ORDINAL_WORD: "ow",
    ElementKind.DIGITS: "dg",
}

_FORMAT_LABELS = {
    ElementKind.KEYWORD: "Keyword",
    ElementKind.PUNCTUATION: ".",
    ElementKind.TITLE_UPPER: "TITLE",
    ElementKind.TITLE_MIXED: "Title",
    ElementKind.ROMAN_UPPER: "ROMAN",
    ElementKind.ROMAN_LOWER: "roman",
    ElementKind.CARDINAL_WORD: "Cardinal",
    ElementKind.ORDINAL_WORD: "Ordinal",
    ElementKind.DIGITS: "#",
}


@dataclass(frozen=True)
class RuleElement:
    kind: ElementKind
    pattern: str
    priority: int


@dataclass(frozen=True)
class HeaderRule:
    """One compiled full-line heading rule."""

    id: str
    index: int
    elements: tuple[ElementKind, ...]
    pattern: str
    template: str  # pattern with {NUMBER} placeholder for the hunt
    compiled: re.Pattern
    number_kind: ElementKind | None
    n_elements: int

    @property
    def format_label(self) -> str:
        return " ".join(_FORMAT_LABELS[k] for k in self.elements)

    def specialize(self, number: int) -> re.Pattern:
        """Compile this rule with its number element pinned to ``number``."""
        if self.number_kind is None:
            raise ValueError(f"rule {self.id} has no number element")
        frag = numerals.number_pattern(number, self.number_kind.value)
        body = self.template.format(NUMBER=f"(?P<number>{frag})")
        return re.compile(f"^{body}$")


@dataclass(frozen=True)
class RuleMatch:
    """Result of matching one physical line against the rule inventory."""

    rule_id: str
    rule_index: int
    line_span: tuple[int, int]
    number: int | None
    number_format: ElementKind | None
    title: str | None
    keyword: str | None = None


def _assemble(sequence: tuple[ElementKind, ...]) -> tuple[str, str]:
    """Join element fragments into (pattern, template) bodies."""
    pieces = []
    template_pieces = []
    prev: ElementKind | None = None
    for kind in sequence:
        if prev is not None:
            both_punct = ElementKind.PUNCTUATION in (prev, kind)
            pieces.append(r"[ \t]*" if both_punct else r"[ \t]+")
            template_pieces.append(pieces[-1])
        frag = _FRAGMENTS[kind]
        pieces.append(frag)
        if kind in NUMBER_KINDS:
            template_pieces.append("{NUMBER}")
        else:
            template_pieces.append(frag.replace("{", "{{").replace("}", "}}"))
        prev = kind
    return "".join(pieces), "".join(template_pieces)


def _sequences() -> list[tuple[ElementKind, ...]]:
    """All element sequences of the production table, in priority order."""
    sequences: list[tuple[ElementKind, ...]] = []
    keyword_opts = (True, False)
    number_opts = (None,) + NUMBER_KINDS
    title_opts = (None,) + TITLE_KINDS
    for has_kw, num, title in product(keyword_opts, number_opts, title_opts):
        if not has_kw and num is None:
            continue  # at least one of keyword/number
        core: list[ElementKind] = []
        if has_kw:
            core.append(ElementKind.KEYWORD)
        if num is not None:
            core.append(num)
        if title is not None:
            core.append(title)
        n_junctions = len(core)  # between consecutive elements + trailing
        for slots in product((False, True), repeat=n_junctions):
            seq: list[ElementKind] = []
            for pos, kind in enumerate(core):
                seq.append(kind)
                if pos < len(core) - 1 and slots[pos]:
                    seq.append(ElementKind.PUNCTUATION)
            if slots[-1]:
                seq.append(ElementKind.PUNCTUATION)
            sequences.append(tuple(seq))
    return sequences


def generate_rules() -> tuple[HeaderRule, ...]:
    """Generate the full rule inventory, deterministic and order-stable."""
    rules = []
    for index, seq in enumerate(_sequences()):
        pattern_body, template_body = _assemble(seq)
        pattern = r"[ \t]*" + pattern_body + r"[ \t]*"
        template = r"[ \t]*" + template_body + r"[ \t]*"
        number_kind = next((k for k in seq if k in NUMBER_KINDS), None)
        rid = "-".join(_SHORT_CODES[k] for k in seq)
        rules.append(
            HeaderRule(
                id=rid,
                index=index,
                elements=seq,
                pattern=pattern,
                template=template,
                compiled=re.compile(f"^{pattern}$"),
                number_kind=number_kind,
                n_elements=len(seq),
            )
        )
    return tuple(rules)


def _match_one(rule: HeaderRule, line: str) -> RuleMatch | None:
    m = rule.compiled.match(line)
    if m is None:
        return None
    title = m.groupdict().get("title")
    if title is not None and len(title) > MAX_TITLE_LENGTH:
        return None
    number = None
    if rule.number_kind is not None:
        try:
            number = numerals.parse_number(
                m.group("number"), rule.number_kind.value, lenient_roman=True
            )
        except numerals.MalformedNumeralError:
            return None
    return RuleMatch(
        rule_id=rule.id,
        rule_index=rule.index,
        line_span=(0, len(line)),
        number=number,
        number_format=rule.number_kind,
        title=title,
        keyword=m.groupdict().get("keyword"),
    )


def best_match(line: str, rules) -> RuleMatch | None:
    """Best full-line rule match, or None.

    The winner captures the most constituent elements; residual ties are
    broken by element priority (keyword > number > title) and then by
    rule generation order.
    """
    line = line.rstrip()
    best: RuleMatch | None = None
    best_key = None
    for rule in rules:
        m = _match_one(rule, line)
        if m is None:
            continue
        key = (
            rule.n_elements,
            int(ElementKind.KEYWORD in rule.elements),
            int(rule.number_kind is not None),
            int(any(k in TITLE_KINDS for k in rule.elements)),
            -rule.index,
        )
        if best_key is None or key > best_key:
            best, best_key = m, key
    if best is not None:
        # re-verify the invariant: the winner full-line matches
        rule = next(r for r in rules if r.id == best.rule_id)
        assert rule.compiled.match(line) is not None
    return best


def rules_to_json(rules) -> str:
    """Auditable JSON export of the rule inventory."""
    payload = [
        {
            "id": r.id,
            "index": r.index,
            "elements": [str(k) for k in r.elements],
            "pattern": r.pattern,
            "format": r.format_label,
        }
        for r in rules
    ]
    return json.dumps(payload, indent=2)
