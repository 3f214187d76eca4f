"""Parsing and rendering of Roman numerals and English number words.

Numeral kinds are identified by the same strings used for rule grammar
elements: ``roman_upper``, ``roman_lower``, ``cardinal_word``,
``ordinal_word``, ``digits``.
"""

from __future__ import annotations

import re

from .errors import MalformedNumeralError

# --------------------------------------------------------------------------
# Roman numerals (strict subtractive notation, 1..3999)

_ROMAN_VALUES = {"M": 1000, "D": 500, "C": 100, "L": 50, "X": 10, "V": 5, "I": 1}

# thousands, hundreds, tens, units digit renderings
_ROMAN_DIGITS = (
    ("", "M", "MM", "MMM"),
    ("", "C", "CC", "CCC", "CD", "D", "DC", "DCC", "DCCC", "CM"),
    ("", "X", "XX", "XXX", "XL", "L", "LX", "LXX", "LXXX", "XC"),
    ("", "I", "II", "III", "IV", "V", "VI", "VII", "VIII", "IX"),
)

ROMAN_STRICT_RE = re.compile(
    r"(?=[MDCLXVI])M{0,3}(?:CM|CD|D?C{0,3})(?:XC|XL|L?X{0,3})(?:IX|IV|V?I{0,3})"
)

# pattern fragments for the rule grammar (full-element, not anchored)
ROMAN_UPPER_PATTERN = ROMAN_STRICT_RE.pattern
ROMAN_LOWER_PATTERN = (
    r"(?=[mdclxvi])m{0,3}(?:cm|cd|d?c{0,3})(?:xc|xl|l?x{0,3})(?:ix|iv|v?i{0,3})"
)


def render_roman(n: int) -> str:
    """Standard subtractive Roman numeral for 1 <= n <= 3999."""
    if not 1 <= n <= 3999:
        raise ValueError(f"roman numerals cover 1..3999, got {n}")
    return (
        _ROMAN_DIGITS[0][n // 1000]
        + _ROMAN_DIGITS[1][n // 100 % 10]
        + _ROMAN_DIGITS[2][n // 10 % 10]
        + _ROMAN_DIGITS[3][n % 10]
    )


def parse_roman(text: str, lenient: bool = False) -> int:
    """Parse a Roman numeral.

    Strict mode (default) accepts exactly the subtractive forms produced
    by :func:`render_roman`; lenient mode also accepts additive spellings
    such as ``IIII`` as long as digit values never increase except in
    valid subtractive pairs.
    """
    s = text.strip().upper()
    if not s or any(c not in _ROMAN_VALUES for c in s):
        raise MalformedNumeralError(f"not a roman numeral: {text!r}")
    total = 0
    for i, c in enumerate(s):
        v = _ROMAN_VALUES[c]
        if i + 1 < len(s) and _ROMAN_VALUES[s[i + 1]] > v:
            total -= v
        else:
            total += v
    if total < 1 or total > 3999:
        raise MalformedNumeralError(f"roman numeral out of range: {text!r}")
    if not lenient and render_roman(total) != s:
        raise MalformedNumeralError(
            f"non-subtractive roman numeral {text!r} (use lenient mode)"
        )
    return total


# --------------------------------------------------------------------------
# Cardinal and ordinal number words, 1..999

_UNITS = (
    "zero one two three four five six seven eight nine ten eleven twelve "
    "thirteen fourteen fifteen sixteen seventeen eighteen nineteen"
).split()
_TENS = "twenty thirty forty fifty sixty seventy eighty ninety".split()

_ORDINAL_UNITS = (
    "zeroth first second third fourth fifth sixth seventh eighth ninth "
    "tenth eleventh twelfth thirteenth fourteenth fifteenth sixteenth "
    "seventeenth eighteenth nineteenth"
).split()
_ORDINAL_TENS = (
    "twentieth thirtieth fortieth fiftieth sixtieth seventieth eightieth "
    "ninetieth"
).split()

_CARDINAL_VALUES = {w: i for i, w in enumerate(_UNITS) if i > 0}
_CARDINAL_VALUES.update({w: (i + 2) * 10 for i, w in enumerate(_TENS)})
_ORDINAL_VALUES = {w: i for i, w in enumerate(_ORDINAL_UNITS) if i > 0}
_ORDINAL_VALUES.update({w: (i + 2) * 10 for i, w in enumerate(_ORDINAL_TENS)})
_ORDINAL_VALUES["hundredth"] = 100


def render_cardinal(n: int) -> str:
    """English cardinal words for 1 <= n <= 999 (no 'and')."""
    if not 1 <= n <= 999:
        raise ValueError(f"cardinal words cover 1..999, got {n}")
    parts = []
    if n >= 100:
        parts.append(_UNITS[n // 100])
        parts.append("hundred")
        n %= 100
    if n >= 20:
        tens_word = _TENS[n // 10 - 2]
        if n % 10:
            parts.append(f"{tens_word}-{_UNITS[n % 10]}")
        else:
            parts.append(tens_word)
    elif n > 0:
        parts.append(_UNITS[n])
    return " ".join(parts)


def render_ordinal(n: int) -> str:
    """English ordinal words for 1 <= n <= 999."""
    if not 1 <= n <= 999:
        raise ValueError(f"ordinal words cover 1..999, got {n}")
    hundreds, tail = divmod(n, 100)
    parts = []
    if hundreds:
        if tail == 0:
            if hundreds == 1:
                return "hundredth"
            return f"{_UNITS[hundreds]} hundredth"
        parts.append(f"{_UNITS[hundreds]} hundred")
    if tail >= 20:
        if tail % 10:
            parts.append(f"{_TENS[tail // 10 - 2]}-{_ORDINAL_UNITS[tail % 10]}")
        else:
            parts.append(_ORDINAL_TENS[tail // 10 - 2])
    elif tail:
        parts.append(_ORDINAL_UNITS[tail])
    return " ".join(parts)


_WORD_SPLIT_RE = re.compile(r"[\s-]+")


def _small_value(words: list[str], ordinal: bool, text: str) -> int:
    """Value of a 1..99 word group (the part after any hundreds)."""
    last_table = _ORDINAL_VALUES if ordinal else _CARDINAL_VALUES
    if len(words) == 1:
        w = words[0]
        if w not in last_table:
            raise MalformedNumeralError(f"unknown word {w!r} in {text!r}")
        return last_table[w]
    if len(words) == 2:
        tens, unit = words
        if (
            tens in _CARDINAL_VALUES
            and _CARDINAL_VALUES[tens] % 10 == 0
            and _CARDINAL_VALUES[tens] >= 20
            and unit in last_table
            and 1 <= last_table[unit] <= 9
        ):
            return _CARDINAL_VALUES[tens] + last_table[unit]
    raise MalformedNumeralError(f"malformed word numeral: {text!r}")


def _parse_words(text: str, ordinal: bool) -> int:
    words = [w for w in _WORD_SPLIT_RE.split(text.strip().lower()) if w]
    words = [w for w in words if w != "and"]
    if not words:
        raise MalformedNumeralError(f"empty numeral: {text!r}")
    if ordinal and words[-1] == "hundredth":
        head = words[:-1]
        if not head:
            return 100
        if len(head) == 1 and 1 <= _CARDINAL_VALUES.get(head[0], 0) <= 9:
            return _CARDINAL_VALUES[head[0]] * 100
        raise MalformedNumeralError(f"malformed word numeral: {text!r}")
    total = 0
    if "hundred" in words:
        h = words.index("hundred")
        if h != 1 or not 1 <= _CARDINAL_VALUES.get(words[0], 0) <= 9:
            raise MalformedNumeralError(f"bad hundreds in {text!r}")
        total = _CARDINAL_VALUES[words[0]] * 100
        words = words[2:]
        if not words:
            if ordinal:
                raise MalformedNumeralError(f"{text!r} lacks an ordinal ending")
            return total
    value = total + _small_value(words, ordinal, text)
    if not 1 <= value <= 999:
        raise MalformedNumeralError(f"word numeral out of range: {text!r}")
    return value


def parse_cardinal(text: str) -> int:
    return _parse_words(text, ordinal=False)


def parse_ordinal(text: str) -> int:
    return _parse_words(text, ordinal=True)


# --------------------------------------------------------------------------
# Grammar pattern fragments and the dispatch table

def _alternation(words) -> str:
    # longest-first so e.g. 'sixteen' wins over 'six'
    return "|".join(sorted(words, key=len, reverse=True))


def _cardinal_pattern() -> str:
    unit = _alternation(_UNITS[1:20])
    tens = _alternation(_TENS)
    small = f"(?:(?:{tens})(?:[ -](?:{unit}))?|(?:{unit}))"
    return f"(?i:(?:{unit})[ -]hundred(?:[ -](?:and[ -])?{small})?|{small})"


def _ordinal_pattern() -> str:
    unit = _alternation(_UNITS[1:20])
    ounit = _alternation(_ORDINAL_UNITS[1:20])
    tens = _alternation(_TENS)
    otens = _alternation(_ORDINAL_TENS)
    osmall = f"(?:(?:{tens})[ -](?:{ounit})|(?:{otens})|(?:{ounit}))"
    return (
        f"(?i:(?:{unit})[ -]hundred(?:[ -](?:and[ -])?{osmall})?"
        f"|(?:{unit})[ -]hundredth|hundredth|{osmall})"
    )


CARDINAL_WORD_PATTERN = _cardinal_pattern()
ORDINAL_WORD_PATTERN = _ordinal_pattern()
DIGITS_PATTERN = r"[1-9][0-9]{0,3}"

NUMBER_KINDS = (
    "roman_upper",
    "roman_lower",
    "cardinal_word",
    "ordinal_word",
    "digits",
)

_PATTERNS = {
    "roman_upper": ROMAN_UPPER_PATTERN,
    "roman_lower": ROMAN_LOWER_PATTERN,
    "cardinal_word": CARDINAL_WORD_PATTERN,
    "ordinal_word": ORDINAL_WORD_PATTERN,
    "digits": DIGITS_PATTERN,
}


def kind_pattern(kind: str) -> str:
    """Regex fragment matching any numeral of the given kind."""
    return _PATTERNS[str(kind)]


def parse_number(text: str, kind: str, lenient_roman: bool = False) -> int:
    """Parse a numeral known to be of the given kind; value is >= 1."""
    kind = str(kind)
    if kind == "roman_upper" or kind == "roman_lower":
        if kind == "roman_upper" and text != text.upper():
            raise MalformedNumeralError(f"expected uppercase roman: {text!r}")
        if kind == "roman_lower" and text != text.lower():
            raise MalformedNumeralError(f"expected lowercase roman: {text!r}")
        return parse_roman(text, lenient=lenient_roman)
    if kind == "cardinal_word":
        return parse_cardinal(text)
    if kind == "ordinal_word":
        return parse_ordinal(text)
    if kind == "digits":
        if not re.fullmatch(DIGITS_PATTERN, text.strip()):
            raise MalformedNumeralError(f"not a positive integer: {text!r}")
        return int(text)
    raise ValueError(f"unknown numeral kind {kind!r}")


def number_pattern(n: int, kind: str) -> str:
    """Regex fragment matching exactly the number ``n`` in the given kind.

    Used by the missing-chapter hunt to search for a specific absent
    number rendered the way its run renders numbers.
    """
    kind = str(kind)
    if kind == "roman_upper":
        return re.escape(render_roman(n))
    if kind == "roman_lower":
        return re.escape(render_roman(n).lower())
    if kind == "digits":
        return str(n)
    if kind == "cardinal_word":
        words = render_cardinal(n)
    elif kind == "ordinal_word":
        words = render_ordinal(n)
    else:
        raise ValueError(f"unknown numeral kind {kind!r}")
    parts = [w for w in _WORD_SPLIT_RE.split(words) if w]
    joined = r"[ -]".join(re.escape(p) for p in parts)
    # tolerate an optional 'and' after 'hundred'
    joined = joined.replace(r"hundred[ -]", r"hundred[ -](?:and[ -])?")
    return f"(?i:{joined})"
