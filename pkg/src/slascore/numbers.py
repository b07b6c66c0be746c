"""English number-word grammar: spoken cardinal spans to digit strings and back."""

from __future__ import annotations

from typing import Sequence

UNITS = {
    "one": 1, "two": 2, "three": 3, "four": 4, "five": 5,
    "six": 6, "seven": 7, "eight": 8, "nine": 9,
}
TEENS = {
    "ten": 10, "eleven": 11, "twelve": 12, "thirteen": 13, "fourteen": 14,
    "fifteen": 15, "sixteen": 16, "seventeen": 17, "eighteen": 18, "nineteen": 19,
}
TENS = {
    "twenty": 20, "thirty": 30, "forty": 40, "fifty": 50,
    "sixty": 60, "seventy": 70, "eighty": 80, "ninety": 90,
}
SCALES = {"thousand": 1_000, "million": 1_000_000}

# "and" is only a connective; it never starts or ends a number on its own.
NUMBER_WORDS = frozenset(
    {"zero", "hundred", "and"} | UNITS.keys() | TEENS.keys() | TENS.keys() | SCALES.keys()
)


class MalformedNumber(ValueError):
    """A span of number words that does not form a cardinal."""


def is_number_word(token: str) -> bool:
    """True for cardinal vocabulary words, excluding the connective "and"."""
    return token in NUMBER_WORDS and token != "and"


def _below_hundred(toks: Sequence[str], i: int):
    if i >= len(toks):
        return None
    t = toks[i]
    if t in TENS:
        value = TENS[t]
        if i + 1 < len(toks) and toks[i + 1] in UNITS:
            return value + UNITS[toks[i + 1]], i + 2
        return value, i + 1
    if t in TEENS:
        return TEENS[t], i + 1
    if t in UNITS:
        return UNITS[t], i + 1
    return None


def _group(toks: Sequence[str], i: int):
    """Parse a value in 1..999 starting at ``i``."""
    if i + 1 < len(toks) and toks[i] in UNITS and toks[i + 1] == "hundred":
        value = UNITS[toks[i]] * 100
        i += 2
        if i < len(toks) and toks[i] == "and":
            rest = _below_hundred(toks, i + 1)
            if rest is None:
                raise MalformedNumber("dangling 'and' after hundred")
            return value + rest[0], rest[1]
        rest = _below_hundred(toks, i)
        if rest is not None:
            return value + rest[0], rest[1]
        return value, i
    return _below_hundred(toks, i)


def parse_number_words(tokens: Sequence[str]) -> str:
    """Convert a span such as ``["one", "hundred", "twenty", "three"]`` to ``"123"``.

    Multiplier words scale the group accumulated before them and must appear
    in strictly decreasing order. Raises :class:`MalformedNumber` for any span
    that is not a well-formed cardinal.
    """
    toks = list(tokens)
    if not toks:
        raise MalformedNumber("empty span")
    if toks == ["zero"]:
        return "0"
    total = 0
    last_scale = None
    i = 0
    n = len(toks)
    while i < n:
        if toks[i] == "and":
            # "one thousand and five": connective before a final sub-hundred part
            if last_scale is None or toks[i - 1] not in SCALES:
                raise MalformedNumber(f"unexpected 'and' at {i}")
            rest = _below_hundred(toks, i + 1)
            if rest is None or rest[1] != n:
                raise MalformedNumber("'and' must introduce the final part")
            total += rest[0]
            break
        group = _group(toks, i)
        if group is None:
            raise MalformedNumber(f"unexpected {toks[i]!r} at {i}")
        value, i = group
        if i < n and toks[i] in SCALES:
            scale = SCALES[toks[i]]
            if last_scale is not None and scale >= last_scale:
                raise MalformedNumber(f"scale {toks[i]!r} out of order")
            total += value * scale
            last_scale = scale
            i += 1
            continue
        total += value
        if i != n:
            raise MalformedNumber(f"trailing tokens from {i}: {toks[i:]}")
    return str(total)


_UNIT_NAMES = {v: k for k, v in UNITS.items()}
_TEEN_NAMES = {v: k for k, v in TEENS.items()}
_TENS_NAMES = {v: k for k, v in TENS.items()}


def _words_below_thousand(n: int) -> list[str]:
    words: list[str] = []
    if n >= 100:
        words += [_UNIT_NAMES[n // 100], "hundred"]
        n %= 100
    if n >= 20:
        words.append(_TENS_NAMES[n - n % 10])
        if n % 10:
            words.append(_UNIT_NAMES[n % 10])
    elif n >= 10:
        words.append(_TEEN_NAMES[n])
    elif n:
        words.append(_UNIT_NAMES[n])
    return words


def number_to_words(n: int) -> list[str]:
    """Spoken form of ``0 <= n < 10**9`` without connective "and"."""
    if not 0 <= n < 1_000_000_000:
        raise ValueError(f"out of range: {n}")
    if n == 0:
        return ["zero"]
    words: list[str] = []
    for name, scale in (("million", 1_000_000), ("thousand", 1_000)):
        if n >= scale:
            words += _words_below_thousand(n // scale) + [name]
            n %= scale
    return words + _words_below_thousand(n)
