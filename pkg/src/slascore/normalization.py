"""Transcript normalization under the Raw, Standard and Speech scoring profiles.

Each profile is a fixed recipe of per-token rewrites applied in the order
case-fold, abbreviation, punctuation, hesitation, partial word, number.
The Speech profile is 1:1 on surviving tokens, which the word-type tagger
relies on to keep reference indices aligned.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Literal, Mapping, Sequence, Union

from .numbers import NUMBER_WORDS, MalformedNumber, parse_number_words

SENTINEL = "%hes%"

DEFAULT_HESITATIONS = frozenset(
    {"uh", "um", "er", "erm", "mm", "hmm", "uhu", "mhm", "hm"}
)
DEFAULT_ABBREVIATIONS = (
    ("mister", "mr"),
    ("missus", "mrs"),
    ("doctor", "dr"),
    ("saint", "st"),
    ("okay", "ok"),
)

HesitationPolicy = Literal["keep", "remove", "map_to_sentinel"]
NumberPolicy = Literal["keep", "words_to_digits"]
PartialPolicy = Literal["keep", "remove"]
AbbreviationPolicy = Literal["keep", "canonicalize_to_written"]


@dataclass(frozen=True)
class RawText:
    utterance_id: str
    text: str

    def __post_init__(self):
        if not self.utterance_id:
            raise ValueError("utterance_id must be non-empty")


@dataclass(frozen=True)
class TokenStream:
    utterance_id: str
    tokens: tuple[str, ...]
    profile: str

    def __len__(self) -> int:
        return len(self.tokens)

    def text(self) -> str:
        return " ".join(self.tokens)


@dataclass(frozen=True)
class NormalizationProfile:
    name: str
    case_fold: bool
    strip_punctuation: bool
    hesitation_policy: HesitationPolicy
    number_policy: NumberPolicy
    partial_word_policy: PartialPolicy
    abbreviation_policy: AbbreviationPolicy


RAW = NormalizationProfile(
    name="raw",
    case_fold=True,
    strip_punctuation=False,
    hesitation_policy="keep",
    number_policy="keep",
    partial_word_policy="keep",
    abbreviation_policy="keep",
)
RAW_CASE_SENSITIVE = replace(RAW, case_fold=False)
STANDARD = NormalizationProfile(
    name="standard",
    case_fold=True,
    strip_punctuation=True,
    hesitation_policy="remove",
    number_policy="words_to_digits",
    partial_word_policy="remove",
    abbreviation_policy="canonicalize_to_written",
)
SPEECH = NormalizationProfile(
    name="speech",
    case_fold=True,
    strip_punctuation=True,
    hesitation_policy="map_to_sentinel",
    number_policy="keep",
    partial_word_policy="keep",
    abbreviation_policy="keep",
)
# Speech with spoken hesitation forms left in place; used for word-type tagging.
SPOKEN = replace(SPEECH, name="speech", hesitation_policy="keep")

PROFILES = {p.name: p for p in (RAW, STANDARD, SPEECH)}


class HesitationLexicon:
    """Surface forms of filled pauses."""

    def __init__(self, surface_forms: Iterable[str] = DEFAULT_HESITATIONS):
        self.surface_forms = frozenset(f.lower() for f in surface_forms)
        if not self.surface_forms:
            raise ValueError("hesitation lexicon must be non-empty")

    def __contains__(self, token: str) -> bool:
        return token in self.surface_forms or token == SENTINEL

    def __eq__(self, other):
        return isinstance(other, HesitationLexicon) and self.surface_forms == other.surface_forms

    def __hash__(self):
        return hash(self.surface_forms)

    @classmethod
    def from_file(cls, path: Union[str, Path], extend_default: bool = True) -> "HesitationLexicon":
        forms = set(DEFAULT_HESITATIONS) if extend_default else set()
        forms.update(line for line in _entry_lines(path))
        return cls(forms)


class AbbreviationTable:
    """Bidirectional spoken/written pairs such as ``("mister", "mr")``."""

    def __init__(self, entries: Iterable[tuple[str, str]] = DEFAULT_ABBREVIATIONS):
        self.spoken_to_written: dict[str, str] = {}
        self.written_to_spoken: dict[str, str] = {}
        for spoken, written in entries:
            spoken, written = spoken.lower(), written.lower()
            if len(spoken) < 2 or not spoken.isalpha():
                raise ValueError(f"spoken form must be a multi-character word: {spoken!r}")
            if self.spoken_to_written.get(spoken, written) != written:
                raise ValueError(f"spoken form {spoken!r} maps to two written forms")
            if self.written_to_spoken.get(written, spoken) != spoken:
                raise ValueError(f"written form {written!r} maps to two spoken forms")
            self.spoken_to_written[spoken] = written
            self.written_to_spoken[written] = spoken

    @property
    def spoken_forms(self) -> frozenset[str]:
        return frozenset(self.spoken_to_written)

    @classmethod
    def from_file(cls, path: Union[str, Path], extend_default: bool = True) -> "AbbreviationTable":
        entries = list(DEFAULT_ABBREVIATIONS) if extend_default else []
        for line in _entry_lines(path):
            parts = line.split("\t")
            if len(parts) != 2 or not all(p.strip() for p in parts):
                raise ValueError(f"{path}: expected 'spoken<TAB>written', got {line!r}")
            entries.append((parts[0].strip(), parts[1].strip()))
        return cls(entries)


def _entry_lines(path: Union[str, Path]):
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            yield line.strip() if "\t" not in line else line


DEFAULT_LEXICON = HesitationLexicon()
DEFAULT_ABBREVS = AbbreviationTable()


def detect_partial_word(token: str) -> bool:
    """True for tokens like ``"p-"``: a trailing hyphen after at least one character."""
    return len(token) >= 2 and token.endswith("-")


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch)[0] in "PS"


_AFFIX = re.compile(r"^(\W*)(.*?)(\W*)$", re.S)
_TRAILING_HYPHENS = re.compile(r"-{2,}$")


def strip_punctuation(token: str) -> str:
    """Drop punctuation and symbols, keeping internal hyphens/apostrophes,
    a trailing partial-word hyphen, and the hesitation sentinel."""
    if token == SENTINEL or "".join(c for c in token if c == "%" or not _is_punct(c)) == SENTINEL:
        return SENTINEL
    s = "".join(c for c in token if c in "-'" or not _is_punct(c))
    while True:
        t = _TRAILING_HYPHENS.sub("-", s.lstrip("-'").rstrip("'"))
        if t == s:
            return s
        s = t


def _canonicalize_abbreviation(token: str, abbrevs: AbbreviationTable) -> str:
    prefix, core, suffix = _AFFIX.match(token).groups()
    written = abbrevs.spoken_to_written.get(core)
    return token if written is None else prefix + written + suffix


def digitize_numbers(tokens: Sequence[str]) -> list[str]:
    """Replace number-word spans with digit strings, greedily left to right,
    longest well-formed span first; malformed spans stay as words."""
    out: list[str] = []
    i = 0
    n = len(tokens)
    while i < n:
        if tokens[i] not in NUMBER_WORDS or tokens[i] == "and":
            out.append(tokens[i])
            i += 1
            continue
        end = i
        while end < n and tokens[end] in NUMBER_WORDS:
            end += 1
        for j in range(end, i, -1):
            try:
                out.append(parse_number_words(tokens[i:j]))
            except MalformedNumber:
                continue
            i = j
            break
        else:
            out.append(tokens[i])
            i += 1
    return out


def normalize_tokens(
    words: Sequence[str],
    profile: NormalizationProfile,
    lexicon: HesitationLexicon = DEFAULT_LEXICON,
    abbrevs: AbbreviationTable = DEFAULT_ABBREVS,
) -> list[str]:
    toks = list(words)
    if profile.case_fold:
        toks = [t.lower() for t in toks]
    if profile.abbreviation_policy == "canonicalize_to_written":
        toks = [_canonicalize_abbreviation(t, abbrevs) for t in toks]
    if profile.strip_punctuation:
        toks = [strip_punctuation(t) for t in toks]
    toks = [t for t in toks if t]
    if profile.hesitation_policy == "remove":
        toks = [t for t in toks if t not in lexicon]
    elif profile.hesitation_policy == "map_to_sentinel":
        toks = [SENTINEL if t in lexicon else t for t in toks]
    if profile.partial_word_policy == "remove":
        toks = [t for t in toks if not detect_partial_word(t)]
    if profile.number_policy == "words_to_digits":
        toks = digitize_numbers(toks)
    return toks


def normalize(
    raw: Union[RawText, str],
    profile: NormalizationProfile,
    lexicon: HesitationLexicon = DEFAULT_LEXICON,
    abbrevs: AbbreviationTable = DEFAULT_ABBREVS,
) -> TokenStream:
    """Normalize one utterance into a :class:`TokenStream`.

    >>> normalize("He bought um 20 games.", SPEECH).tokens
    ('he', 'bought', '%hes%', '20', 'games')
    """
    if isinstance(raw, str):
        raw = RawText("_", raw)
    toks = normalize_tokens(raw.text.split(), profile, lexicon, abbrevs)
    return TokenStream(raw.utterance_id, tuple(toks), profile.name)


def get_profile(name: str, raw_case_sensitive: bool = False) -> NormalizationProfile:
    if name == "raw" and raw_case_sensitive:
        return RAW_CASE_SENSITIVE
    try:
        return PROFILES[name]
    except KeyError:
        raise ValueError(f"unknown profile {name!r}; expected one of {sorted(PROFILES)}") from None


def profile_table(profiles: Mapping[str, NormalizationProfile] = PROFILES) -> list[tuple]:
    return [
        (p.name, p.case_fold, p.strip_punctuation, p.hesitation_policy,
         p.partial_word_policy, p.number_policy, p.abbreviation_policy)
        for p in profiles.values()
    ]
