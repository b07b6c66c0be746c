"""Word-type tagging of reference transcripts and per-type recall.

Five types are tracked: hesitation, number, abbreviation, disfluency and
partial word. A reference token can carry several types; the overall recall
counts each tagged token once.
"""

from __future__ import annotations

import enum
import re
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Literal, Mapping, Optional, Sequence

from .alignment import align_tokens
from .normalization import (
    DEFAULT_ABBREVS,
    DEFAULT_LEXICON,
    SPOKEN,
    AbbreviationTable,
    HesitationLexicon,
    TokenStream,
    detect_partial_word,
    normalize_tokens,
)
from .numbers import is_number_word


class WordType(str, enum.Enum):
    HESITATION = "hesitation"
    NUMBER = "number"
    ABBREVIATION = "abbreviation"
    DISFLUENCY = "disfluency"
    PARTIAL = "partial"

    @property
    def label(self) -> str:
        return _LABELS[self]


_LABELS = {
    WordType.HESITATION: "Hesitation",
    WordType.NUMBER: "Number",
    WordType.ABBREVIATION: "Abbreviation",
    WordType.DISFLUENCY: "Disfluency",
    WordType.PARTIAL: "Partial Words",
}

_DIGITS = re.compile(r"[0-9]+")
_MARKUP = re.compile(r"(</?dis>)")


class MarkupError(ValueError):
    pass


@dataclass(frozen=True)
class Span:
    """Half-open token range ``[start, stop)`` with a tag."""

    start: int
    stop: int
    tag: str


@dataclass(frozen=True)
class AnnotatedReference:
    utterance_id: str
    tokens: tuple[str, ...]
    spans: tuple[Span, ...] = ()
    has_markup: bool = False

    def __post_init__(self):
        n = len(self.tokens)
        by_tag = defaultdict(list)
        for s in self.spans:
            if not 0 <= s.start < s.stop <= n:
                raise MarkupError(f"span {s} out of bounds for {n} tokens")
            if s.tag not in ("disfluency", "partial"):
                raise MarkupError(f"unknown span tag {s.tag!r}")
            by_tag[s.tag].append(s)
        for spans in by_tag.values():
            spans.sort(key=lambda s: s.start)
            for a, b in zip(spans, spans[1:]):
                if b.start < a.stop:
                    raise MarkupError(f"overlapping {a.tag} spans {a} and {b}")


def strip_markup(text: str) -> str:
    """Remove ``<dis>``/``</dis>`` tags, leaving the words in place."""
    return " ".join(_MARKUP.sub(" ", text).split())


def parse_annotated(utterance_id: str, text: str) -> AnnotatedReference:
    """Read a reference line that may carry ``<dis> ... </dis>`` markup and
    trailing-hyphen partial words. Tokens come out Speech-normalized with
    hesitation surface forms kept, so index ``i`` lines up with the Speech
    token stream of the same line."""
    tokens: list[str] = []
    spans: list[Span] = []
    open_at: Optional[int] = None
    has_markup = False
    for piece in _MARKUP.sub(r" \1 ", text).split():
        if piece == "<dis>":
            if open_at is not None:
                raise MarkupError(f"{utterance_id}: nested <dis>")
            open_at = len(tokens)
            has_markup = True
        elif piece == "</dis>":
            if open_at is None:
                raise MarkupError(f"{utterance_id}: </dis> without <dis>")
            if len(tokens) > open_at:
                spans.append(Span(open_at, len(tokens), "disfluency"))
            open_at = None
        else:
            for tok in normalize_tokens([piece], SPOKEN):
                if detect_partial_word(tok):
                    spans.append(Span(len(tokens), len(tokens) + 1, "partial"))
                tokens.append(tok)
    if open_at is not None:
        raise MarkupError(f"{utterance_id}: unclosed <dis>")
    return AnnotatedReference(utterance_id, tuple(tokens), tuple(spans), has_markup)


def detect_repetitions(tokens: Sequence[str]) -> list[Span]:
    """Spans where a word or a two-word phrase is immediately repeated.

    Both copies are covered; overlapping hits merge into one maximal span,
    so ``no no no`` gives a single span over all three tokens.
    """
    hits = []
    n = len(tokens)
    for size in (1, 2):
        for i in range(n - 2 * size + 1):
            if list(tokens[i:i + size]) == list(tokens[i + size:i + 2 * size]):
                hits.append((i, i + 2 * size))
    hits.sort()
    merged: list[list[int]] = []
    for start, stop in hits:
        if merged and start < merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], stop)
        else:
            merged.append([start, stop])
    return [Span(a, b, "disfluency") for a, b in merged]


@dataclass
class TypedSpanSet:
    utterance_id: str
    entries: dict[WordType, list[tuple[int, str]]] = field(
        default_factory=lambda: {t: [] for t in WordType}
    )

    def indices(self, wtype: WordType) -> list[int]:
        return [i for i, _ in self.entries[wtype]]

    def union(self) -> list[int]:
        return sorted({i for entries in self.entries.values() for i, _ in entries})

    def __len__(self) -> int:
        return sum(len(v) for v in self.entries.values())


def tag_reference(
    ref: AnnotatedReference,
    lexicon: HesitationLexicon = DEFAULT_LEXICON,
    abbrevs: AbbreviationTable = DEFAULT_ABBREVS,
    use_markup: Optional[bool] = None,
) -> TypedSpanSet:
    """Tag every reference token with the word types it belongs to.

    Disfluencies come from human markup when the reference carries it (or
    ``use_markup`` is forced on), otherwise from :func:`detect_repetitions`.
    """
    out = TypedSpanSet(ref.utterance_id)
    toks = ref.tokens
    markup = ref.has_markup if use_markup is None else use_markup
    dis_spans = [s for s in ref.spans if s.tag == "disfluency"] if markup else detect_repetitions(toks)
    dis = {i for s in dis_spans for i in range(s.start, s.stop)}
    partial = {i for s in ref.spans if s.tag == "partial" for i in range(s.start, s.stop)}
    partial |= {i for i, t in enumerate(toks) if detect_partial_word(t)}

    for i, tok in enumerate(toks):
        if tok in lexicon:
            out.entries[WordType.HESITATION].append((i, tok))
        if is_number_word(tok) or _DIGITS.fullmatch(tok):
            out.entries[WordType.NUMBER].append((i, tok))
        if tok in abbrevs.spoken_to_written:
            out.entries[WordType.ABBREVIATION].append((i, tok))
        if i in dis:
            out.entries[WordType.DISFLUENCY].append((i, tok))
        if i in partial:
            out.entries[WordType.PARTIAL].append((i, tok))
    return out


@dataclass
class TypeCount:
    c_all: int = 0
    c_correct: int = 0

    @property
    def recall(self) -> Optional[Fraction]:
        return Fraction(self.c_correct, self.c_all) if self.c_all else None


@dataclass
class RecallReport:
    per_type: dict[WordType, TypeCount] = field(
        default_factory=lambda: {t: TypeCount() for t in WordType}
    )
    overall_all: int = 0
    overall_correct: int = 0

    @property
    def overall_recall(self) -> Fraction:
        if not self.overall_all:
            return Fraction(0)
        return Fraction(self.overall_correct, self.overall_all)

    def __add__(self, other: "RecallReport") -> "RecallReport":
        return RecallReport(
            {
                t: TypeCount(self.per_type[t].c_all + other.per_type[t].c_all,
                             self.per_type[t].c_correct + other.per_type[t].c_correct)
                for t in WordType
            },
            self.overall_all + other.overall_all,
            self.overall_correct + other.overall_correct,
        )

    def to_json(self) -> dict:
        per_type = {}
        for t in WordType:
            c = self.per_type[t]
            per_type[t.value] = {
                "c_all": c.c_all,
                "c_correct": c.c_correct,
                "recall": None if c.recall is None else round(float(c.recall), 4),
            }
        return {
            "per_type": per_type,
            "overall_all": self.overall_all,
            "overall_correct": self.overall_correct,
            "overall_recall": round(float(self.overall_recall), 4),
        }


def _occurrence_credit(indices: Iterable[int], ref_tokens: Sequence[str], hyp_counts: Counter) -> set[int]:
    by_word: dict[str, list[int]] = defaultdict(list)
    for i in sorted(indices):
        by_word[ref_tokens[i]].append(i)
    credited = set()
    for word, idxs in by_word.items():
        credited.update(idxs[: min(len(idxs), hyp_counts[word])])
    return credited


def recall_report(
    spans: TypedSpanSet,
    ref: TokenStream,
    hyp: TokenStream,
    match: Literal["occurrence", "alignment"] = "occurrence",
) -> RecallReport:
    """Count C_all and C_correct per type for one utterance.

    ``occurrence`` credits a tagged reference word when the same word occurs
    in the hypothesis, clipped to the number of hypothesis occurrences.
    ``alignment`` credits only reference words aligned as matches.
    """
    ref_tokens = ref.tokens
    for entries in spans.entries.values():
        for i, _ in entries:
            if i >= len(ref_tokens):
                raise IndexError(f"{spans.utterance_id}: tag index {i} beyond reference length {len(ref_tokens)}")

    if match == "occurrence":
        hyp_counts = Counter(hyp.tokens)
        credit = lambda idx: _occurrence_credit(idx, ref_tokens, hyp_counts)  # noqa: E731
    elif match == "alignment":
        a = align_tokens(ref_tokens, hyp.tokens)
        matched = {i for i, op in enumerate(a.ref_index_ops()) if op.kind == "match"}
        credit = lambda idx: matched & set(idx)  # noqa: E731
    else:
        raise ValueError(f"unknown match mode {match!r}")

    report = RecallReport()
    for t in WordType:
        idx = spans.indices(t)
        report.per_type[t] = TypeCount(len(idx), len(credit(idx)))
    union = spans.union()
    report.overall_all = len(union)
    report.overall_correct = len(credit(union))
    return report


def render_recall_table(reports: Mapping[str, RecallReport], types: Optional[Sequence[WordType]] = None) -> str:
    """Rows are word types, then a final "Recall All" row; one C_correct column per system."""
    if not reports:
        return ""
    names = list(reports)
    first = reports[names[0]]
    types = list(types) if types is not None else list(WordType)
    header = ["Word Type", "C_all"] + names
    rows = []
    for t in types:
        rows.append([t.label, str(first.per_type[t].c_all)] + [str(reports[n].per_type[t].c_correct) for n in names])
    rows.append(["Recall All", "-"] + [f"{100 * float(reports[n].overall_recall):.1f}%" for n in names])
    widths = [max(len(r[k]) for r in [header] + rows) for k in range(len(header))]
    fmt = lambda r: " | ".join(c.ljust(w) if k == 0 else c.rjust(w) for k, (c, w) in enumerate(zip(r, widths)))  # noqa: E731
    rule = "-+-".join("-" * w for w in widths)
    return "\n".join([fmt(header), rule] + [fmt(r) for r in rows[:-1]] + [rule, fmt(rows[-1])])
