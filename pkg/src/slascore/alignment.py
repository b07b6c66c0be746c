"""Word alignment and WER with substitution/deletion/insertion breakdown."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal, Optional, Sequence

from . import _kernel
from .normalization import TokenStream

log = logging.getLogger(__name__)

OpKind = Literal["match", "sub", "del", "ins"]
_KINDS = ("match", "sub", "del", "ins")


class ProfileMismatch(ValueError):
    pass


class EmptyReferenceWithInsertions(ValueError):
    """WER is undefined for an empty reference with a non-empty hypothesis."""


@dataclass(frozen=True)
class EditOp:
    kind: OpKind
    ref_token: Optional[str] = None
    hyp_token: Optional[str] = None


@dataclass(frozen=True)
class Alignment:
    ops: tuple[EditOp, ...]
    n_ref: int
    n_sub: int
    n_del: int
    n_ins: int
    utterance_id: str = ""

    @property
    def n_match(self) -> int:
        return self.n_ref - self.n_sub - self.n_del

    @property
    def errors(self) -> int:
        return self.n_sub + self.n_del + self.n_ins

    def ref_tokens(self) -> list[str]:
        return [op.ref_token for op in self.ops if op.kind != "ins"]

    def hyp_tokens(self) -> list[str]:
        return [op.hyp_token for op in self.ops if op.kind != "del"]

    def ref_index_ops(self) -> list[EditOp]:
        """The op covering each reference position, in reference order."""
        return [op for op in self.ops if op.kind != "ins"]


@dataclass(frozen=True)
class WerBreakdown:
    """Rates in percent of reference words, kept as exact rationals."""

    sub_rate: Fraction
    del_rate: Fraction
    ins_rate: Fraction
    n_ref: int = 0
    n_sub: int = 0
    n_del: int = 0
    n_ins: int = 0

    @property
    def wer(self) -> Fraction:
        return self.sub_rate + self.del_rate + self.ins_rate

    def rendered(self) -> dict[str, str]:
        return {
            "sub": render_rate(self.sub_rate),
            "del": render_rate(self.del_rate),
            "ins": render_rate(self.ins_rate),
            "wer": render_rate(self.wer),
        }


def render_rate(rate: Fraction) -> str:
    """One decimal place, half-up on the exact rational."""
    tenths = (rate * 10 * 2 + 1) // 2
    sign = "-" if tenths < 0 else ""
    tenths = abs(tenths)
    return f"{sign}{tenths // 10}.{tenths % 10}"


def align_tokens(ref: Sequence[str], hyp: Sequence[str], utterance_id: str = "") -> Alignment:
    vocab: dict[str, int] = {}
    ref_ids = [vocab.setdefault(t, len(vocab)) for t in ref]
    hyp_ids = [vocab.setdefault(t, len(vocab)) for t in hyp]
    codes = _kernel.edit_ops(ref_ids, hyp_ids)

    ops = []
    counts = [0, 0, 0, 0]
    i = j = 0
    for code in codes:
        counts[code] += 1
        kind = _KINDS[code]
        if kind == "del":
            ops.append(EditOp(kind, ref[i], None))
            i += 1
        elif kind == "ins":
            ops.append(EditOp(kind, None, hyp[j]))
            j += 1
        else:
            ops.append(EditOp(kind, ref[i], hyp[j]))
            i += 1
            j += 1
    return Alignment(tuple(ops), len(ref), counts[1], counts[2], counts[3], utterance_id)


def align(ref: TokenStream, hyp: TokenStream) -> Alignment:
    """Minimal unit-cost alignment.

    Equal-cost alignments are ranked by match count first (so counts do not
    depend on which side is the reference), then traced back preferring
    match > sub > del > ins.
    """
    if ref.profile != hyp.profile:
        raise ProfileMismatch(f"reference is {ref.profile!r}, hypothesis is {hyp.profile!r}")
    return align_tokens(ref.tokens, hyp.tokens, ref.utterance_id)


def wer(a: Alignment) -> WerBreakdown:
    if a.n_ref == 0:
        if a.n_ins:
            raise EmptyReferenceWithInsertions(
                f"utterance {a.utterance_id!r}: {a.n_ins} insertions against an empty reference"
            )
        return WerBreakdown(Fraction(0), Fraction(0), Fraction(0))
    scale = Fraction(100, a.n_ref)
    return WerBreakdown(
        a.n_sub * scale, a.n_del * scale, a.n_ins * scale,
        a.n_ref, a.n_sub, a.n_del, a.n_ins,
    )


def usable(alignments: Sequence[Alignment]) -> tuple[list[Alignment], list[Alignment]]:
    """Split into scoreable alignments and those with an empty reference but insertions."""
    keep, excluded = [], []
    for a in alignments:
        (excluded if a.n_ref == 0 and a.n_ins else keep).append(a)
    for a in excluded:
        log.warning("excluding %r from corpus WER: empty reference with %d insertions",
                    a.utterance_id, a.n_ins)
    return keep, excluded


def corpus_wer(
    alignments: Sequence[Alignment],
    agg: Literal["pooled", "averaged"] = "pooled",
) -> WerBreakdown:
    """Corpus WER. ``pooled`` divides total errors by total reference words;
    ``averaged`` takes the mean of per-utterance rates over non-empty references."""
    if not alignments:
        raise ValueError("corpus_wer needs at least one alignment")
    keep, _ = usable(alignments)
    n_ref = sum(a.n_ref for a in keep)
    n_sub = sum(a.n_sub for a in keep)
    n_del = sum(a.n_del for a in keep)
    n_ins = sum(a.n_ins for a in keep)
    if agg == "pooled":
        if n_ref == 0:
            return WerBreakdown(Fraction(0), Fraction(0), Fraction(0), 0, n_sub, n_del, n_ins)
        scale = Fraction(100, n_ref)
        return WerBreakdown(n_sub * scale, n_del * scale, n_ins * scale, n_ref, n_sub, n_del, n_ins)
    if agg == "averaged":
        rates = [wer(a) for a in keep if a.n_ref > 0]
        if not rates:
            return WerBreakdown(Fraction(0), Fraction(0), Fraction(0), 0, n_sub, n_del, n_ins)
        k = len(rates)
        return WerBreakdown(
            sum((r.sub_rate for r in rates), Fraction(0)) / k,
            sum((r.del_rate for r in rates), Fraction(0)) / k,
            sum((r.ins_rate for r in rates), Fraction(0)) / k,
            n_ref, n_sub, n_del, n_ins,
        )
    raise ValueError(f"unknown aggregation {agg!r}")


def pretty_alignment(a: Alignment) -> str:
    """sclite-style three-line view: REF, HYP and an error row."""
    refs, hyps, marks = [], [], []
    for op in a.ops:
        r = op.ref_token or "*" * len(op.hyp_token or "")
        h = op.hyp_token or "*" * len(op.ref_token or "")
        width = max(len(r), len(h))
        refs.append(r.ljust(width))
        hyps.append(h.ljust(width))
        marks.append({"match": "", "sub": "S", "del": "D", "ins": "I"}[op.kind].ljust(width))
    return "REF:  {}\nHYP:  {}\nEVAL: {}".format(" ".join(refs), " ".join(hyps), " ".join(marks).rstrip())
