"""Corpus scoring over tab-separated transcript files."""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from typing import Iterable, Literal, Mapping, Sequence

from .alignment import Alignment, WerBreakdown, align, corpus_wer, render_rate, usable
from .normalization import (
    DEFAULT_ABBREVS,
    DEFAULT_LEXICON,
    SPEECH,
    AbbreviationTable,
    HesitationLexicon,
    RawText,
    get_profile,
    normalize,
)
from .word_types import (
    RecallReport,
    WordType,
    parse_annotated,
    recall_report,
    render_recall_table,
    strip_markup,
    tag_reference,
)

ALL_PROFILES = ("raw", "standard", "speech")


class TranscriptError(ValueError):
    def __init__(self, path, line_no: int, message: str):
        super().__init__(f"{path}:{line_no}: {message}")
        self.path = path
        self.line_no = line_no


class EmptyIntersection(ValueError):
    pass


def parse_transcript_lines(lines: Iterable[str], path="<input>") -> dict[str, str]:
    """``utterance_id<TAB>text`` per line; blank lines are skipped."""
    out: dict[str, str] = {}
    for no, line in enumerate(lines, 1):
        line = line.rstrip("\r\n")
        if not line.strip():
            continue
        if "\t" not in line:
            raise TranscriptError(path, no, "expected 'utterance_id<TAB>text'")
        uid, text = line.split("\t", 1)
        uid = uid.strip()
        if not uid:
            raise TranscriptError(path, no, "empty utterance id")
        if uid in out:
            raise TranscriptError(path, no, f"duplicate utterance id {uid!r}")
        out[uid] = text
    return out


def read_transcripts(path) -> dict[str, str]:
    with open(path, encoding="utf-8") as f:
        return parse_transcript_lines(f, path)


def write_transcripts(path, items: Mapping[str, str]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for uid, text in items.items():
            f.write(f"{uid}\t{text}\n")


@dataclass(frozen=True)
class ScoreOptions:
    profiles: Sequence[str] = ALL_PROFILES
    recall: bool = False
    match: Literal["occurrence", "alignment"] = "occurrence"
    agg: Literal["pooled", "averaged"] = "pooled"
    raw_case_sensitive: bool = False
    lexicon: HesitationLexicon = DEFAULT_LEXICON
    abbrevs: AbbreviationTable = DEFAULT_ABBREVS


def _rate(x) -> float:
    return float(render_rate(x))


def breakdown_json(profile: str, b: WerBreakdown) -> dict:
    return {
        "profile": profile,
        "n_ref": b.n_ref,
        "sub": b.n_sub,
        "del": b.n_del,
        "ins": b.n_ins,
        "sub_rate": _rate(b.sub_rate),
        "del_rate": _rate(b.del_rate),
        "ins_rate": _rate(b.ins_rate),
        "wer": _rate(b.wer),
        "wer_exact": f"{b.wer.numerator}/{b.wer.denominator}",
    }


def _utterance_json(a: Alignment) -> dict:
    entry = {"id": a.utterance_id, "n_ref": a.n_ref, "sub": a.n_sub, "del": a.n_del, "ins": a.n_ins}
    entry["wer"] = None if a.n_ref == 0 else _rate(Fraction(100 * a.errors, a.n_ref))
    return entry


def score_corpus(refs: Mapping[str, str], hyps: Mapping[str, str], opts: ScoreOptions = ScoreOptions()) -> dict:
    """Score every utterance id present in both mappings.

    Reference text may carry disfluency markup; it is stripped before
    normalization and used only for word-type tagging. Markup in a
    hypothesis is stripped as well, so a reference file scores cleanly
    against itself.
    """
    ids = [uid for uid in refs if uid in hyps]
    if not ids:
        raise EmptyIntersection("reference and hypothesis share no utterance ids")
    report: dict = {
        "n_utterances": len(ids),
        "missing": {
            "ref_only": [u for u in refs if u not in hyps],
            "hyp_only": [u for u in hyps if u not in refs],
        },
        "wer": [],
        "recall": None,
    }
    for name in opts.profiles:
        profile = get_profile(name, opts.raw_case_sensitive)
        alignments = []
        for uid in ids:
            r = normalize(RawText(uid, strip_markup(refs[uid])), profile, opts.lexicon, opts.abbrevs)
            h = normalize(RawText(uid, strip_markup(hyps[uid])), profile, opts.lexicon, opts.abbrevs)
            alignments.append(align(r, h))
        _, excluded = usable(alignments)
        entry = breakdown_json(name, corpus_wer(alignments, opts.agg))
        entry["aggregation"] = opts.agg
        entry["excluded"] = [a.utterance_id for a in excluded]
        entry["per_utterance"] = [_utterance_json(a) for a in alignments]
        report["wer"].append(entry)
    if opts.recall:
        report["recall"] = corpus_recall(refs, hyps, ids, opts).to_json()
        report["recall"]["match"] = opts.match
    return report


def corpus_recall(refs, hyps, ids, opts: ScoreOptions = ScoreOptions()) -> RecallReport:
    annotated = {uid: parse_annotated(uid, refs[uid]) for uid in ids}
    # Human markup anywhere in the corpus switches off the repetition fallback.
    use_markup = any(a.has_markup for a in annotated.values())
    total = RecallReport()
    for uid in ids:
        ann = annotated[uid]
        spans = tag_reference(ann, opts.lexicon, opts.abbrevs, use_markup=use_markup)
        r = normalize(RawText(uid, strip_markup(refs[uid])), SPEECH, opts.lexicon, opts.abbrevs)
        h = normalize(RawText(uid, strip_markup(hyps[uid])), SPEECH, opts.lexicon, opts.abbrevs)
        assert len(r) == len(ann.tokens), "speech tokens out of step with tagged tokens"
        total = total + recall_report(spans, r, h, opts.match)
    return total


def recall_from_json(doc: dict) -> RecallReport:
    rep = RecallReport()
    for t in WordType:
        c = doc["per_type"][t.value]
        rep.per_type[t].c_all = c["c_all"]
        rep.per_type[t].c_correct = c["c_correct"]
    rep.overall_all = doc["overall_all"]
    rep.overall_correct = doc["overall_correct"]
    return rep


def render_wer_table(rows: Sequence[tuple[str, dict]]) -> str:
    """``rows`` of (label, breakdown json); columns Sub Del Ins WER like a results table."""
    header = ["", "#Wds", "Sub", "Del", "Ins", "WER"]
    body = [
        [label, str(b["n_ref"]), f"{b['sub_rate']:.1f}", f"{b['del_rate']:.1f}", f"{b['ins_rate']:.1f}", f"{b['wer']:.1f}"]
        for label, b in rows
    ]
    widths = [max(len(r[k]) for r in [header] + body) for k in range(len(header))]
    line = lambda r: " | ".join(c.ljust(w) if k == 0 else c.rjust(w) for k, (c, w) in enumerate(zip(r, widths)))  # noqa: E731
    return "\n".join([line(header), "-+-".join("-" * w for w in widths)] + [line(r) for r in body])


def render_report(report: dict) -> str:
    parts = [render_wer_table([(e["profile"], e) for e in report["wer"]])]
    if report["recall"] is not None:
        parts.append(render_recall_table({"Hyp": recall_from_json(report["recall"])}))
    missing = report["missing"]
    if missing["ref_only"] or missing["hyp_only"]:
        parts.append(f"missing: {len(missing['ref_only'])} reference-only, {len(missing['hyp_only'])} hypothesis-only ids")
    return "\n\n".join(parts) + "\n"


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def load_schema(name: str) -> dict:
    return json.loads(resources.files("slascore").joinpath("schemas", name).read_text(encoding="utf-8"))


SCHEMAS = ("score_report.schema.json", "demo_report.schema.json")


def validate(report: dict, name: str = "score_report.schema.json") -> None:
    """Raise ``jsonschema.ValidationError`` unless ``report`` matches a shipped schema."""
    import jsonschema
    from referencing import Registry, Resource

    registry = Registry().with_resources(
        (f"slascore/{n}", Resource.from_contents(load_schema(n))) for n in SCHEMAS
    )
    schema = load_schema(name)
    jsonschema.Draft202012Validator(schema, registry=registry).validate(report)
