import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slascore.normalization import SPEECH, normalize
from slascore.word_types import (
    AnnotatedReference,
    MarkupError,
    RecallReport,
    Span,
    WordType,
    detect_repetitions,
    parse_annotated,
    recall_report,
    render_recall_table,
    strip_markup,
    tag_reference,
)

from oracles import repeated_indices

H, N, A, D, P = (WordType.HESITATION, WordType.NUMBER, WordType.ABBREVIATION,
                 WordType.DISFLUENCY, WordType.PARTIAL)

PARK_REF = ("mister lee when you arrive <dis> you could </dis> uh we could "
            "take <dis> the most </dis> the most cheap park zone blue zone "
            "it costs um twenty dollar p- per week")
PARK_HYP = ("Mr. Lee, when you arrive, we could take the most cheap Park zone, blue zone. "
            "It costs $20 per week.")


def _score(ref_text, hyp_text, match="occurrence", use_markup=None):
    ann = parse_annotated("u", ref_text)
    spans = tag_reference(ann, use_markup=use_markup)
    ref = normalize(strip_markup(ref_text), SPEECH)
    hyp = normalize(hyp_text, SPEECH)
    return spans, recall_report(spans, ref, hyp, match)


def test_tags_on_annotated_reference():
    spans = tag_reference(parse_annotated("u", PARK_REF))
    words = {t: [w for _, w in spans.entries[t]] for t in WordType}
    assert words[A] == ["mister"]
    assert words[H] == ["uh", "um"]
    assert words[N] == ["twenty"]  # "dollar" is not a number word
    assert words[D] == ["you", "could", "the", "most"]
    assert words[P] == ["p-"]


def test_recall_on_annotated_reference():
    _, rep = _score(PARK_REF, PARK_HYP)
    counts = {t: (rep.per_type[t].c_correct, rep.per_type[t].c_all) for t in WordType}
    assert counts[A] == (0, 1) and counts[H] == (0, 2) and counts[N] == (0, 1) and counts[P] == (0, 1)
    # occurrence matching: "you could" and "the most" each occur once in the hypothesis
    assert counts[D] == (4, 4)
    assert (rep.overall_correct, rep.overall_all) == (4, 9)
    _, by_alignment = _score(PARK_REF, PARK_HYP, match="alignment")
    assert by_alignment.per_type[D].c_correct == 0


def test_forty_nine_overlap():
    spans, rep = _score("forty nine forty nine", "forty nine forty nine")
    assert spans.indices(N) == [0, 1, 2, 3] and spans.indices(D) == [0, 1, 2, 3]
    assert (rep.per_type[N].c_correct, rep.per_type[N].c_all) == (4, 4)
    assert (rep.per_type[D].c_correct, rep.per_type[D].c_all) == (4, 4)
    assert (rep.overall_correct, rep.overall_all) == (4, 4)
    assert rep.overall_recall == 1


def test_hesitation_clipping():
    _, rep = _score("uh well um", "%hes% well")
    assert (rep.per_type[H].c_correct, rep.per_type[H].c_all) == (1, 2)


def test_empty_reference_and_hypothesis():
    spans, rep = _score("", "")
    assert len(spans) == 0 and rep.overall_all == 0
    _, rep = _score("uh twenty p-", "")
    assert rep.overall_correct == 0 and rep.overall_recall == 0


@pytest.mark.parametrize(
    "tokens, spans",
    [(["the", "most", "the", "most", "cheap"], [(0, 4)]), (["a", "b", "c"], []), (["no", "no", "no"], [(0, 3)]),
     (["a", "a", "b", "c", "b", "c"], [(0, 2), (2, 6)]), (["a", "b", "a", "b", "a"], [(0, 5)])],
)
def test_detect_repetitions(tokens, spans):
    assert [(s.start, s.stop) for s in detect_repetitions(tokens)] == spans


@settings(max_examples=300, deadline=None)
@given(st.lists(st.sampled_from("abc"), max_size=12))
def test_repetition_cover_matches_brute_force(tokens):
    covered = {i for s in detect_repetitions(tokens) for i in range(s.start, s.stop)}
    assert covered == repeated_indices(tokens)
    spans = detect_repetitions(tokens)
    assert all(a.stop <= b.start for a, b in zip(spans, spans[1:]))


def test_markup_switches_off_repetition_fallback():
    text = "<dis> i i </dis> think think so"
    assert tag_reference(parse_annotated("u", text)).indices(D) == [0, 1]
    assert tag_reference(parse_annotated("u", strip_markup(text))).indices(D) == [0, 1, 2, 3]
    assert tag_reference(parse_annotated("u", "think think"), use_markup=True).indices(D) == []


@pytest.mark.parametrize("text", ["<dis> a <dis> b </dis> </dis>", "a </dis>", "<dis> a"])
def test_bad_markup(text):
    with pytest.raises(MarkupError):
        parse_annotated("u", text)


def test_span_validation():
    with pytest.raises(MarkupError):
        AnnotatedReference("u", ("a",), (Span(0, 2, "disfluency"),))
    with pytest.raises(MarkupError):
        AnnotatedReference("u", ("a", "b", "c"), (Span(0, 2, "disfluency"), Span(1, 3, "disfluency")))
    AnnotatedReference("u", ("a", "b"), (Span(0, 2, "disfluency"), Span(1, 2, "partial")))


def test_parse_annotated_aligns_with_speech_tokens():
    ann = parse_annotated("u", "Well, <dis>I- I</dis> think... um, TWENTY.")
    assert ann.tokens == ("well", "i-", "i", "think", "um", "twenty")
    assert len(ann.tokens) == len(normalize(strip_markup("Well, <dis>I- I</dis> think... um, TWENTY."), SPEECH))
    assert Span(1, 3, "disfluency") in ann.spans and Span(1, 2, "partial") in ann.spans


def test_render_recall_table():
    _, rep = _score(PARK_REF, PARK_HYP)
    _, best = _score(PARK_REF, strip_markup(PARK_REF))
    text = render_recall_table({"Hyp": rep, "SPT": best})
    lines = text.splitlines()
    assert lines[0].split(" | ")[0].strip() == "Word Type"
    assert lines[-1].startswith("Recall All") and lines[-1].endswith("100.0%")
    assert any(line.startswith("Hesitation") for line in lines)


REF_WORDS = st.sampled_from(["uh", "um", "twenty", "nine", "mister", "p-", "the", "most", "okay", "go"])


@settings(max_examples=300, deadline=None)
@given(st.lists(REF_WORDS, max_size=10), st.lists(REF_WORDS | st.just("%hes%"), max_size=10), REF_WORDS | st.just("%hes%"))
def test_recall_properties(ref_words, hyp_words, extra):
    ref_text = " ".join(ref_words)
    spans, rep = _score(ref_text, " ".join(hyp_words))
    _, more = _score(ref_text, " ".join(hyp_words + [extra]))
    _, self_rep = _score(ref_text, ref_text)
    hyp = normalize(" ".join(hyp_words), SPEECH).tokens
    ref = normalize(ref_text, SPEECH).tokens
    union = spans.union()
    assert rep.overall_all == len(union) <= sum(rep.per_type[t].c_all for t in WordType)
    overlap = len(union) < sum(len(spans.indices(t)) for t in WordType)
    assert overlap == (len(union) != sum(rep.per_type[t].c_all for t in WordType))
    for t in WordType:
        c = rep.per_type[t]
        assert 0 <= c.c_correct <= c.c_all
        assert more.per_type[t].c_correct >= c.c_correct
        assert self_rep.per_type[t].c_correct == self_rep.per_type[t].c_all
        by_word = {}
        for i in spans.indices(t):
            by_word.setdefault(ref[i], []).append(i)
        # clipped bag: never more credit per word than hypothesis occurrences
        assert c.c_correct <= sum(hyp.count(w) for w in by_word)
        assert c.c_correct == sum(min(len(ix), hyp.count(w)) for w, ix in by_word.items())
    assert 0 <= rep.overall_recall <= 1


def test_report_addition_and_json():
    _, a = _score("uh twenty", "%hes%")
    _, b = _score("um nine", "nine")
    total = a + b
    assert total.per_type[H].c_all == 2 and total.per_type[H].c_correct == 1
    doc = total.to_json()
    assert doc["per_type"]["number"] == {"c_all": 2, "c_correct": 1, "recall": 0.5}
    assert RecallReport().to_json()["per_type"]["partial"]["recall"] is None
