import json

import jsonschema
import pytest

from slascore.scoring import (
    EmptyIntersection,
    ScoreOptions,
    TranscriptError,
    dumps,
    parse_transcript_lines,
    read_transcripts,
    render_report,
    score_corpus,
    validate,
    write_transcripts,
)

from conftest import WORKED_HYP, WORKED_REF


def test_parse_transcript_lines():
    items = parse_transcript_lines(["a\thello world\n", "\n", "b\t\n"])
    assert items == {"a": "hello world", "b": ""}
    with pytest.raises(TranscriptError) as e:
        parse_transcript_lines(["a\tx", "no tab here"], "f.txt")
    assert e.value.line_no == 2 and "f.txt:2" in str(e.value)
    with pytest.raises(TranscriptError):
        parse_transcript_lines(["a\tx", "a\ty"])
    with pytest.raises(TranscriptError):
        parse_transcript_lines(["\tx"])


def test_round_trip_files(tmp_path):
    items = {"u1": "he bought um twenty", "u2": ""}
    write_transcripts(tmp_path / "t.txt", items)
    assert read_transcripts(tmp_path / "t.txt") == items


def test_worked_example_report():
    rep = score_corpus({"u": WORKED_REF}, {"u": WORKED_HYP}, ScoreOptions(recall=True))
    validate(rep)
    wers = {e["profile"]: (e["wer"], e["wer_exact"]) for e in rep["wer"]}
    assert wers == {"raw": (50.0, "50/1"), "standard": (0.0, "0/1"), "speech": (33.3, "100/3")}
    assert rep["recall"]["per_type"]["hesitation"] == {"c_all": 1, "c_correct": 1, "recall": 1.0}
    assert rep["recall"]["per_type"]["partial"] == {"c_all": 1, "c_correct": 0, "recall": 0.0}


def test_self_score_and_missing_ids():
    refs = {"a": "uh twenty <dis> i i </dis> think", "b": "mister lee", "c": "only here"}
    hyps = {"a": "uh twenty i i think", "b": "mister lee", "z": "extra"}
    rep = score_corpus(refs, hyps, ScoreOptions(recall=True))
    validate(rep)
    assert all(e["wer"] == 0.0 for e in rep["wer"])
    assert rep["recall"]["overall_recall"] == 1.0
    assert rep["missing"] == {"ref_only": ["c"], "hyp_only": ["z"]}
    assert "reference-only" in render_report(rep)


def test_two_utterance_pooling():
    rep = score_corpus({"x": "a b c d", "y": "a b c d e f"}, {"x": "a b c d", "y": "a b x d f"},
                       ScoreOptions(profiles=("speech",)))
    assert rep["wer"][0]["wer"] == 20.0
    avg = score_corpus({"x": "a b c d", "y": "a b c d e f"}, {"x": "a b c d", "y": "a b x d f"},
                       ScoreOptions(profiles=("speech",), agg="averaged"))
    assert avg["wer"][0]["wer"] == 16.7


def test_empty_intersection():
    with pytest.raises(EmptyIntersection):
        score_corpus({"a": "x"}, {"b": "x"})


def test_markup_is_corpus_level():
    refs = {"a": "<dis> you could </dis> we could", "b": "go go now"}
    rep = score_corpus(refs, refs, ScoreOptions(recall=True))
    # markup in "a" turns the repetition fallback off for "b" too
    assert rep["recall"]["per_type"]["disfluency"]["c_all"] == 2


def test_output_is_deterministic():
    refs = {"u": WORKED_REF, "v": "mister lee uh"}
    hyps = {"u": WORKED_HYP, "v": "Mr. Lee"}
    a = dumps(score_corpus(refs, hyps, ScoreOptions(recall=True)))
    b = dumps(score_corpus(dict(refs), dict(hyps), ScoreOptions(recall=True)))
    assert a == b
    json.loads(a)


def test_schema_rejects_malformed_report():
    rep = score_corpus({"u": WORKED_REF}, {"u": WORKED_HYP})
    rep["wer"][0]["wer"] = -1
    with pytest.raises(jsonschema.ValidationError):
        validate(rep)
    with pytest.raises(jsonschema.ValidationError):
        validate({"n_utterances": 1})
