import json
from dataclasses import replace

import pytest

from slascore.cli import main
from slascore.scoring import read_transcripts, validate
from slascore.spt import demo
from slascore.spt.checkpoint import load_checkpoint
from slascore.spt.demo import DemoConfig, run_demo

SMALL = DemoConfig(d=8, n_pretrain=120, n_adapt=40, n_test=12, pretrain_steps=30, adapt_steps=10,
                   batch_size=8, beam_width=2)


@pytest.fixture(scope="module")
def spt_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("spt")
    return out, run_demo(out, SMALL)


def test_spt_artifacts(spt_run):
    out, report = spt_run
    validate(report, "demo_report.schema.json")
    for name in ("loss_pretrain.csv", "loss_spt.csv", "base.ckpt.json", "spt.ckpt.json", "ref.txt",
                 "hyp_baseline.txt", "hyp_spt.txt", "report.json", "report.txt"):
        assert (out / name).exists(), name
    assert report["base_frozen"] and report["base_hash_before"] == report["base_hash_after"]
    assert report["trainable_parameters"] == SMALL.m * SMALL.d
    theta, V, vocab, cfg, rng_state = load_checkpoint(out / "spt.ckpt.json")
    assert theta.content_hash() == report["base_hash_before"] and V.shape == (SMALL.m, SMALL.d)
    assert rng_state is not None and cfg["mode"] == "spt"
    assert (out / "loss_spt.csv").read_text().count("\n") == SMALL.adapt_steps + 1
    refs, hyps = read_transcripts(out / "ref.txt"), read_transcripts(out / "hyp_spt.txt")
    assert list(refs) == list(hyps) and len(refs) == SMALL.n_test
    assert "Recall All" in (out / "report.txt").read_text()


def test_hypothesis_files_feed_the_scorer(spt_run, capsys):
    out, report = spt_run
    assert main(["score", str(out / "ref.txt"), str(out / "hyp_spt.txt"), "--profile", "speech",
                 "--recall", "--format", "json"]) == 0
    scored = json.loads(capsys.readouterr().out)
    assert scored == report["scores"]["spt"]


def test_same_seed_same_bytes(spt_run, tmp_path):
    out, _ = spt_run
    run_demo(tmp_path, SMALL)
    for name in ("report.json", "report.txt", "hyp_spt.txt", "loss_spt.csv", "spt.ckpt.json"):
        assert (tmp_path / name).read_bytes() == (out / name).read_bytes(), name


def test_ft_mode_changes_base(tmp_path):
    report = run_demo(tmp_path, replace(SMALL, mode="ft"))
    validate(report, "demo_report.schema.json")
    assert not report["base_frozen"]
    assert report["base_hash_before"] != report["base_hash_after"]
    assert report["trainable_parameters"] == report["base_parameters"]
    assert (tmp_path / "hyp_ft.txt").exists()


def test_large_prompt_count_gets_room(tmp_path):
    report = run_demo(tmp_path, replace(SMALL, m=100, n_test=3))
    assert report["config"]["max_len"] >= 100 + 32
    assert report["trainable_parameters"] == 100 * SMALL.d


def test_cli_demo(monkeypatch, tmp_path, capsys):
    monkeypatch.setattr(demo, "DemoConfig", lambda: SMALL)
    assert main(["spt-demo", "--out", str(tmp_path), "--seed", "1", "--prompts", "5"]) == 0
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["config"]["seed"] == 1 and report["trainable_parameters"] == 5 * SMALL.d
    assert "deletion-rate reduction" in capsys.readouterr().out
