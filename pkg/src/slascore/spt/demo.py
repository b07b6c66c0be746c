"""End-to-end desk run: teach a toy recognizer to write ITN'd text, then
recover verbatim transcripts with soft prompts (or full fine-tuning)."""

from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, replace
from pathlib import Path
from typing import Literal

import numpy as np

from ..scoring import ScoreOptions, recall_from_json, render_wer_table, score_corpus, write_transcripts
from ..word_types import WordType, render_recall_table
from .checkpoint import save_checkpoint, write_loss_csv
from .corpus import CorpusConfig, Vocab, build_vocab, make_itn_corpus
from .decode import decode
from .model import EOS, BaseParams, init_prompts
from .train import Example, TrainConfig, train, trainable_parameter_count

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class DemoConfig:
    seed: int = 0
    mode: Literal["spt", "ft"] = "spt"
    m: int = 20
    d: int = 32
    max_len: int = 64  # raised to m + 64 when the prompts alone would not fit
    n_pretrain: int = 5000
    n_adapt: int = 1000
    n_test: int = 300
    verbatim_share: float = 0.5
    max_context: int = 24
    pretrain_steps: int = 8000
    pretrain_lr: float = 3e-3
    adapt_steps: int = 1000
    spt_lr: float = 0.1
    ft_lr: float = 0.1
    batch_size: int = 20
    beam_width: int = 5
    prompt_init: str = "vocab"


def _context(rng, pool: list[list[str]], hesitations: set[str], verbatim: bool, max_len: int) -> list[str]:
    """Previous-utterance text ahead of BOS, as in a recognizer conditioned on prior output."""
    toks: list[str] = []
    while len(toks) < max_len:
        toks += pool[int(rng.integers(len(pool)))]
    out = toks[: int(rng.integers(1, max_len + 1))]
    if verbatim and not hesitations & set(out):
        out[int(rng.integers(len(out)))] = str(rng.choice(sorted(hesitations)))
    return out


def pretraining_examples(cfg: DemoConfig, vocab: Vocab, pretrain, verbatim, ccfg: CorpusConfig):
    """Mostly written-form targets, plus a minority of verbatim targets whose
    preceding context is itself verbatim. Contexts of varying length also
    expose the decoder to BOS at many positions."""
    rng = np.random.default_rng(cfg.seed + 1)
    hes = set(ccfg.hesitations)
    written_pool = [t for _, t in pretrain]
    spoken_pool = [s for s, _ in verbatim]
    out = []
    for (src, written), _ in zip(pretrain, verbatim):
        x = tuple(vocab.encode(src))
        if rng.random() < cfg.verbatim_share:
            ctx = _context(rng, spoken_pool, hes, True, cfg.max_context)
            out.append(Example(x, tuple(vocab.encode(src)) + (EOS,), tuple(vocab.encode(ctx))))
        else:
            ctx = [] if rng.random() < 0.3 else _context(rng, written_pool, hes, False, cfg.max_context)
            out.append(Example(x, tuple(vocab.encode(written)) + (EOS,), tuple(vocab.encode(ctx))))
    return out


def _summary(report: dict) -> dict:
    speech = report["wer"][0]
    rates = {"sub": speech["sub_rate"], "del": speech["del_rate"], "ins": speech["ins_rate"]}
    hes = report["recall"]["per_type"][WordType.HESITATION.value]
    return {
        "wer": speech["wer"],
        "sub_rate": rates["sub"],
        "del_rate": rates["del"],
        "ins_rate": rates["ins"],
        "dominant_error": max(rates, key=lambda k: (rates[k], k)),
        "hesitation_recall": hes["recall"],
        "overall_recall": report["recall"]["overall_recall"],
    }


def run_demo(out_dir, cfg: DemoConfig = DemoConfig()) -> dict:
    """Run the pipeline, write artifacts under ``out_dir`` and return the report."""
    if cfg.mode == "spt" and cfg.m + 32 > cfg.max_len:
        cfg = replace(cfg, max_len=cfg.m + 64)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    ccfg = CorpusConfig()
    vocab = build_vocab(ccfg)
    n_total = cfg.n_pretrain + cfg.n_adapt + cfg.n_test
    pretrain, verbatim = make_itn_corpus(cfg.seed, n_total, ccfg)
    a, b = cfg.n_pretrain, cfg.n_pretrain + cfg.n_adapt

    # 1. base recognizer trained towards written-form output
    base_cfg = TrainConfig(mode="ft", lr=cfg.pretrain_lr, max_steps=cfg.pretrain_steps,
                           batch_size=cfg.batch_size, seed=cfg.seed, optimizer="adam")
    theta0 = BaseParams.init(len(vocab), cfg.d, cfg.max_len, np.random.default_rng(cfg.seed))
    log.info("pretraining base model (%d steps)", cfg.pretrain_steps)
    base = train(theta0, None, pretraining_examples(cfg, vocab, pretrain[:a], verbatim[:a], ccfg), base_cfg)
    theta = base.theta
    write_loss_csv(out / "loss_pretrain.csv", base.curve)
    save_checkpoint(out / "base.ckpt.json", theta, None, vocab, base_cfg)

    # 2. adapt on verbatim pairs
    adapt_set = [Example(tuple(vocab.encode(s)), tuple(vocab.encode(t)) + (EOS,)) for s, t in verbatim[a:b]]
    hash_before = theta.content_hash()
    rng = np.random.default_rng(cfg.seed + 2)
    if cfg.mode == "spt":
        V0 = init_prompts(cfg.m, theta, rng, cfg.prompt_init)
        adapt_cfg = TrainConfig(mode="spt", lr=cfg.spt_lr, max_steps=cfg.adapt_steps,
                                batch_size=cfg.batch_size, seed=cfg.seed, m=cfg.m)
        log.info("soft-prompt tuning %d prompts", cfg.m)
        adapted = train(theta, V0, adapt_set, adapt_cfg)
    else:
        V0 = None
        adapt_cfg = TrainConfig(mode="ft", lr=cfg.ft_lr, max_steps=cfg.adapt_steps,
                                batch_size=cfg.batch_size, seed=cfg.seed, m=cfg.m)
        log.info("fine-tuning all base parameters")
        adapted = train(theta, None, adapt_set, adapt_cfg)
    hash_after = adapted.theta.content_hash()
    write_loss_csv(out / f"loss_{cfg.mode}.csv", adapted.curve)
    save_checkpoint(out / f"{cfg.mode}.ckpt.json", adapted.theta, adapted.V, vocab, adapt_cfg,
                    rng_state=rng.bit_generator.state)

    # 3. decode the held-out split with and without adaptation
    test = verbatim[b:]
    refs = {f"utt{i:04d}": " ".join(s) for i, (s, _) in enumerate(test)}
    systems = {"baseline": (theta, None), cfg.mode: (adapted.theta, adapted.V)}
    hyps: dict[str, dict[str, str]] = {}
    for name, (th, V) in systems.items():
        hyps[name] = {}
        for uid, (src, _) in zip(refs, test):
            res = decode(th, V, vocab.encode(src), beam_width=cfg.beam_width)
            hyps[name][uid] = " ".join(vocab.decode(res.tokens))
    write_transcripts(out / "ref.txt", refs)
    for name in systems:
        write_transcripts(out / f"hyp_{name}.txt", hyps[name])

    # 4. score
    opts = ScoreOptions(profiles=("speech",), recall=True)
    scores = {name: score_corpus(refs, hyps[name], opts) for name in systems}
    summary = {name: _summary(scores[name]) for name in systems}
    base_del = summary["baseline"]["del_rate"]
    new_del = summary[cfg.mode]["del_rate"]
    report = {
        "config": asdict(cfg),
        "vocab_size": len(vocab),
        "base_parameters": theta.n_params(),
        "trainable_parameters": trainable_parameter_count(cfg.mode, theta, V0),
        "base_hash_before": hash_before,
        "base_hash_after": hash_after,
        "base_frozen": hash_before == hash_after,
        "steps": {"pretrain": base.steps, cfg.mode: adapted.steps},
        "final_loss": {"pretrain": round(float(np.mean(base.curve[-50:])), 6),
                       cfg.mode: round(float(np.mean(adapted.curve[-20:])), 6)},
        "summary": summary,
        "deletion_reduction": None if new_del == 0 else round(base_del / new_del, 3),
        "scores": scores,
    }
    (out / "report.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    (out / "report.txt").write_text(render_demo(report), encoding="utf-8")
    return report


def render_demo(report: dict) -> str:
    mode = report["config"]["mode"]
    names = ["baseline", mode]
    label = {"baseline": "Baseline", "spt": "SPT", "ft": "FT"}
    wer_rows = [(label[n], report["scores"][n]["wer"][0]) for n in names]
    recall = {label[n]: recall_from_json(report["scores"][n]["recall"]) for n in names}
    lines = [
        "Speech WER on the synthetic test split",
        render_wer_table(wer_rows),
        "",
        "Word counts and overall recall",
        render_recall_table(recall, [WordType.HESITATION, WordType.NUMBER, WordType.DISFLUENCY]),
        "",
        f"trainable parameters: {report['trainable_parameters']} (base model: {report['base_parameters']})",
        f"base weights unchanged: {report['base_frozen']}",
        f"deletion-rate reduction: {report['deletion_reduction']}x",
    ]
    return "\n".join(lines) + "\n"
