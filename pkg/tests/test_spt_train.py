import json

import numpy as np
import pytest

from slascore.spt.checkpoint import load_checkpoint, save_checkpoint, write_loss_csv
from slascore.spt.corpus import build_vocab
from slascore.spt.model import init_prompts
from slascore.spt.train import DivergenceDetected, Example, TrainConfig, train

from spt_helpers import tiny_batch, tiny_model


def _prompts(theta, m=3):
    return init_prompts(m, theta, np.random.default_rng(0))


def test_spt_leaves_base_bit_identical():
    theta = tiny_model()
    before = theta.content_hash()
    V = _prompts(theta)
    res = train(theta, V, tiny_batch(n=6), TrainConfig(mode="spt", lr=0.5, max_steps=30, batch_size=2))
    assert res.theta.content_hash() == before == theta.content_hash()
    assert not np.array_equal(res.V, V)
    assert res.curve[-1] < res.curve[0]


def test_ft_updates_every_base_parameter():
    theta = tiny_model()
    res = train(theta, None, tiny_batch(n=6), TrainConfig(mode="ft", lr=0.5, max_steps=10, batch_size=3))
    assert res.theta.content_hash() != theta.content_hash()
    changed = {k for k in theta.arrays if not np.array_equal(theta[k], res.theta[k])}
    assert {"W_enc", "W_q", "W_k", "W_v", "W_out", "E", "P"} <= changed


def test_zero_learning_rate_is_flat():
    theta = tiny_model()
    V = _prompts(theta)
    res = train(theta, V, tiny_batch(n=1), TrainConfig(mode="spt", lr=0.0, max_steps=5))
    assert np.array_equal(res.V, V)
    assert len(set(res.curve)) == 1 and len(res.curve) == 5


def test_step_and_epoch_caps():
    theta = tiny_model()
    data = tiny_batch(n=4)
    res = train(theta, _prompts(theta), data, TrainConfig(lr=0.1, max_epochs=3, batch_size=2))
    assert (res.epochs, res.steps) == (3, 6)
    res = train(theta, _prompts(theta), data, TrainConfig(lr=0.1, max_steps=5, batch_size=2))
    assert res.steps == 5 and len(res.curve) == 5


def test_training_is_deterministic():
    theta = tiny_model()
    cfg = TrainConfig(mode="spt", lr=0.3, max_steps=12, batch_size=2, seed=4)
    a = train(theta, _prompts(theta), tiny_batch(n=5), cfg)
    b = train(theta, _prompts(theta), tiny_batch(n=5), cfg)
    assert a.curve == b.curve and np.array_equal(a.V, b.V)


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_divergence_is_detected():
    theta = tiny_model()
    with pytest.raises(DivergenceDetected) as e:
        train(theta, None, tiny_batch(n=4), TrainConfig(mode="ft", lr=1e8, max_steps=50, batch_size=2))
    assert len(e.value.curve) >= 1


def test_config_validation():
    with pytest.raises(ValueError):
        TrainConfig(mode="lora")
    with pytest.raises(ValueError):
        TrainConfig(lr=-1)
    with pytest.raises(ValueError):
        train(tiny_model(), None, tiny_batch(), TrainConfig(mode="spt"))
    with pytest.raises(ValueError):
        train(tiny_model(), None, [], TrainConfig(mode="ft"))
    assert TrainConfig().max_epochs == 40 and TrainConfig().max_steps == 30_000 and TrainConfig().beam_width == 5


def test_checkpoint_round_trip(tmp_path):
    theta = tiny_model(vocab=len(build_vocab()))
    V = _prompts(theta)
    vocab = build_vocab()
    state = np.random.default_rng(3).bit_generator.state
    save_checkpoint(tmp_path / "c.json", theta, V, vocab, TrainConfig(), rng_state=state)
    th2, V2, vocab2, cfg, st = load_checkpoint(tmp_path / "c.json")
    assert th2.content_hash() == theta.content_hash()
    assert np.array_equal(V, V2) and vocab2.symbols == vocab.symbols
    assert cfg["mode"] == "spt" and st == state


def test_checkpoint_detects_tampering(tmp_path):
    theta = tiny_model()
    path = tmp_path / "c.json"
    save_checkpoint(path, theta, None, build_vocab())
    doc = json.loads(path.read_text())
    doc["params"]["W_q"][0][0] += 1.0
    path.write_text(json.dumps(doc))
    with pytest.raises(ValueError, match="hash"):
        load_checkpoint(path)


def test_loss_csv(tmp_path):
    write_loss_csv(tmp_path / "l.csv", [2.5, 1.25])
    assert (tmp_path / "l.csv").read_text() == "step,loss\n0,2.5\n1,1.25\n"


def test_example_targets_end_with_eos():
    ex = Example((3,), (4, 1))
    assert ex.y[-1] == 1
