"""JSON checkpoints and loss-curve CSVs."""

from __future__ import annotations

import csv
import json
from dataclasses import asdict
from pathlib import Path
from typing import Any, Optional, Sequence

import numpy as np

from .corpus import Vocab
from .model import PARAM_SHAPES, BaseParams

FORMAT = "slascore-spt-checkpoint"
VERSION = 1


def save_checkpoint(
    path,
    theta: BaseParams,
    V: Optional[np.ndarray],
    vocab: Vocab,
    config: Any = None,
    rng_state: Optional[dict] = None,
) -> None:
    doc = {
        "format": FORMAT,
        "version": VERSION,
        "vocab": vocab.symbols,
        "config": asdict(config) if hasattr(config, "__dataclass_fields__") else config,
        "rng_state": rng_state,
        "base_hash": theta.content_hash(),
        "params": {k: theta.arrays[k].tolist() for k in PARAM_SHAPES},
        "prompts": None if V is None else V.tolist(),
    }
    Path(path).write_text(json.dumps(doc, sort_keys=True) + "\n", encoding="utf-8")


def load_checkpoint(path):
    """Return ``(theta, V, vocab, config, rng_state)``."""
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if doc.get("format") != FORMAT:
        raise ValueError(f"{path}: not a {FORMAT} file")
    if doc.get("version") != VERSION:
        raise ValueError(f"{path}: unsupported checkpoint version {doc.get('version')}")
    theta = BaseParams({k: np.asarray(doc["params"][k], dtype=np.float64) for k in PARAM_SHAPES})
    if theta.content_hash() != doc["base_hash"]:
        raise ValueError(f"{path}: parameter hash mismatch")
    V = None if doc["prompts"] is None else np.asarray(doc["prompts"], dtype=np.float64)
    return theta, V, Vocab(doc["vocab"]), doc["config"], doc["rng_state"]


def write_loss_csv(path, curve: Sequence[float]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["step", "loss"])
        for i, v in enumerate(curve):
            w.writerow([i, repr(float(v))])
