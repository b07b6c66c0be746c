"""Gradient-descent training in fine-tuning (all weights) or soft-prompt mode."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Literal, Optional, Sequence

import numpy as np

from .model import BaseParams, backward, forward, sequence_nll

log = logging.getLogger(__name__)

PROMPT_COUNTS = (1, 5, 20, 100)


class DivergenceDetected(RuntimeError):
    def __init__(self, message: str, curve: list[float]):
        super().__init__(message)
        self.curve = curve


@dataclass(frozen=True)
class Example:
    x: tuple[int, ...]
    y: tuple[int, ...]  # ends with EOS
    context: tuple[int, ...] = ()


@dataclass(frozen=True)
class TrainConfig:
    mode: Literal["ft", "spt"] = "spt"
    lr: float = 0.1
    max_epochs: int = 40
    max_steps: int = 30_000
    batch_size: int = 20
    seed: int = 0
    beam_width: int = 5
    m: int = 20
    optimizer: Literal["sgd", "adam"] = "sgd"
    betas: tuple[float, float] = (0.9, 0.999)

    def __post_init__(self):
        if self.mode not in ("ft", "spt"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.lr < 0 or self.max_epochs < 1 or self.max_steps < 1 or self.batch_size < 1 or self.beam_width < 1:
            raise ValueError("training settings must be positive")
        if self.m < 1:
            raise ValueError("prompt count must be >= 1")


def trainable_parameter_count(mode: str, theta: BaseParams, V: Optional[np.ndarray]) -> int:
    """Prompt-only in SPT mode (``m * d``); every base weight (plus prompts, if any) in FT mode."""
    if mode == "spt":
        if V is None:
            raise ValueError("SPT mode needs a prompt matrix")
        return int(V.size)
    return theta.n_params() + (0 if V is None else int(V.size))


def batch_loss_and_grads(theta: BaseParams, V: Optional[np.ndarray], batch: Sequence[Example]):
    """Mean token-level cross-entropy over target positions and its gradients."""
    if not batch:
        raise ValueError("empty batch")
    total = 0.0
    n_tok = 0
    grads = {k: np.zeros_like(v) for k, v in theta.arrays.items()}
    dV = None if V is None else np.zeros_like(V)
    for ex in batch:
        cache = forward(theta, V, ex.x, ex.y[:-1], ex.context)
        total += sequence_nll(cache, ex.y)
        n_tok += len(ex.y)
        g, gv = backward(theta, V, cache, ex.y)
        for k in grads:
            grads[k] += g[k]
        if dV is not None:
            dV += gv
    for k in grads:
        grads[k] /= n_tok
    if dV is not None:
        dV /= n_tok
    return total / n_tok, grads, dV


def loss(theta: BaseParams, V: Optional[np.ndarray], batch: Sequence[Example]) -> float:
    total = 0.0
    n_tok = 0
    for ex in batch:
        cache = forward(theta, V, ex.x, ex.y[:-1], ex.context)
        total += sequence_nll(cache, ex.y)
        n_tok += len(ex.y)
    return total / n_tok


class _Adam:
    def __init__(self, betas):
        self.b1, self.b2 = betas
        self.m: dict = {}
        self.v: dict = {}
        self.t = 0

    def step(self, params: dict, grads: dict, lr: float):
        self.t += 1
        for k, g in grads.items():
            m = self.m.setdefault(k, np.zeros_like(g))
            v = self.v.setdefault(k, np.zeros_like(g))
            m *= self.b1
            m += (1 - self.b1) * g
            v *= self.b2
            v += (1 - self.b2) * g * g
            mhat = m / (1 - self.b1 ** self.t)
            vhat = v / (1 - self.b2 ** self.t)
            params[k] -= lr * mhat / (np.sqrt(vhat) + 1e-8)


@dataclass
class TrainResult:
    theta: BaseParams
    V: Optional[np.ndarray]
    curve: list[float] = field(default_factory=list)
    steps: int = 0
    epochs: int = 0


def train(
    theta: BaseParams,
    V: Optional[np.ndarray],
    dataset: Sequence[Example],
    cfg: TrainConfig,
) -> TrainResult:
    """Minibatch gradient descent until the epoch or step cap.

    SPT mode updates only the prompt matrix and returns the base weights
    untouched; FT mode updates every base weight (and the prompts, if given).
    Inputs are never mutated.
    """
    if not dataset:
        raise ValueError("empty dataset")
    if cfg.mode == "spt" and V is None:
        raise ValueError("SPT mode needs a prompt matrix")
    rng = np.random.default_rng(cfg.seed)
    theta_out = theta if cfg.mode == "spt" else theta.copy()
    V_out = None if V is None else V.copy()
    opt = _Adam(cfg.betas) if cfg.optimizer == "adam" else None
    curve: list[float] = []
    step = 0
    epoch = 0
    while epoch < cfg.max_epochs and step < cfg.max_steps:
        order = rng.permutation(len(dataset))
        for start in range(0, len(order), cfg.batch_size):
            if step >= cfg.max_steps:
                break
            batch = [dataset[i] for i in order[start:start + cfg.batch_size]]
            value, grads, dV = batch_loss_and_grads(theta_out, V_out, batch)
            if not math.isfinite(value):
                raise DivergenceDetected(f"non-finite loss at step {step}", curve)
            curve.append(value)
            params: dict[str, np.ndarray] = {}
            updates: dict[str, np.ndarray] = {}
            if cfg.mode == "ft":
                params.update(theta_out.arrays)
                updates.update(grads)
            if V_out is not None:
                params["__prompts__"] = V_out
                updates["__prompts__"] = dV
            if opt is None:
                for k, g in updates.items():
                    params[k] -= cfg.lr * g
            else:
                opt.step(params, updates, cfg.lr)
            step += 1
            if step % 200 == 0:
                log.info("%s step %d epoch %d loss %.4f", cfg.mode, step, epoch, value)
        epoch += 1
    return TrainResult(theta_out, V_out, curve, step, epoch)
