"""Synthetic verbatim/ITN sentence pairs for the prompt-tuning lab.

A source sentence is a verbatim "spoken" transcript: distinct content words
interleaved with hesitations, spoken number spans and an immediately
repeated word or two-word phrase. Its pretraining target is the written,
inverse-text-normalized form a readability-oriented recognizer would
produce; its verbatim target is the source itself.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..normalization import digitize_numbers
from ..numbers import number_to_words
from .model import BOS, EOS, PAD

CONTENT_WORDS = (
    "cat", "dog", "house", "blue", "green", "run", "eat", "big",
    "small", "red", "tree", "car", "book", "sun", "day", "go",
)
HESITATIONS = ("uh", "um", "er", "hmm")


@dataclass(frozen=True)
class CorpusConfig:
    content_words: tuple[str, ...] = CONTENT_WORDS
    hesitations: tuple[str, ...] = HESITATIONS
    numbers: tuple[int, ...] = tuple(range(1, 10)) + tuple(range(20, 60))
    min_words: int = 3
    max_words: int = 6
    hesitation_rate: float = 0.6
    number_rate: float = 0.4
    repetition_rate: float = 0.3


class Vocab:
    """Symbol table with BOS/EOS/PAD fixed at ids 0/1/2."""

    def __init__(self, symbols: Sequence[str]):
        specials = ["<s>", "</s>", "<pad>"]
        rest = [s for s in symbols if s not in specials]
        self.symbols = specials + list(dict.fromkeys(rest))
        self.index = {s: i for i, s in enumerate(self.symbols)}
        assert self.index["<s>"] == BOS and self.index["</s>"] == EOS and self.index["<pad>"] == PAD

    def __len__(self) -> int:
        return len(self.symbols)

    def encode(self, tokens: Sequence[str]) -> list[int]:
        return [self.index[t] for t in tokens]

    def decode(self, ids: Sequence[int]) -> list[str]:
        return [self.symbols[i] for i in ids if i not in (BOS, EOS, PAD)]


def build_vocab(cfg: CorpusConfig = CorpusConfig()) -> Vocab:
    number_words: list[str] = []
    for n in cfg.numbers:
        number_words += number_to_words(n)
    digits = [str(n) for n in cfg.numbers]
    return Vocab(list(cfg.hesitations) + list(cfg.content_words) + list(dict.fromkeys(number_words)) + digits)


def collapse_repetitions(tokens: Sequence[str]) -> list[str]:
    """Drop the second copy of any immediately repeated word or two-word phrase."""
    toks = list(tokens)
    changed = True
    while changed:
        changed = False
        for i in range(len(toks)):
            for size in (2, 1):
                if toks[i:i + size] == toks[i + size:i + 2 * size] and len(toks[i:i + size]) == size:
                    del toks[i + size:i + 2 * size]
                    changed = True
                    break
            if changed:
                break
    return toks


def itn(tokens: Sequence[str], hesitations: Sequence[str] = HESITATIONS) -> list[str]:
    """Written form: hesitations deleted, repetitions collapsed, spoken numbers as digits."""
    hes = set(hesitations)
    toks = [t for t in tokens if t not in hes]
    return digitize_numbers(collapse_repetitions(toks))


def sample_sentence(rng: np.random.Generator, cfg: CorpusConfig) -> list[str]:
    k = int(rng.integers(cfg.min_words, cfg.max_words + 1))
    words = [str(w) for w in rng.choice(cfg.content_words, size=k, replace=False)]
    # gap g sits before words[g]; gap k is the sentence end. One event per gap.
    events: dict[int, list[str]] = {}
    reserved: set[int] = set()

    if rng.random() < cfg.repetition_rate:
        size = 2 if k >= 2 and rng.random() < 0.5 else 1
        start = int(rng.integers(0, k - size + 1))
        gap = start + size
        events[gap] = words[start:start + size]
        reserved.update(range(start + 1, start + size))

    def free_gap():
        free = [g for g in range(k + 1) if g not in events and g not in reserved]
        return int(rng.choice(free)) if free else None

    if rng.random() < cfg.number_rate:
        g = free_gap()
        if g is not None:
            events[g] = number_to_words(int(rng.choice(cfg.numbers)))
    if rng.random() < cfg.hesitation_rate:
        for _ in range(1 + int(rng.random() < 0.3)):
            g = free_gap()
            if g is not None:
                events[g] = [str(rng.choice(cfg.hesitations))]

    out: list[str] = []
    for g in range(k + 1):
        out += events.get(g, [])
        if g < k:
            out.append(words[g])
    return out


def make_itn_corpus(seed: int, size: int, cfg: CorpusConfig = CorpusConfig()):
    """Return ``(pretrain_pairs, verbatim_pairs)`` over ``size`` sampled sources."""
    if size < 1:
        raise ValueError("size must be >= 1")
    rng = np.random.default_rng(seed)
    sources = [sample_sentence(rng, cfg) for _ in range(size)]
    pretrain = [(s, itn(s, cfg.hesitations)) for s in sources]
    verbatim = [(s, list(s)) for s in sources]
    return pretrain, verbatim
