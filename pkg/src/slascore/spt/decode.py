"""Length-normalized beam search."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .model import EOS, BaseParams, LengthOverflow, encode, forward

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Hypothesis:
    tokens: tuple[int, ...]
    logprob: float
    finished: bool

    @property
    def score(self) -> float:
        """Log-probability per emitted token (EOS included)."""
        return self.logprob / max(1, len(self.tokens))


def _rank(h: Hypothesis):
    return (-h.score, h.tokens)


def greedy_search(step: Callable[[tuple], np.ndarray], max_len: int, eos: Optional[int] = EOS) -> Hypothesis:
    prefix: tuple[int, ...] = ()
    logprob = 0.0
    for _ in range(max_len):
        lp = step(prefix)
        tok = int(np.argmax(lp))
        prefix += (tok,)
        logprob += float(lp[tok])
        if tok == eos:
            return Hypothesis(prefix, logprob, True)
    return Hypothesis(prefix, logprob, False)


def beam_search(
    step: Callable[[tuple], np.ndarray],
    beam_width: int,
    max_len: int,
    eos: Optional[int] = EOS,
    include_greedy: bool = True,
) -> Hypothesis:
    """Best hypothesis by length-normalized log-probability.

    ``step(prefix)`` returns next-token log-probabilities. Candidates are
    ranked by cumulative log-probability with ties broken towards lower
    token ids; hypotheses leave the beam when they emit ``eos``. With
    ``include_greedy`` the greedy path also competes in the final choice,
    so the result never scores below greedy decoding.
    """
    if beam_width < 1:
        raise ValueError("beam_width must be >= 1")
    beams = [Hypothesis((), 0.0, False)]
    finished: list[Hypothesis] = []
    for _ in range(max_len):
        cands = []
        for h in beams:
            lp = step(h.tokens)
            for tok in range(len(lp)):
                cands.append(Hypothesis(h.tokens + (tok,), h.logprob + float(lp[tok]), tok == eos))
        cands.sort(key=lambda h: (-h.logprob, h.tokens))
        beams = []
        for h in cands[:beam_width]:
            (finished if h.finished else beams).append(h)
        if not beams:
            break
    pool = finished or beams
    if include_greedy and beam_width > 1:
        g = greedy_search(step, max_len, eos)
        if g.finished or not finished:
            pool = pool + [g]
    return min(pool, key=_rank)


@dataclass(frozen=True)
class DecodeResult:
    tokens: tuple[int, ...]  # ends with EOS unless overflowed
    score: float
    overflow: bool


def decode(
    theta: BaseParams,
    V: Optional[np.ndarray],
    x: Sequence[int],
    beam_width: int = 5,
    max_len: Optional[int] = None,
    context: Sequence[int] = (),
) -> DecodeResult:
    """Beam-search a target sequence; ``beam_width=1`` is greedy decoding."""
    m = 0 if V is None else len(V)
    room = theta.max_len - m - len(context)
    if room < 1:
        raise LengthOverflow("no room for BOS within the maximum length")
    limit = room if max_len is None else min(max_len, room)
    enc = encode(theta, x)
    memo: dict[tuple, np.ndarray] = {}

    def step(prefix):
        lp = memo.get(prefix)
        if lp is None:
            cache = forward(theta, V, x, prefix, context, _enc=enc)
            with np.errstate(divide="ignore"):  # an underflowed probability is a hard -inf
                lp = np.log(cache.probs[-1])
            memo[prefix] = lp
        return lp

    best = beam_search(step, beam_width, limit)
    if not best.finished:
        log.warning("decode reached %d tokens without EOS; returning best partial", limit)
    return DecodeResult(best.tokens, best.score, not best.finished)
