"""A small attention encoder-decoder with hand-written gradients.

Encoder: token + position embeddings of the current token plus the
embeddings of the three preceding tokens, each through its own projection
(a causal width-4 convolution).

Decoder input rows are ``[prompts, context, BOS, y_1 .. y_{t-1}]`` with
positions counted from 0 at the first prompt row, so BOS sits at index
``m + len(context)``. Each decoder row adds projections of the two
previous rows and a causal self-attention over earlier rows (this is how
prompts reach the output), cross-attends over the encoder, then projects
to vocabulary logits.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

BOS, EOS, PAD = 0, 1, 2

#: parameter name -> shape spec; "V" is the vocabulary size, "L" the max length
PARAM_SHAPES = {
    "E": ("V", "d"),
    "P": ("L", "d"),
    "W_enc": ("d", "d"),
    "W_prev1": ("d", "d"),
    "W_prev2": ("d", "d"),
    "W_prev3": ("d", "d"),
    "W_sq": ("d", "d"),
    "W_sk": ("d", "d"),
    "W_sv": ("d", "d"),
    "W_dprev1": ("d", "d"),
    "W_dprev2": ("d", "d"),
    "W_q": ("d", "d"),
    "W_k": ("d", "d"),
    "W_v": ("d", "d"),
    "W_out": ("d", "V"),
}


class LengthOverflow(ValueError):
    pass


@dataclass
class BaseParams:
    """Frozen-or-trainable model weights, keyed by :data:`PARAM_SHAPES` names."""

    arrays: dict[str, np.ndarray]

    @classmethod
    def init(cls, vocab_size: int, d: int, max_len: int, rng: np.random.Generator, scale: float = 0.3):
        dims = {"V": vocab_size, "d": d, "L": max_len}
        arrays = {}
        for name, shape in PARAM_SHAPES.items():
            shp = tuple(dims[s] for s in shape)
            fan_in = shp[0] if name.startswith("W_") else 1
            std = scale if fan_in == 1 else 1.0 / np.sqrt(fan_in)
            arrays[name] = rng.normal(0.0, std, size=shp)
        return cls(arrays)

    @property
    def d(self) -> int:
        return self.arrays["E"].shape[1]

    @property
    def vocab_size(self) -> int:
        return self.arrays["E"].shape[0]

    @property
    def max_len(self) -> int:
        return self.arrays["P"].shape[0]

    def __getitem__(self, name: str) -> np.ndarray:
        return self.arrays[name]

    def copy(self) -> "BaseParams":
        return BaseParams({k: v.copy() for k, v in self.arrays.items()})

    def n_params(self) -> int:
        return sum(v.size for v in self.arrays.values())

    def content_hash(self) -> str:
        h = hashlib.sha256()
        for name in sorted(self.arrays):
            a = np.ascontiguousarray(self.arrays[name], dtype=np.float64)
            h.update(name.encode())
            h.update(str(a.shape).encode())
            h.update(a.tobytes())
        return h.hexdigest()


def init_prompts(
    m: int, base: BaseParams, rng: np.random.Generator, method: str = "vocab"
) -> np.ndarray:
    """``m x d`` prompt matrix, either copies of random vocabulary embeddings or zeros."""
    if m < 1:
        raise ValueError("prompt count must be >= 1")
    if method == "zeros":
        return np.zeros((m, base.d))
    if method == "vocab":
        rows = rng.integers(0, base.vocab_size, size=m)
        return base["E"][rows].copy()
    raise ValueError(f"unknown prompt init {method!r}")


def _softmax(s: np.ndarray) -> np.ndarray:
    s = s - s.max(axis=-1, keepdims=True)
    e = np.exp(s)
    return e / e.sum(axis=-1, keepdims=True)


def _shift(a: np.ndarray, k: int) -> np.ndarray:
    out = np.zeros_like(a)
    if k < len(a):
        out[k:] = a[: len(a) - k]
    return out


@dataclass
class Cache:
    x: np.ndarray
    dec_ids: np.ndarray  # token ids for context/BOS/prefix rows
    m: int
    n_ctx: int
    positions: np.ndarray  # positional row used by each decoder row
    mask_prompts: bool
    Sx: np.ndarray
    X1: np.ndarray
    X2: np.ndarray
    X3: np.ndarray
    H: np.ndarray
    D: np.ndarray
    Dp1: np.ndarray
    Dp2: np.ndarray
    Qs: np.ndarray
    Ks: np.ndarray
    Vs: np.ndarray
    As: np.ndarray
    G: np.ndarray
    Q: np.ndarray
    K: np.ndarray
    Vc: np.ndarray
    A: np.ndarray
    Z: np.ndarray
    probs: np.ndarray

    @property
    def bos_row(self) -> int:
        return self.m + self.n_ctx


def encode(theta: BaseParams, x: Sequence[int]):
    x = np.asarray(x, dtype=np.int64)
    n = len(x)
    if not 1 <= n <= theta.max_len:
        raise LengthOverflow(f"source length {n} outside 1..{theta.max_len}")
    Ex = theta["E"][x]
    Sx = Ex + theta["P"][:n]
    X1 = _shift(Ex, 1)
    X2 = _shift(Ex, 2)
    X3 = _shift(Ex, 3)
    H = Sx @ theta["W_enc"] + X1 @ theta["W_prev1"] + X2 @ theta["W_prev2"] + X3 @ theta["W_prev3"]
    return x, Sx, X1, X2, X3, H


def forward(
    theta: BaseParams,
    V: Optional[np.ndarray],
    x: Sequence[int],
    y_prefix: Sequence[int] = (),
    context: Sequence[int] = (),
    mask_prompts: bool = False,
    _enc=None,
) -> Cache:
    """Run the model; ``cache.probs[cache.bos_row:]`` are the next-token
    distributions after BOS and after each prefix token."""
    m = 0 if V is None else len(V)
    ctx = np.asarray(context, dtype=np.int64)
    dec_ids = np.concatenate([ctx, [BOS], np.asarray(y_prefix, dtype=np.int64)]).astype(np.int64)
    T = m + len(dec_ids)
    if T > theta.max_len:
        raise LengthOverflow(f"decoder length {T} exceeds {theta.max_len}")
    x, Sx, X1, X2, X3, H = _enc if _enc is not None else encode(theta, x)
    d = theta.d
    scale = 1.0 / np.sqrt(d)

    rows = theta["E"][dec_ids]
    D0 = rows if m == 0 else np.vstack([V, rows])
    positions = np.arange(T)
    D = D0 + theta["P"][:T]
    Dp1 = _shift(D, 1)
    Dp2 = _shift(D, 2)
    if mask_prompts and m:
        Dp1[m] = 0.0
        Dp2[m:m + 2] = 0.0

    Qs = D @ theta["W_sq"]
    Ks = D @ theta["W_sk"]
    Vs = D @ theta["W_sv"]
    Ss = (Qs @ Ks.T) * scale
    blocked = np.triu(np.ones((T, T), dtype=bool), 1)
    if mask_prompts and m:
        blocked[m:, :m] = True
        blocked[:m, :m] |= ~np.eye(m, dtype=bool)
    Ss[blocked] = -np.inf
    As = _softmax(Ss)
    Cs = As @ Vs
    G = D + Dp1 @ theta["W_dprev1"] + Dp2 @ theta["W_dprev2"] + Cs

    Q = G @ theta["W_q"]
    K = H @ theta["W_k"]
    Vc = H @ theta["W_v"]
    A = _softmax((Q @ K.T) * scale)
    Z = G + A @ Vc
    probs = _softmax(Z @ theta["W_out"])
    return Cache(x, dec_ids, m, len(ctx), positions, mask_prompts, Sx, X1, X2, X3, H,
                 D, Dp1, Dp2, Qs, Ks, Vs, As, G, Q, K, Vc, A, Z, probs)


def target_rows(cache: Cache, n_targets: int) -> np.ndarray:
    start = cache.bos_row
    return np.arange(start, start + n_targets)


def sequence_nll(cache: Cache, targets: Sequence[int]) -> float:
    """Summed -log p of ``targets`` at the BOS and prefix rows."""
    rows = target_rows(cache, len(targets))
    p = cache.probs[rows, np.asarray(targets)]
    return float(-np.log(p).sum())


def backward(theta: BaseParams, V: Optional[np.ndarray], cache: Cache, targets: Sequence[int]):
    """Gradients of the summed target cross-entropy.

    Returns ``(grads, dV)`` where ``grads`` maps parameter names to arrays
    and ``dV`` is the prompt gradient (``None`` without prompts).
    """
    c = cache
    d = theta.d
    scale = 1.0 / np.sqrt(d)
    T = len(c.D)
    n = len(c.x)
    m = c.m

    dlogits = np.zeros_like(c.probs)
    rows = target_rows(c, len(targets))
    dlogits[rows] = c.probs[rows]
    dlogits[rows, np.asarray(targets)] -= 1.0

    g = {}
    g["W_out"] = c.Z.T @ dlogits
    dZ = dlogits @ theta["W_out"].T

    # cross-attention
    dG = dZ.copy()
    dA = dZ @ c.Vc.T
    dVc = c.A.T @ dZ
    dSc = c.A * (dA - (dA * c.A).sum(axis=1, keepdims=True)) * scale
    dQ = dSc @ c.K
    dK = dSc.T @ c.Q
    g["W_q"] = c.G.T @ dQ
    g["W_k"] = c.H.T @ dK
    g["W_v"] = c.H.T @ dVc
    dG += dQ @ theta["W_q"].T
    dH = dK @ theta["W_k"].T + dVc @ theta["W_v"].T

    # decoder mixing: G = D + Dp1 W_dprev1 + Dp2 W_dprev2 + As Vs
    dD = dG.copy()
    g["W_dprev1"] = c.Dp1.T @ dG
    g["W_dprev2"] = c.Dp2.T @ dG
    dDp1 = dG @ theta["W_dprev1"].T
    dDp2 = dG @ theta["W_dprev2"].T
    if c.mask_prompts and m:
        dDp1[m] = 0.0
        dDp2[m:m + 2] = 0.0
    dD[:-1] += dDp1[1:]
    if T > 2:
        dD[:-2] += dDp2[2:]
    dAs = dG @ c.Vs.T
    dVs = c.As.T @ dG
    dSs = c.As * (dAs - (dAs * c.As).sum(axis=1, keepdims=True)) * scale
    dQs = dSs @ c.Ks
    dKs = dSs.T @ c.Qs
    g["W_sq"] = c.D.T @ dQs
    g["W_sk"] = c.D.T @ dKs
    g["W_sv"] = c.D.T @ dVs
    dD += dQs @ theta["W_sq"].T + dKs @ theta["W_sk"].T + dVs @ theta["W_sv"].T

    dP = np.zeros_like(theta["P"])
    dP[:T] += dD
    dE = np.zeros_like(theta["E"])
    np.add.at(dE, c.dec_ids, dD[m:])
    dV = dD[:m].copy() if m else None

    # encoder
    g["W_enc"] = c.Sx.T @ dH
    g["W_prev1"] = c.X1.T @ dH
    g["W_prev2"] = c.X2.T @ dH
    g["W_prev3"] = c.X3.T @ dH
    dEx = dH @ theta["W_enc"].T
    dP[:n] += dEx
    for k, name in ((1, "W_prev1"), (2, "W_prev2"), (3, "W_prev3")):
        if n > k:
            dEx[:-k] += (dH @ theta[name].T)[k:]
    np.add.at(dE, c.x, dEx)
    g["E"] = dE
    g["P"] = dP
    return g, dV
