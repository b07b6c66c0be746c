"""Small models and datasets shared by the SPT tests."""

import numpy as np

from slascore.spt.model import PARAM_SHAPES, BaseParams
from slascore.spt.train import Example, batch_loss_and_grads, loss


def tiny_model(vocab=8, d=4, max_len=16, seed=0):
    return BaseParams.init(vocab, d, max_len, np.random.default_rng(seed))


def tiny_batch(vocab=8, n=3, seed=1, context=True):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        x = tuple(int(t) for t in rng.integers(3, vocab, size=int(rng.integers(2, 5))))
        y = tuple(int(t) for t in rng.integers(3, vocab, size=int(rng.integers(1, 3)))) + (1,)
        ctx = tuple(int(t) for t in rng.integers(3, vocab, size=int(rng.integers(0, 3)))) if context else ()
        out.append(Example(x, y, ctx))
    return out


def fd_relative_errors(theta, V, batch, eps=1e-4):
    """Max-norm relative error of every analytic gradient against central differences."""
    _, grads, dV = batch_loss_and_grads(theta, V, batch)
    errors = {}
    targets = {name: (theta.arrays[name], grads[name]) for name in PARAM_SHAPES}
    if V is not None:
        targets["V"] = (V, dV)
    for name, (arr, analytic) in targets.items():
        numeric = np.zeros_like(arr)
        for idx in np.ndindex(arr.shape):
            old = arr[idx]
            arr[idx] = old + eps
            up = loss(theta, V, batch)
            arr[idx] = old - eps
            down = loss(theta, V, batch)
            arr[idx] = old
            numeric[idx] = (up - down) / (2 * eps)
        scale = max(np.abs(analytic).max(), np.abs(numeric).max(), 1e-12)
        errors[name] = float(np.abs(analytic - numeric).max() / scale)
    return errors
