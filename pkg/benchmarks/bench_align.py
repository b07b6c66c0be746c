"""Time the compiled and pure-Python edit-distance kernels on random token pairs.

    python benchmarks/bench_align.py --pairs 200 --length 60
"""

import argparse
import random
import timeit

from slascore import _kernel_py

try:
    from slascore import _kernel_c
except ImportError:  # extension not built
    _kernel_c = None


def make_pairs(n, length, vocab, seed):
    """Integer-id sequences, as the aligner passes them after interning words."""
    rng = random.Random(seed)
    return [
        ([rng.randrange(vocab) for _ in range(length)],
         [rng.randrange(vocab) for _ in range(rng.randint(length // 2, length * 3 // 2))])
        for _ in range(n)
    ]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--pairs", type=int, default=200)
    ap.add_argument("--length", type=int, default=60)
    ap.add_argument("--vocab", type=int, default=20)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    pairs = make_pairs(args.pairs, args.length, args.vocab, args.seed)
    backends = {"python": _kernel_py}
    if _kernel_c is not None:
        backends["cython"] = _kernel_c
    else:
        print("cython kernel not built; timing the fallback only")

    results = {}
    for name, mod in backends.items():
        run = lambda: [mod.edit_ops(r, h) for r, h in pairs]  # noqa: E731
        results[name] = min(timeit.repeat(run, number=1, repeat=args.repeat))
        print(f"{name:>7}: {results[name] * 1e3:9.2f} ms for {args.pairs} pairs of ~{args.length} tokens")

    if len(results) == 2:
        same = all(_kernel_py.edit_ops(r, h) == _kernel_c.edit_ops(r, h) for r, h in pairs)
        print(f"speedup: {results['python'] / results['cython']:.1f}x, identical op sequences: {same}")


if __name__ == "__main__":
    main()
