"""Time the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat 3] [--scale 1.0]

Both backends are run on identical inputs; outputs are compared before any
timing is reported.
"""
from __future__ import annotations

import argparse
import time
from fractions import Fraction

import numpy as np

from padicds import _kernels, _pykernels
from padicds.circle import build_A
from padicds.ntheory import squarefree_divisors
from padicds.padic import admissible_numerators


def _best(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def cases(scale: float):
    N = int(200_000 * scale)
    yield f"sieve N={N}", lambda k: k.sieve(N)

    m, n = int(400 * scale) or 1, int(401 * scale) or 2
    a, b = build_A(m, Fraction(1, 4 * m * m)), build_A(n, Fraction(1, 4 * n * n))
    Da, la, ra = a._scaled
    Db, lb, rb = b._scaled
    D = np.lcm(Da, Db)
    yield f"overlap sweep m={m} n={n}", lambda k: k.overlap_length(la, ra, D // Da, lb, rb, D // Db)

    q = int(120 * scale) or 1
    vals = np.array(admissible_numerators(q), dtype=np.int64)
    yield f"residue histograms n={q} q<=4n", lambda k: k.residue_histograms(vals, 1, 4 * q)

    ds, mus = (np.array(x, dtype=np.int64) for x in zip(*squarefree_divisors(q)))
    yield f"mobius class counts n={q} q<=4n", lambda k: k.mobius_class_counts(q, ds, mus, 1, 4 * q)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--scale", type=float, default=1.0)
    args = ap.parse_args()
    compiled = _kernels.compiled_kernels
    if compiled is None:
        raise SystemExit("compiled kernels are not built; run `pip install -e . --no-build-isolation`")
    print(f"{'kernel':40s} {'python s':>10s} {'compiled s':>11s} {'speed-up':>9s}")
    for name, call in cases(args.scale):
        tp, outp = _best(lambda: call(_pykernels), args.repeat)
        tc, outc = _best(lambda: call(compiled), args.repeat)
        same = all(np.array_equal(x, y) for x, y in zip(outp, outc)) if isinstance(outp, tuple) else np.array_equal(outp, outc)
        if not same:
            raise SystemExit(f"{name}: backends disagree")
        print(f"{name:40s} {tp:10.4f} {tc:11.5f} {tp / tc:8.0f}x")


if __name__ == "__main__":
    main()
