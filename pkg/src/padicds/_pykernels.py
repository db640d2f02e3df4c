"""Pure-Python versions of the compiled kernels (same signatures, same results)."""
from __future__ import annotations

import math

import numpy as np


def _as_list(xs):
    return xs.tolist() if isinstance(xs, np.ndarray) else list(xs)


def sieve(N: int):
    phi = list(range(N + 1))
    mu = [1] * (N + 1)
    omega = [0] * (N + 1)
    composite = bytearray(N + 1)
    mu[0] = 0
    for i in range(2, N + 1):
        if composite[i]:
            continue
        for j in range(i, N + 1, i):
            if j > i:
                composite[j] = 1
            phi[j] -= phi[j] // i
            mu[j] = -mu[j]
            omega[j] += 1
        for j in range(i * i, N + 1, i * i):
            mu[j] = 0
    as_arr = lambda xs: np.array(xs, dtype=np.int64)  # noqa: E731
    return as_arr(phi), as_arr(mu), as_arr(omega)


def overlap_length(l1, r1, s1: int, l2, r2, s2: int) -> int:
    l1, r1, l2, r2 = map(_as_list, (l1, r1, l2, r2))
    i = j = 0
    total = 0
    while i < len(l1) and j < len(l2):
        a1, b1 = l1[i] * s1, r1[i] * s1
        a2, b2 = l2[j] * s2, r2[j] * s2
        lo = a1 if a1 > a2 else a2
        hi = b1 if b1 < b2 else b2
        if hi > lo:
            total += hi - lo
        if b1 < b2:
            i += 1
        else:
            j += 1
    return total


def residue_histograms(values, q_lo: int, q_hi: int) -> np.ndarray:
    values = _as_list(values)
    out = []
    for q in range(q_lo, q_hi + 1):
        hist = [0] * q
        for v in values:
            hist[v % q] += 1
        out += hist
    return np.array(out, dtype=np.int64)


def mobius_class_counts(n: int, ds, mus, q_lo: int, q_hi: int) -> np.ndarray:
    ds, mus = _as_list(ds), _as_list(mus)
    out = []
    for q in range(q_lo, q_hi + 1):
        hist = [0] * q
        for d, mu in zip(ds, mus):
            L = n // d
            qq = q // math.gcd(d, q)
            for c in range(qq):
                cnt = (L - c) // qq - (-L - 1 - c) // qq
                hist[d * c % q] += mu * cnt
        out += hist
    return np.array(out, dtype=np.int64)
