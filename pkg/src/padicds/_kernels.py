"""Backend selection for the hot loops.

The compiled extension is used when it imports; setting PADICDS_PURE_PYTHON=1
forces the pure-Python versions. Both live side by side so tests and the
benchmark can compare them directly.
"""
from __future__ import annotations

import os

import numpy as np

from . import _pykernels as python_kernels

try:
    from . import _ckernels as compiled_kernels
except ImportError:  # extension not built
    compiled_kernels = None

INT64_SAFE = 1 << 62

if compiled_kernels is not None and not os.environ.get("PADICDS_PURE_PYTHON"):
    _impl = compiled_kernels
    BACKEND = "compiled"
else:
    _impl = python_kernels
    BACKEND = "python"


def _i64(xs) -> np.ndarray:
    return np.ascontiguousarray(xs, dtype=np.int64)


def sieve(N: int):
    return _impl.sieve(N)


def overlap_length(l1, r1, s1: int, l2, r2, s2: int, bound: int) -> int:
    """`bound` is an upper bound on every scaled endpoint (the common denominator)."""
    if _impl is compiled_kernels and bound < INT64_SAFE:
        return int(_impl.overlap_length(_i64(l1), _i64(r1), s1, _i64(l2), _i64(r2), s2))
    return python_kernels.overlap_length(l1, r1, s1, l2, r2, s2)


def residue_histograms(values, q_lo: int, q_hi: int) -> np.ndarray:
    if _impl is compiled_kernels:
        return _impl.residue_histograms(_i64(values), q_lo, q_hi)
    return python_kernels.residue_histograms(values, q_lo, q_hi)


def mobius_class_counts(n: int, ds, mus, q_lo: int, q_hi: int) -> np.ndarray:
    if _impl is compiled_kernels:
        return _impl.mobius_class_counts(n, _i64(ds), _i64(mus), q_lo, q_hi)
    return python_kernels.mobius_class_counts(n, ds, mus, q_lo, q_hi)


def split_histograms(flat: np.ndarray, q_lo: int, q_hi: int) -> dict[int, np.ndarray]:
    out = {}
    off = 0
    for q in range(q_lo, q_hi + 1):
        out[q] = flat[off : off + q]
        off += q
    return out
