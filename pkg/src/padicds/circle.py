"""Unions of closed arcs on R/Z with exact rational endpoints.

A :class:`CircleSet` is kept canonical: arcs are sorted, pairwise disjoint,
merged when they touch, and any arc through 0 is split into a piece ending at
1 and a piece starting at 0. Under that convention two sets are equal iff
their interval tuples are equal.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable

import numpy as np

from . import _kernels, groupring
from .ntheory import euler_phi

ZERO = Fraction(0)
ONE = Fraction(1)
HALF = Fraction(1, 2)


class PreconditionError(ValueError):
    pass


def farey_numerators(n: int) -> list[int]:
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    return [a for a in range(1, n + 1) if math.gcd(a, n) == 1]


def circle_distance(g) -> Fraction:
    """Distance from g to the nearest integer."""
    x = Fraction(g) % 1
    return min(x, 1 - x)


@dataclass(frozen=True)
class CircleSet:
    intervals: tuple[tuple[Fraction, Fraction], ...] = ()

    @classmethod
    def from_arcs(cls, arcs: Iterable[tuple[Fraction, Fraction]]) -> "CircleSet":
        """Canonicalise closed arcs [left, right] given by real-line lifts."""
        pieces = []
        for left, right in arcs:
            left, right = Fraction(left), Fraction(right)
            if right < left:
                raise ValueError(f"arc with right < left: [{left}, {right}]")
            if right - left >= 1:
                return cls.full()
            if right == left:
                continue
            lo = left % 1
            hi = lo + (right - left)
            if hi > 1:
                pieces.append((ZERO, hi - 1))
                pieces.append((lo, ONE))
            else:
                pieces.append((lo, hi))
        pieces.sort()
        merged: list[list[Fraction]] = []
        for lo, hi in pieces:
            if merged and lo <= merged[-1][1]:
                if hi > merged[-1][1]:
                    merged[-1][1] = hi
            else:
                merged.append([lo, hi])
        return cls(tuple((lo, hi) for lo, hi in merged))

    @classmethod
    def full(cls) -> "CircleSet":
        return cls(((ZERO, ONE),))

    @property
    def arcs(self) -> list[tuple[Fraction, Fraction]]:
        """(left endpoint, length) pairs."""
        return [(lo, hi - lo) for lo, hi in self.intervals]

    def __bool__(self) -> bool:
        return bool(self.intervals)

    @cached_property
    def _scaled(self):
        # (D, lefts, rights) with every endpoint an integer multiple of 1/D
        D = 1
        for lo, hi in self.intervals:
            D = math.lcm(D, lo.denominator, hi.denominator)
        lefts = [lo.numerator * (D // lo.denominator) for lo, _ in self.intervals]
        rights = [hi.numerator * (D // hi.denominator) for _, hi in self.intervals]
        if D < _kernels.INT64_SAFE:
            lefts = np.array(lefts, dtype=np.int64)
            rights = np.array(rights, dtype=np.int64)
        return D, lefts, rights


def build_A(n: int, radius) -> CircleSet:
    """Arcs of half-length `radius` around each reduced fraction a/n."""
    radius = Fraction(radius)
    if radius < 0:
        raise ValueError(f"radius must be non-negative, got {radius}")
    if radius == 0:
        return CircleSet()
    if radius >= HALF:
        return CircleSet.full()
    return CircleSet.from_arcs(
        (Fraction(a, n) - radius, Fraction(a, n) + radius) for a in farey_numerators(n)
    )


def measure(s: CircleSet) -> Fraction:
    return sum((hi - lo for lo, hi in s.intervals), ZERO)


def intersect(s1: CircleSet, s2: CircleSet) -> CircleSet:
    a, b = s1.intervals, s2.intervals
    i = j = 0
    out = []
    while i < len(a) and j < len(b):
        lo = max(a[i][0], b[j][0])
        hi = min(a[i][1], b[j][1])
        if hi > lo:
            out.append((lo, hi))
        if a[i][1] < b[j][1]:
            i += 1
        else:
            j += 1
    return CircleSet.from_arcs(out)


def intersection_measure(s1: CircleSet, s2: CircleSet) -> Fraction:
    """measure(intersect(s1, s2)) by an integer endpoint sweep in the kernel layer."""
    if not s1 or not s2:
        return ZERO
    D1, l1, r1 = s1._scaled
    D2, l2, r2 = s2._scaled
    D = math.lcm(D1, D2)
    num = _kernels.overlap_length(l1, r1, D // D1, l2, r2, D // D2, D)
    return Fraction(num, D)


def _pair_overlap(total: int, t: int, small: int, scale: int) -> int:
    # overlap of two arcs with half-lengths summing to total/scale, centres t/scale
    # apart on a circle of circumference `scale`, the shorter arc being small/scale
    near = min(max(total - t, 0), small)
    far = min(max(total - (scale - t), 0), small)
    return near + far


def overlap_measure_fast(m: int, n: int, r_m, r_n) -> Fraction:
    """λ(A_m(r_m) ∩ A_n(r_n)) from the closed-form decomposition of F_m × F_n.

    Each term coefficient·F_k of the decomposition contributes its points
    γ = a/k with ‖γ‖ < r_m + r_n; a pair of arcs whose centres differ by γ
    overlaps in clamp(r_m + r_n − ‖γ‖, 0, 2 min(r_m, r_n)), plus the same
    expression at 1 − ‖γ‖ for the wrap-around side.
    """
    r_m, r_n = Fraction(r_m), Fraction(r_n)
    if m < 1 or n < 1:
        raise ValueError("m and n must be positive")
    if r_m < 0 or r_n < 0:
        raise ValueError("radii must be non-negative")
    if r_m >= Fraction(1, 2 * m) or r_n >= Fraction(1, 2 * n):
        raise PreconditionError(
            f"arcs of A_{m} or A_{n} overlap internally; use intersect() instead"
        )
    if r_m == 0 or r_n == 0:
        return ZERO
    Q = math.lcm(r_m.denominator, r_n.denominator)
    R = (r_m + r_n) * Q  # integer numerators over Q
    delta = min(r_m, r_n) * Q
    total = Fraction(0)
    for coeff, k in groupring.decompose_product(m, n).terms:
        if coeff == 0:
            continue
        # work over the denominator Q*k: ‖a/k‖ = a*Q / (Q*k)
        Rk, small, scale = int(R) * k, 2 * int(delta) * k, Q * k
        acc = 0
        a_max = min(k // 2, (Rk - 1) // Q)  # a*Q < R*k
        for a in range(0, a_max + 1):
            if math.gcd(a, k) != 1:
                continue
            weight = 1 if (2 * a == k or a == 0) else 2
            acc += weight * _pair_overlap(Rk, a * Q, small, scale)
        total += coeff * Fraction(acc, scale)
    return total


def disjoint_measure(n: int, radius) -> Fraction:
    """2·φ(n)·radius, valid while the arcs of A_n(radius) are disjoint."""
    return 2 * euler_phi(n) * Fraction(radius)
