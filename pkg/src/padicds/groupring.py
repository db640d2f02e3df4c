"""Formal sums of points of Q/Z and the closed-form product of the F_n."""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from types import MappingProxyType
from typing import Mapping

from .ntheory import divisors, euler_phi, factorize


class GroupRingElement:
    """Finite formal combination Σ c_γ·z^γ with γ ∈ [0,1) rational."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping | None = None):
        acc: dict[Fraction, Fraction] = defaultdict(Fraction)
        for gamma, mult in (terms or {}).items():
            acc[Fraction(gamma) % 1] += Fraction(mult)
        self._terms = MappingProxyType({g: c for g, c in sorted(acc.items()) if c != 0})

    @classmethod
    def _from_sorted(cls, terms: dict) -> "GroupRingElement":
        # caller guarantees reduced keys in [0,1), sorted, no zero values
        out = cls.__new__(cls)
        out._terms = MappingProxyType(terms)
        return out

    @property
    def terms(self) -> Mapping[Fraction, Fraction]:
        return self._terms

    def __eq__(self, other):
        if not isinstance(other, GroupRingElement):
            return NotImplemented
        return dict(self._terms) == dict(other._terms)

    def __hash__(self):
        return hash(tuple(self._terms.items()))

    def __add__(self, other: "GroupRingElement") -> "GroupRingElement":
        acc = dict(self._terms)
        for g, c in other._terms.items():
            acc[g] = acc.get(g, 0) + c
        return GroupRingElement(acc)

    def __rmul__(self, scalar) -> "GroupRingElement":
        s = Fraction(scalar)
        return GroupRingElement({g: s * c for g, c in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, GroupRingElement):
            return convolve(self, other)
        return self.__rmul__(other)

    def __repr__(self):
        body = ", ".join(f"{g}↦{c}" for g, c in self._terms.items())
        return f"GroupRingElement({{{body}}})"

    def total_mass(self) -> Fraction:
        return sum(self._terms.values(), Fraction(0))

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self._terms.values())


@lru_cache(maxsize=4096)
def F(n: int) -> GroupRingElement:
    if n < 1:
        raise ValueError(f"F needs n >= 1, got {n}")
    return GroupRingElement({Fraction(a, n): 1 for a in range(1, n + 1) if math.gcd(a, n) == 1})


def convolve(e1: GroupRingElement, e2: GroupRingElement) -> GroupRingElement:
    acc: dict[Fraction, Fraction] = defaultdict(Fraction)
    for g1, c1 in e1.terms.items():
        for g2, c2 in e2.terms.items():
            acc[(g1 + g2) % 1] += c1 * c2
    return GroupRingElement(acc)


def d_prime(m: int, n: int) -> int:
    """Largest divisor of gcd(m, n) coprime to both m/d and n/d."""
    d = math.gcd(m, n)
    other = (m // d) * (n // d)
    result = d
    for q in factorize(d).primes:
        if other % q == 0:
            while result % q == 0:
                result //= q
    return result


def c_coeff(dp: int, e: int) -> Fraction:
    if e < 1 or dp % e:
        raise ValueError(f"{e} does not divide {dp}")
    out = Fraction(1)
    for q in factorize(dp).primes:
        if e % q:
            out *= 1 - Fraction(1, q - 1)
    return out


@dataclass(frozen=True)
class ProductDecomposition:
    """F_m × F_n = Σ coefficient·F_index, with φ(d) folded into the coefficients."""

    m: int
    n: int
    d: int
    d_prime: int
    terms: tuple[tuple[Fraction, int], ...]


@lru_cache(maxsize=1 << 16)
def decompose_product(m: int, n: int) -> ProductDecomposition:
    if m < 1 or n < 1:
        raise ValueError("m and n must be positive")
    d = math.gcd(m, n)
    dp = d_prime(m, n)
    ph = euler_phi(d)
    terms = tuple((ph * c_coeff(dp, e), m * n // (d * e)) for e in divisors(dp))
    return ProductDecomposition(m, n, d, dp, terms)


def expand(dec: ProductDecomposition) -> GroupRingElement:
    """Sum of coefficient·F_index over the decomposition terms."""
    # every index divides K = mn/d, so accumulate integer numerators over K,
    # with coefficients scaled to a common integer denominator
    K = dec.m * dec.n // dec.d
    den = math.lcm(*(Fraction(c).denominator for c, _ in dec.terms))
    acc: dict[int, int] = defaultdict(int)
    for coeff, index in dec.terms:
        w = int(coeff * den)
        if not w:
            continue
        step = K // index
        for a in range(1, index + 1):
            if math.gcd(a, index) == 1:
                acc[(a * step) % K] += w
    terms = {}
    for num in sorted(acc):
        v = acc[num]
        if v % den or v < 0:
            raise ArithmeticError(f"non-integral expansion for ({dec.m}, {dec.n}) at {num}/{K}: {Fraction(v, den)}")
        if v:
            terms[Fraction(num, K)] = Fraction(v // den)
    return GroupRingElement._from_sorted(terms)
