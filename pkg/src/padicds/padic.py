"""Finite unions of equal-radius balls in Z_p, stored as residues mod p^M.

A :class:`PadicSet` at precision M is the union of the balls
{x : x ≡ r (mod p^M)} over its residues r, each of Haar measure p^-M.
Precision 0 has a single residue class, so the full space is ``{0}`` and the
empty set is ``{}`` there.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import Iterable

from .ntheory import CapExceededError, euler_phi, is_prime, p_valuation

MODULUS_CAP = 10**15


class Variant(str, Enum):
    STANDARD = "standard"
    JARNIK_LUTZ = "jarnik_lutz"
    COPRIME_JARNIK_LUTZ = "coprime_jarnik_lutz"


@dataclass(frozen=True)
class PadicSet:
    p: int
    precision: int
    residues: tuple[int, ...]

    def __post_init__(self):
        if self.precision < 0:
            raise ValueError("precision must be non-negative")
        mod = self.p**self.precision
        if any(not 0 <= r < mod for r in self.residues):
            raise ValueError(f"residue outside [0, {mod})")
        if list(self.residues) != sorted(set(self.residues)):
            raise ValueError("residues must be sorted and distinct")

    @classmethod
    def from_residues(cls, p: int, precision: int, residues: Iterable[int]) -> "PadicSet":
        mod = p**precision
        return cls(p, precision, tuple(sorted({r % mod for r in residues})))

    @classmethod
    def full(cls, p: int) -> "PadicSet":
        return cls(p, 0, (0,))

    @classmethod
    def empty(cls, p: int) -> "PadicSet":
        return cls(p, 0, ())

    @property
    def modulus(self) -> int:
        return self.p**self.precision

    @cached_property
    def _lookup(self) -> frozenset[int]:
        return frozenset(self.residues)

    def __bool__(self) -> bool:
        return bool(self.residues)

    def __contains__(self, residue: int) -> bool:
        return residue % self.modulus in self._lookup


@dataclass(frozen=True)
class DigitStream:
    """Truncated p-adic expansion b_0 + b_1 p + ... + b_{M-1} p^{M-1}."""

    p: int
    digits: tuple[int, ...]

    def __post_init__(self):
        if any(not 0 <= b < self.p for b in self.digits):
            raise ValueError(f"digits must lie in [0, {self.p})")

    @classmethod
    def from_int(cls, x: int, p: int, precision: int) -> "DigitStream":
        digits = []
        x %= p**precision
        for _ in range(precision):
            x, b = divmod(x, p)
            digits.append(b)
        return cls(p, tuple(digits))

    @property
    def precision(self) -> int:
        return len(self.digits)

    def value_mod(self, precision: int) -> int:
        if precision > len(self.digits):
            raise ValueError(f"need {precision} digits, stream has {len(self.digits)}")
        v = 0
        for b in reversed(self.digits[:precision]):
            v = v * self.p + b
        return v


def admissible_numerators(n: int) -> list[int]:
    """a with |a| ≤ n and gcd(a, n) = 1; for n = 1 this includes a = 0."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    return [a for a in range(-n, n + 1) if math.gcd(a, n) == 1]


def radius_exponent(radius, p: int) -> int | None:
    """M such that p^-M is the largest power of p not exceeding radius.

    Negative M means a radius above 1; None stands for radius 0.
    """
    r = Fraction(radius)
    if r < 0:
        raise ValueError("radius must be non-negative")
    if r == 0:
        return None
    if r >= 1:
        k = 0
        while p ** (k + 1) <= r:
            k += 1
        return -k
    M = 1
    while Fraction(1, p**M) > r:
        M += 1
    return M


def _ball(num: int, den: int, p: int, M: int) -> int | str | None:
    """Residue of num/den mod p^M, 'full', or None (ball misses Z_p).

    The ball is {x ∈ Z_p : |x − num/den|_p ≤ p^-M}.
    """
    if num == 0:
        return "full" if M <= 0 else 0
    k = p_valuation(den, p) - p_valuation(num, p)
    if k > 0:
        # |num/den|_p = p^k > 1, so every x ∈ Z_p sits at distance p^k
        return "full" if -M >= k else None
    if M <= 0:
        return "full"
    mod = p**M
    vd = p_valuation(den, p)
    u, v = num // p**vd, den // p**vd
    return u * pow(v, -1, mod) % mod


def _points(n: int, variant: Variant) -> list[tuple[int, int]]:
    pts = []
    for a in range(-n, n + 1):
        coprime = math.gcd(a, n) == 1
        if variant is Variant.JARNIK_LUTZ or coprime:
            pts.append((a, n))
            if a != 0:
                pts.append((n, a))
    if variant is Variant.STANDARD:
        pts = [(a, d) for a, d in pts if d == n]
    return pts


def build_E(n: int, p: int, M: int, variant: Variant | str = Variant.STANDARD,
            modulus_cap: int = MODULUS_CAP) -> PadicSet:
    """Union of balls of radius p^-M around the admissible points of height n.

    M may be negative (radius p^|M| > 1); the result is then either empty or
    the full space.
    """
    variant = Variant(variant)
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if M > 0 and p**M > modulus_cap:
        raise CapExceededError(f"p^M = {p}^{M} exceeds the modulus cap {modulus_cap}")
    residues = set()
    for num, den in _points(n, variant):
        r = _ball(num, den, p, M)
        if r == "full":
            return PadicSet.full(p)
        if r is not None:
            residues.add(r)
    if not residues:
        return PadicSet.empty(p)
    return PadicSet(p, M, tuple(sorted(residues)))


def measure(s: PadicSet) -> Fraction:
    return Fraction(len(s.residues), s.modulus)


def intersect(s1: PadicSet, s2: PadicSet) -> PadicSet:
    if s1.p != s2.p:
        raise ValueError(f"mismatched primes {s1.p} and {s2.p}")
    coarse, fine = (s1, s2) if s1.precision <= s2.precision else (s2, s1)
    mod = coarse.modulus
    keep = coarse._lookup
    return PadicSet(fine.p, fine.precision, tuple(c for c in fine.residues if c % mod in keep))


def intersection_measure(s1: PadicSet, s2: PadicSet) -> Fraction:
    return measure(intersect(s1, s2))


def tau_shift(s: PadicSet) -> PadicSet:
    """Image under the digit shift x ↦ (x − b_0)/p + [b_0 ≠ 0]."""
    if s.precision < 1:
        raise ValueError("tau_shift needs precision >= 1")
    p = s.p
    mod = p ** (s.precision - 1)
    return PadicSet.from_residues(p, s.precision - 1, ((r // p + (r % p != 0)) % mod for r in s.residues))


def contains(s: PadicSet, x: DigitStream) -> bool:
    if x.p != s.p:
        raise ValueError(f"stream is {x.p}-adic, set is {s.p}-adic")
    return x.value_mod(s.precision) in s._lookup


def in_E(n: int, p: int, M: int | None, x: int) -> bool:
    """Membership of the integer truncation x (mod p^M or finer) in the standard E_n.

    Equivalent to contains(build_E(n, p, M), x) without materialising the set:
    x ∈ E_n iff some admissible a satisfies a ≡ n·x (mod p^M).
    """
    if M is None:
        return False
    if n % p == 0:
        return M <= -p_valuation(n, p)
    if M <= 0:
        return True
    mod = p**M
    b = n * x % mod
    a = b - ((b + n) // mod) * mod  # smallest representative ≥ -n
    while a <= n:
        if math.gcd(a, n) == 1:
            return True
        a += mod
    return False


def class_count(n: int, p: int, M: int) -> int:
    """Number of distinct residues of the standard E_n at precision M ≥ 0, p ∤ n."""
    adm = admissible_numerators(n)
    if p**M > 2 * n:
        return len(adm)
    mod = p**M
    return len({a % mod for a in adm})


def measure_E(n: int, p: int, M: int | None) -> Fraction:
    """Haar measure of the standard E_n(p^-M) without building the residue set."""
    if M is None:
        return Fraction(0)
    if n % p == 0:
        return Fraction(1 if M <= -p_valuation(n, p) else 0)
    if M <= 0:
        return Fraction(1)
    return Fraction(class_count(n, p, M), p**M)


def brute_force_E(n: int, p: int, M: int, variant: Variant | str = Variant.STANDARD) -> PadicSet:
    """Enumerate every residue x mod p^M and test each point's ball directly.

    For num/den with v_p(den) = 0 this is |x − num/den|_p ≤ p^-M
    ⇔ p^M | (den·x − num). Points outside Z_p never meet a ball of radius ≤ 1.
    """
    variant = Variant(variant)
    mod = p**M
    pts = [(a, d) for a, d in _points(n, variant) if a == 0 or p_valuation(d, p) <= p_valuation(a, p)]
    hits = []
    for x in range(mod):
        for a, d in pts:
            if a == 0:
                ok = x % mod == 0
            else:
                v = p_valuation(d, p)
                ok = ((d // p**v) * x - a // p**v) % mod == 0
            if ok:
                hits.append(x)
                break
    return PadicSet(p, M, tuple(hits))


def formula_measure(n: int, p: int, M: int) -> Fraction:
    """2φ(n)p^-M, valid for n ≥ 2 with p ∤ n and p^M > 2n."""
    return Fraction(2 * euler_phi(n), p**M)
