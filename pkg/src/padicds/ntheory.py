"""Multiplicative functions, divisors and sieves on exact integers."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _kernels

FACTOR_CAP = 10**12
SIEVE_CAP = 10**7


class ModularInverseError(ValueError):
    """Raised when an inverse is requested for a non-unit."""


class CapExceededError(ValueError):
    """Raised when an argument exceeds a configured desk-scale cap."""


def _small_primes(limit: int) -> list[int]:
    flags = bytearray([1]) * (limit + 1)
    flags[0:2] = b"\x00\x00"
    for q in range(2, math.isqrt(limit) + 1):
        if flags[q]:
            flags[q * q :: q] = bytearray(len(range(q * q, limit + 1, q)))
    return [q for q in range(limit + 1) if flags[q]]


_PRIMES = _small_primes(math.isqrt(FACTOR_CAP) + 1)


@dataclass(frozen=True)
class Factorization:
    n: int
    factors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        prod = 1
        last = 1
        for q, e in self.factors:
            if q <= last or e < 1:
                raise ValueError(f"malformed factorization {self.factors}")
            last = q
            prod *= q**e
        if prod != self.n:
            raise ValueError(f"factors multiply to {prod}, not {self.n}")

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(q for q, _ in self.factors)


@lru_cache(maxsize=1 << 16)
def factorize(n: int) -> Factorization:
    """Trial division against a precomputed prime table."""
    if n < 1:
        raise ValueError(f"factorize needs n >= 1, got {n}")
    if n > FACTOR_CAP:
        raise CapExceededError(f"n = {n} exceeds factorization cap {FACTOR_CAP}")
    factors = []
    m = n
    for q in _PRIMES:
        if q * q > m:
            break
        if m % q == 0:
            e = 0
            while m % q == 0:
                m //= q
                e += 1
            factors.append((q, e))
    if m > 1:
        factors.append((m, 1))
    return Factorization(n, tuple(factors))


def is_prime(n: int) -> bool:
    return n >= 2 and factorize(n).factors == ((n, 1),)


def is_squarefree(n: int) -> bool:
    return all(e == 1 for _, e in factorize(n).factors)


def mobius(n: int) -> int:
    f = factorize(n).factors
    if any(e > 1 for _, e in f):
        return 0
    return -1 if len(f) % 2 else 1


def euler_phi(n: int) -> int:
    result = n
    for q, _ in factorize(n).factors:
        result -= result // q
    return result


def omega(n: int) -> int:
    return len(factorize(n).factors)


@lru_cache(maxsize=1 << 14)
def divisors(n: int) -> tuple[int, ...]:
    divs = [1]
    for q, e in factorize(n).factors:
        divs = [d * q**k for d in divs for k in range(e + 1)]
    return tuple(sorted(divs))


def squarefree_divisors(n: int) -> list[tuple[int, int]]:
    """Pairs (d, mobius(d)) over the squarefree divisors of n."""
    out = [(1, 1)]
    for q in factorize(n).primes:
        out += [(d * q, -mu) for d, mu in out]
    return sorted(out)


def p_valuation(x: int, p: int) -> int:
    if x == 0:
        raise ValueError("valuation of 0 is infinite")
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def mod_inverse(a: int, m: int) -> int:
    if m < 1:
        raise ValueError(f"modulus must be positive, got {m}")
    if math.gcd(a, m) != 1:
        raise ModularInverseError(f"{a} is not invertible mod {m}")
    return pow(a, -1, m) if m > 1 else 0


@dataclass(frozen=True)
class SieveTable:
    """phi, mu and omega for 1..N; index 0 is unused padding."""

    N: int
    phi: np.ndarray
    mu: np.ndarray
    omega: np.ndarray

    def __post_init__(self):
        for arr in (self.phi, self.mu, self.omega):
            arr.setflags(write=False)


def totient_sieve(N: int, cap: int = SIEVE_CAP) -> SieveTable:
    if N < 1:
        raise ValueError(f"sieve needs N >= 1, got {N}")
    if N > cap:
        raise CapExceededError(f"sieve size {N} exceeds cap {cap}")
    phi, mu, om = _kernels.sieve(N)
    return SieveTable(N, phi, mu, om)
