"""Quantitative checks: QIA ratios, overlap and counting bounds, sums, hit counts.

Every check returns exact rationals wherever the quantity is rational; the
few floating-point outputs (the phi-sum main term and the Hausdorff doubling
statistic) are flagged as such.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import _kernels, circle, padic
from .ntheory import (
    euler_phi,
    is_prime,
    mod_inverse,
    omega,
    squarefree_divisors,
    totient_sieve,
)
from .circle import PreconditionError
from .padic import DigitStream, admissible_numerators, radius_exponent
from .psi import PsiFunction


@dataclass(frozen=True)
class Space:
    kind: str  # real | padic | product
    p: int | None = None
    ell: int = 0
    primes: tuple[int, ...] = ()

    def __post_init__(self):
        if self.kind not in ("real", "padic", "product"):
            raise ValueError(f"unknown space {self.kind!r}")
        for q in ((self.p,) if self.kind == "padic" else self.primes):
            if q is None or not is_prime(q):
                raise ValueError(f"{q} is not prime")

    @classmethod
    def parse(cls, text: str) -> "Space":
        """'real', 'padic:5' or 'product:ELL:p1,p2,...'."""
        kind, _, rest = text.partition(":")
        if kind == "real":
            return cls("real")
        if kind == "padic":
            return cls("padic", p=int(rest))
        if kind == "product":
            ell, _, ps = rest.partition(":")
            return cls("product", ell=int(ell), primes=tuple(int(q) for q in ps.split(",") if q))
        raise ValueError(f"cannot parse space {text!r}")

    def render(self) -> str:
        if self.kind == "padic":
            return f"padic:{self.p}"
        if self.kind == "product":
            return f"product:{self.ell}:{','.join(map(str, self.primes))}"
        return "real"


@dataclass
class BoundCheck:
    name: str
    params: dict
    lhs: Fraction
    rhs: Fraction
    holds: bool
    detail: dict = field(default_factory=dict)


@dataclass
class QiaReport:
    space: Space
    N: int
    method: str
    sum_measures: Fraction
    sum_pair_measures: Fraction
    ratio: Fraction
    flagged: bool
    running_max: Fraction
    series: list[tuple[int, Fraction, Fraction, Fraction]] = field(default_factory=list)


@dataclass
class HitCount:
    x: DigitStream
    N: int
    M: int


# ---------------------------------------------------------------- QIA


class _RealOracle:
    def __init__(self, psi, N):
        self.sets = [None] + [circle.build_A(n, psi(n)) for n in range(1, N + 1)]

    def measure(self, n):
        return circle.measure(self.sets[n])

    def overlap(self, m, n):
        return circle.intersection_measure(self.sets[m], self.sets[n])


class _RealFast:
    def __init__(self, psi, N):
        self.r = [None] + [psi(n) for n in range(1, N + 1)]
        for n in range(1, N + 1):
            if self.r[n] >= Fraction(1, 2 * n):
                raise PreconditionError(
                    f"fast path needs psi(n) < 1/(2n); psi({n}) = {self.r[n]}"
                )

    def measure(self, n):
        return circle.disjoint_measure(n, self.r[n])

    def overlap(self, m, n):
        if not self.r[m] or not self.r[n]:
            return Fraction(0)
        return circle.overlap_measure_fast(m, n, self.r[m], self.r[n])


class _Padic:
    def __init__(self, psi, N, p):
        self.sets = [None]
        for n in range(1, N + 1):
            M = radius_exponent(psi(n), p)
            self.sets.append(padic.PadicSet.empty(p) if M is None else padic.build_E(n, p, M))

    def measure(self, n):
        return padic.measure(self.sets[n])

    def overlap(self, m, n):
        return padic.intersection_measure(self.sets[m], self.sets[n])


class _Product:
    def __init__(self, psi, N, ell, primes):
        self.ell = ell
        self.real = _RealOracle(psi, N) if ell else None
        self.factors = [_Padic(psi, N, q) for q in primes]

    def measure(self, n):
        out = self.real.measure(n) ** self.ell if self.ell else Fraction(1)
        for f in self.factors:
            out *= f.measure(n)
        return out

    def overlap(self, m, n):
        out = self.real.overlap(m, n) ** self.ell if self.ell else Fraction(1)
        for f in self.factors:
            if not out:
                break
            out *= f.overlap(m, n)
        return out


def _model(space: Space, psi, N: int, method: str):
    if method == "fast":
        if space.kind != "real":
            raise PreconditionError("the fast path exists only for the real space")
        return _RealFast(psi, N)
    if method != "oracle":
        raise ValueError(f"unknown method {method!r}")
    if space.kind == "real":
        return _RealOracle(psi, N)
    if space.kind == "padic":
        return _Padic(psi, N, space.p)
    return _Product(psi, N, space.ell, space.primes)


def qia_ratio(space: Space, psi: PsiFunction, N: int, method: str = "oracle",
              threads: int = 1, keep_series: bool = False) -> QiaReport:
    """Finite-N quasi-independence ratio (Σ μ(E_n))² / Σ_{m,n≤N} μ(E_m ∩ E_n).

    The pair sum runs over ordered pairs including the diagonal. Off-diagonal
    work is split by column n and summed in column order, so the result does
    not depend on `threads`.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    model = _model(space, psi, N, method)
    measures = [None] + [model.measure(n) for n in range(1, N + 1)]
    support = [n for n in range(1, N + 1) if measures[n]]

    def column(n: int) -> Fraction:
        if not measures[n]:
            return Fraction(0)
        return sum((model.overlap(m, n) for m in support if m < n), Fraction(0))

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            cols = list(pool.map(column, range(1, N + 1), chunksize=max(1, N // (8 * threads))))
    else:
        cols = [column(n) for n in range(1, N + 1)]

    S = P = Fraction(0)
    best = Fraction(0)
    series = []
    for n in range(1, N + 1):
        S += measures[n]
        P += measures[n] + 2 * cols[n - 1]
        ratio = S * S / P if P else Fraction(0)
        best = max(best, ratio)
        if keep_series:
            series.append((n, S, P, ratio))
    return QiaReport(space, N, method, S, P, ratio, P == 0, best, series)


# ---------------------------------------------------------------- counting


def coprime_count(n: int, modulus: int, b: int, method: str = "formula") -> int:
    """#{a : |a| ≤ n, gcd(a, n) = 1, a ≡ b (mod modulus)}."""
    if n < 1 or modulus < 1:
        raise ValueError("n and modulus must be positive")
    if method == "brute":
        return sum(1 for a in admissible_numerators(n) if (a - b) % modulus == 0)
    if method != "formula":
        raise ValueError(f"unknown method {method!r}")
    return sum(mu * cnt for _, mu, cnt in _mobius_terms(n, modulus, b))


def _count_in_class(L: int, c: int, q: int) -> int:
    # ℓ ∈ [-L, L] with ℓ ≡ c (mod q)
    return (L - c) // q - (-L - 1 - c) // q


def _mobius_terms(n: int, modulus: int, b: int) -> list[tuple[int, int, int]]:
    """(d, μ(d), #{ℓ : |ℓ| ≤ n/d, dℓ ≡ b mod modulus}) over squarefree d | n."""
    out = []
    for d, mu in squarefree_divisors(n):
        g = math.gcd(d, modulus)
        if b % g:
            out.append((d, mu, 0))
            continue
        q = modulus // g
        c = (b // g) * mod_inverse(d // g, q) % q if q > 1 else 0
        out.append((d, mu, _count_in_class(n // d, c, q)))
    return out


def class_counts(n: int, modulus: int, method: str = "formula") -> np.ndarray:
    """coprime_count(n, modulus, b) for every b in [0, modulus), via the kernel layer."""
    return class_counts_range(n, modulus, modulus, method)[modulus]


def class_counts_range(n: int, q_lo: int, q_hi: int, method: str = "formula") -> dict[int, np.ndarray]:
    if method == "brute":
        flat = _kernels.residue_histograms(admissible_numerators(n), q_lo, q_hi)
    elif method == "formula":
        ds, mus = zip(*squarefree_divisors(n))
        flat = _kernels.mobius_class_counts(n, ds, mus, q_lo, q_hi)
    else:
        raise ValueError(f"unknown method {method!r}")
    return _kernels.split_histograms(flat, q_lo, q_hi)


def surjectivity_check(n: int, p: int, M: int) -> BoundCheck:
    """Every class mod p^M meets the admissible numerators, under p^-M > 4^ω(n)/n."""
    if n % p == 0:
        raise PreconditionError(f"{p} divides {n}")
    if M < 0 or not Fraction(1, p**M) > Fraction(4 ** omega(n), n):
        raise PreconditionError(f"p^-M = {p}^-{M} does not exceed 4^omega(n)/n for n = {n}")
    counts = class_counts(n, p**M, "brute")
    smallest = int(counts.min())
    return BoundCheck("surjectivity", {"n": n, "p": p, "M": M},
                      Fraction(1), Fraction(smallest), smallest >= 1)


def a_correction(n: int, p: int, M: int) -> int:
    """Σ over classes mod p^M of max(0, (#admissible a in the class) − 1)."""
    if n < 2 or n % p == 0 or M < 0:
        raise PreconditionError("a_correction needs n >= 2, p ∤ n, M >= 0")
    mod = p**M
    hist: dict[int, int] = {}
    for a in admissible_numerators(n):
        hist[a % mod] = hist.get(a % mod, 0) + 1
    return sum(c - 1 for c in hist.values() if c > 1)


def a_correction_bound_check(n: int, p: int, M: int) -> BoundCheck:
    if n < 2 or n % p == 0:
        raise PreconditionError("needs n >= 2 and p ∤ n")
    if M < 0 or Fraction(1, p**M) < Fraction(1, 2 * n):
        raise PreconditionError("needs 1/(2n) <= p^-M <= 1")
    lhs = Fraction(a_correction(n, p, M))
    rhs = Fraction(12 * euler_phi(n) ** 2, p**M)
    return BoundCheck("a_correction_bound", {"n": n, "p": p, "M": M}, lhs, rhs, lhs < rhs)


# ---------------------------------------------------------------- overlaps


def _overlap_pre(m, n, p, M_m, M_n):
    if m % p == 0 or n % p == 0:
        raise PreconditionError(f"{p} divides m = {m} or n = {n}")
    if not (p**M_m > 4 * m and p**M_n > 4 * n):
        raise PreconditionError("needs p^-M_m < 1/(4m) and p^-M_n < 1/(4n)")


def _padic_pair(m, n, p, M_m, M_n) -> Fraction:
    return padic.measure(padic.intersect(padic.build_E(m, p, M_m), padic.build_E(n, p, M_n)))


def sandwich_check(m: int, n: int, p: int, M_m: int, M_n: int) -> BoundCheck:
    """λ(A_m(ψ/2) ∩ A_n(ψ/2)) ≤ μ_p(E_m ∩ E_n) ≤ (3/2)·λ(A_m(2ψ) ∩ A_n(2ψ)) with ψ = p^-M."""
    _overlap_pre(m, n, p, M_m, M_n)
    rm, rn = Fraction(1, p**M_m), Fraction(1, p**M_n)
    lower = circle.measure(circle.intersect(circle.build_A(m, rm / 2), circle.build_A(n, rn / 2)))
    upper = Fraction(3, 2) * circle.measure(circle.intersect(circle.build_A(m, 2 * rm), circle.build_A(n, 2 * rn)))
    middle = _padic_pair(m, n, p, M_m, M_n)
    return BoundCheck("sandwich", {"m": m, "n": n, "p": p, "M_m": M_m, "M_n": M_n},
                      middle, upper, lower <= middle <= upper, {"lower": lower})


def product_bound_check(m: int, n: int, p: int, M_m: int, M_n: int) -> BoundCheck:
    """μ_p(E_m ∩ E_n) ≤ 6·m·n·ψ(m)·ψ(n) with ψ = p^-M."""
    _overlap_pre(m, n, p, M_m, M_n)
    lhs = _padic_pair(m, n, p, M_m, M_n)
    rhs = Fraction(6 * m * n, p ** (M_m + M_n))
    return BoundCheck("product_bound", {"m": m, "n": n, "p": p, "M_m": M_m, "M_n": M_n},
                      lhs, rhs, lhs <= rhs)


def minimal_precision(p: int, bound: int) -> int:
    """Smallest M with p^M > bound."""
    M = 0
    while p**M <= bound:
        M += 1
    return M


# ---------------------------------------------------------------- sums


@dataclass
class PhiSum:
    p: int
    N: int
    total: int
    main_term: float
    abs_error: float

    @property
    def rel_error(self) -> float:
        return self.abs_error / self.main_term


def phi_sum_asymptotic(p: int, N: int) -> PhiSum:
    """Σ_{n ≤ N, p ∤ n} φ(n) against 3pN²/((p+1)π²); the main term is a float."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    phi = totient_sieve(N).phi
    mask = np.arange(N + 1) % p != 0
    mask[0] = False
    total = int(phi[mask].sum())
    main = 3 * p * N * N / ((p + 1) * math.pi**2)
    return PhiSum(p, N, total, main, abs(total - main))


def product_space_measure(ell: int, primes: Sequence[int], n: int, psi: PsiFunction) -> Fraction:
    """λ(A_n)^ℓ · Π μ_{p_i}(E_n) with ψ(n) rounded down to a power of each p_i."""
    if ell < 0:
        raise ValueError("ell must be non-negative")
    r = psi(n)
    out = circle.measure(circle.build_A(n, r)) ** ell
    for q in primes:
        out *= padic.measure_E(n, q, radius_exponent(r, q))
    return out


def _iroot(x: int, k: int) -> int | None:
    """Exact integer k-th root of x >= 0, or None."""
    if x < 2:
        return x
    r = int(round(x ** (1.0 / k)))
    for cand in (r - 1, r, r + 1):
        if cand >= 0 and cand**k == x:
            return cand
    # float estimate too coarse for huge x; Newton refine
    lo, hi = 0, 1 << (x.bit_length() // k + 1)
    while lo < hi:
        mid = (lo + hi) // 2
        if mid**k < x:
            lo = mid + 1
        else:
            hi = mid
    return lo if lo**k == x else None


@dataclass(frozen=True)
class DimensionFunction:
    """f(r) = r^s, optionally divided by the surrogate ⌊log2(1/r)⌋ + 1."""

    s: Fraction
    log: bool = False

    @classmethod
    def parse(cls, text: str) -> "DimensionFunction":
        kind, _, arg = text.partition(":")
        if kind not in ("power", "powerlog"):
            raise ValueError(f"unknown dimension function {text!r}")
        s = Fraction(arg)
        if s <= 0:
            raise ValueError("exponent must be positive")
        return cls(s, kind == "powerlog")

    def render(self) -> str:
        return f"{'powerlog' if self.log else 'power'}:{self.s}"

    def __call__(self, r: Fraction) -> tuple[Fraction | float, bool]:
        """(value, exact)."""
        if r == 0:
            return Fraction(0), True
        u, v = self.s.numerator, self.s.denominator
        a, b = _iroot(r.numerator, v), _iroot(r.denominator, v)
        if a is not None and b is not None:
            val: Fraction | float = Fraction(a, b) ** u
            exact = True
        else:
            val = float(r) ** float(self.s)
            exact = False
        if self.log and r < 1:
            val = val / ((r.denominator // r.numerator).bit_length())
        return val, exact


@dataclass
class HausdorffReport:
    f: DimensionFunction
    dim: int
    N: int
    partial_sums: list[float]
    exact_total: Fraction | None
    exact_terms: bool
    doubling_ratio: float
    classification: str


DIVERGENT_RATIO = 1.05
CONVERGENT_RATIO = 1.005
EXACT_SUM_CAP = 2000


def hausdorff_partial_sums(f: DimensionFunction, psi: PsiFunction, dim: int, N: int) -> HausdorffReport:
    """Partial sums of f(ψ(n))·φ(n)^dim and a doubling-ratio trend label.

    The label is a heuristic: ratio S(N)/S(N//2) ≥ 1.05 reads as a divergent
    trend, ≤ 1.005 as convergent, anything between as inconclusive.
    """
    if N < 2:
        raise ValueError("need N >= 2 for the doubling test")
    phi = totient_sieve(N).phi
    sums = []
    running = 0.0
    exact_total = Fraction(0) if N <= EXACT_SUM_CAP else None
    all_exact = True
    for n in range(1, N + 1):
        val, exact = f(psi(n))
        all_exact &= exact
        term = val * int(phi[n]) ** dim
        if exact_total is not None and exact:
            exact_total += term
        running += float(term)
        sums.append(running)
    if not all_exact:
        exact_total = None
    top, half = sums[-1], sums[N // 2 - 1]
    ratio = top / half if half else (1.0 if top == 0 else math.inf)
    if ratio >= DIVERGENT_RATIO:
        label = "divergent-trend"
    elif ratio <= CONVERGENT_RATIO:
        label = "convergent-trend"
    else:
        label = "inconclusive"
    return HausdorffReport(f, dim, N, sums, exact_total, all_exact, ratio, label)


# ---------------------------------------------------------------- hits


def random_digit_stream(p: int, precision: int, rng: np.random.Generator) -> DigitStream:
    return DigitStream(p, tuple(int(b) for b in rng.integers(0, p, size=precision)))


def hit_precisions(psi: PsiFunction, p: int, N: int) -> list[int | None]:
    return [radius_exponent(psi(n), p) for n in range(1, N + 1)]


def hit_count(psi: PsiFunction, p: int, N: int, x: DigitStream,
              precisions: Sequence[int | None] | None = None) -> HitCount:
    """M(N, x) = #{n ≤ N : x ∈ E_n(ψ)} with ψ(n) rounded down to a power of p."""
    Ms = list(precisions) if precisions is not None else hit_precisions(psi, p, N)
    deepest = max((M for M in Ms if M is not None), default=0)
    if x.precision < deepest:
        raise ValueError(f"stream has {x.precision} digits, radius needs {deepest}")
    xv = x.value_mod(max(deepest, 0))
    hits = sum(1 for n, M in enumerate(Ms, 1) if padic.in_E(n, p, M, xv))
    return HitCount(x, N, hits)


@dataclass
class HitStatistics:
    p: int
    N: int
    seed: int
    counts: list[int]
    expected: Fraction

    @property
    def mean(self) -> float:
        return sum(self.counts) / len(self.counts)

    @property
    def tolerance(self) -> float:
        return 3 * math.sqrt(self.expected)

    @property
    def within_tolerance(self) -> bool:
        return abs(self.mean - float(self.expected)) <= self.tolerance


def hit_statistics(psi: PsiFunction, p: int, N: int, samples: int, seed: int) -> HitStatistics:
    """Seeded i.i.d. uniform digit streams (numpy PCG64) and their hit counts."""
    Ms = hit_precisions(psi, p, N)
    deepest = max((M for M in Ms if M is not None), default=0)
    expected = sum((padic.measure_E(n, p, M) for n, M in enumerate(Ms, 1)), Fraction(0))
    rng = np.random.Generator(np.random.PCG64(seed))
    counts = []
    for _ in range(samples):
        x = random_digit_stream(p, max(deepest, 0), rng)
        counts.append(hit_count(psi, p, N, x, Ms).M)
    return HitStatistics(p, N, seed, counts, expected)


# ---------------------------------------------------------------- zero-one


def zero_one_example_check(p: int, n: int) -> BoundCheck:
    """E''_n for ψ = 1/p on multiples of p is exactly the ball p·Z_p."""
    if n % p:
        raise PreconditionError(f"{p} does not divide {n}")
    s = padic.build_E(n, p, 1, padic.Variant.COPRIME_JARNIK_LUTZ)
    target = padic.PadicSet(p, 1, (0,))
    return BoundCheck("zero_one", {"p": p, "n": n}, padic.measure(s), Fraction(1, p), s == target)
