from fractions import Fraction as Fr

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from padicds import analysis as A
from padicds import circle, padic
from padicds.circle import PreconditionError
from padicds.ntheory import euler_phi, omega
from padicds.psi import Predicate, parse_psi, power_law, zero

from oracles import coprime_count as brute_count
from oracles import padic_E, phi_sum

REAL = A.Space("real")


# ---- QIA


def test_qia_single_set():
    r = A.qia_ratio(REAL, parse_psi("indicator:1/4,le:1"), 6)
    assert (r.sum_measures, r.sum_pair_measures, r.ratio) == (Fr(1, 2), Fr(1, 2), Fr(1, 2))
    assert not r.flagged


def test_qia_zero_psi_is_flagged():
    r = A.qia_ratio(REAL, zero(), 10)
    assert r.ratio == 0 and r.flagged


def test_qia_fast_matches_oracle_at_100():
    psi = power_law(Fr(1, 4), 2)
    a = A.qia_ratio(REAL, psi, 100)
    b = A.qia_ratio(REAL, psi, 100, "fast")
    assert (a.sum_measures, a.sum_pair_measures, a.ratio) == (b.sum_measures, b.sum_pair_measures, b.ratio)


def test_qia_small_case_by_hand():
    # ψ(n) = 1/(4n²), N = 2: A_1 = [-1/4, 1/4], A_2 = [1/2 - 1/16, 1/2 + 1/16]; disjoint
    r = A.qia_ratio(REAL, power_law(Fr(1, 4), 2), 2)
    assert r.sum_measures == Fr(1, 2) + Fr(1, 8)
    assert r.sum_pair_measures == Fr(1, 2) + Fr(1, 8)
    assert r.ratio == Fr(5, 8)


def test_qia_fast_rejects_large_psi():
    with pytest.raises(PreconditionError):
        A.qia_ratio(REAL, power_law(1, 1), 5, "fast")
    with pytest.raises(PreconditionError):
        A.qia_ratio(A.Space("padic", p=3), power_law(1, 3), 5, "fast")


def test_qia_padic_and_product_spaces():
    psi = power_law(1, 2)
    pad = A.qia_ratio(A.Space("padic", p=3), psi, 20)
    assert pad.sum_measures == sum(padic.measure_E(n, 3, padic.radius_exponent(psi(n), 3)) for n in range(1, 21))
    prod = A.qia_ratio(A.Space("product", ell=0, primes=(3,)), psi, 20)
    assert prod.ratio == pad.ratio
    both = A.qia_ratio(A.Space("product", ell=1, primes=(3,)), psi, 12)
    assert both.sum_measures == sum(A.product_space_measure(1, [3], n, psi) for n in range(1, 13))


def test_space_parse():
    assert A.Space.parse("padic:5") == A.Space("padic", p=5)
    assert A.Space.parse("product:2:3,3,5").primes == (3, 3, 5)
    assert A.Space.parse("product:2:3,5").render() == "product:2:3,5"
    with pytest.raises(ValueError):
        A.Space.parse("padic:6")


@given(st.integers(1, 40), st.sampled_from(["power:1/4,2", "power:1/4,2;restrict:squarefree", "power:1,3;round:2;scale:1/4", "log:1/4"]),
       st.integers(2, 4))
def test_qia_threads_do_not_change_result(N, spec, threads):
    psi = parse_psi(spec)
    a = A.qia_ratio(REAL, psi, N, keep_series=True)
    b = A.qia_ratio(REAL, psi, N, threads=threads, keep_series=True)
    assert a.series == b.series
    f = A.qia_ratio(REAL, psi, N, "fast", threads=threads)
    assert f.ratio == a.ratio


@given(st.integers(1, 30), st.sampled_from(["power:1/4,2", "power:1,1", "zero-one:2", "log:1"]))
def test_qia_report_invariants(N, spec):
    psi = parse_psi(spec)
    r = A.qia_ratio(REAL, psi, N, keep_series=True)
    squares = sum(circle.measure(circle.build_A(n, psi(n))) ** 2 for n in range(1, N + 1))
    assert r.sum_pair_measures >= squares
    assert (r.ratio > 0) == (r.sum_measures > 0)
    assert r.running_max == max(row[3] for row in r.series)


# ---- counting


@pytest.mark.parametrize("args, expected", [((5, 4, 1), 2), ((1, 1, 0), 3), ((6, 1, 0), 4)])
def test_coprime_count_examples(args, expected):
    assert A.coprime_count(*args) == A.coprime_count(*args, method="brute") == expected


@given(st.integers(1, 300), st.integers(1, 1200), st.integers(-2000, 2000))
def test_coprime_formula_matches_brute(n, q, b):
    assert A.coprime_count(n, q, b) == brute_count(n, q, b)


@given(st.integers(1, 120), st.data())
def test_class_counts_match(n, data):
    q = data.draw(st.integers(1, 4 * n))
    f, b = A.class_counts(n, q), A.class_counts(n, q, "brute")
    assert np.array_equal(f, b)
    assert list(b) == [brute_count(n, q, r) for r in range(q)]


@given(st.integers(1, 500), st.sampled_from([2, 3, 5, 7]), st.integers(0, 6), st.integers(0, 10**6))
def test_floor_count_error_terms_are_bounded(n, p, M, b):
    # #{ℓ : |ℓ| ≤ n/d, dℓ ≡ b} = 2n/(d p^M) + k_d with |k_d| ≤ 2 when p ∤ d
    assume(n % p)
    q = p**M
    for d, _, cnt in A._mobius_terms(n, q, b % q):
        assert abs(cnt - Fr(2 * (n // d), q)) <= 2


def test_surjectivity_preconditions():
    for args in [(3, 5, 1), (15, 2, 1), (105, 2, 5)]:
        with pytest.raises(PreconditionError):
            A.surjectivity_check(*args)
    assert A.surjectivity_check(5, 2, 0).holds
    assert A.surjectivity_check(97, 2, 4).holds


@given(st.integers(2, 400), st.sampled_from([2, 3, 5, 7]))
def test_surjectivity_whenever_allowed(n, p):
    assume(n % p)
    M = 0
    while Fr(1, p**M) > Fr(4 ** omega(n), n):
        assert A.surjectivity_check(n, p, M).holds
        M += 1


def test_a_correction_examples():
    assert A.a_correction(3, 5, 1) == 0
    assert A.a_correction(5, 3, 1) == 5
    assert A.a_correction(10, 7, 2) == 0  # 49 > 20
    chk = A.a_correction_bound_check(5, 3, 1)
    assert (chk.lhs, chk.rhs, chk.holds) == (5, 64, True)
    chk = A.a_correction_bound_check(3, 5, 1)
    assert (chk.lhs, chk.rhs, chk.holds) == (0, Fr(48, 5), True)
    chk = A.a_correction_bound_check(7, 2, 2)
    assert (chk.lhs, chk.rhs, chk.holds) == (8, 108, True)
    with pytest.raises(PreconditionError):
        A.a_correction_bound_check(3, 5, 2)


@given(st.integers(2, 200), st.sampled_from([2, 3, 5]), st.integers(0, 5))
def test_correction_term_measure_identity(n, p, M):
    assume(n % p)
    mu = padic.measure(padic.build_E(n, p, M))
    assert mu == Fr(2 * euler_phi(n) - A.a_correction(n, p, M), p**M)
    assert mu == Fr(len(padic_E(n, p, M)), p**M)


# ---- overlaps


def test_sandwich_examples():
    assert A.sandwich_check(2, 3, 5, 2, 2).holds
    assert A.sandwich_check(6, 10, 7, 3, 3).holds
    chk = A.sandwich_check(7, 7, 5, 3, 3)
    assert chk.lhs == Fr(12, 125) and chk.detail["lower"] == Fr(6, 125)


def test_product_bound_examples():
    assert A.product_bound_check(2, 3, 5, 2, 2).holds
    assert A.product_bound_check(3, 5, 2, 5, 5).holds
    # 2^-4 < 1/20 fails, so this configuration is outside the bound's hypotheses
    with pytest.raises(PreconditionError):
        A.product_bound_check(3, 5, 2, 4, 4)


def test_product_bound_fails_on_diagonal():
    # E_1 has three disjoint balls: 3·2^-3 > 6·1·1·2^-6
    chk = A.product_bound_check(1, 1, 2, 3, 3)
    assert (chk.lhs, chk.rhs, chk.holds) == (Fr(3, 8), Fr(3, 32), False)


def test_overlap_preconditions():
    with pytest.raises(PreconditionError):
        A.sandwich_check(3, 4, 3, 3, 3)
    with pytest.raises(PreconditionError):
        A.sandwich_check(2, 3, 5, 1, 2)


@given(st.integers(1, 25), st.integers(1, 25), st.sampled_from([2, 3, 5, 7]), st.integers(0, 1), st.integers(0, 1))
def test_overlap_bounds_off_diagonal(m, n, p, extra_m, extra_n):
    assume(m % p and n % p and m != n)
    M_m = A.minimal_precision(p, 4 * m) + extra_m
    M_n = A.minimal_precision(p, 4 * n) + extra_n
    assert A.sandwich_check(m, n, p, M_m, M_n).holds
    assert A.product_bound_check(m, n, p, M_m, M_n).holds


# ---- sums and product space


def test_phi_sum_examples():
    assert A.phi_sum_asymptotic(2, 1).total == 1
    assert A.phi_sum_asymptotic(2, 10).total == 19
    r = A.phi_sum_asymptotic(2, 10**5)
    assert r.abs_error <= 2 * 10**5 * np.log(10**5)


@given(st.integers(1, 400), st.sampled_from([2, 3, 5, 7]))
def test_phi_sum_matches_direct(N, p):
    assert A.phi_sum_asymptotic(p, N).total == phi_sum(N, p)


def test_product_space_examples():
    assert A.product_space_measure(1, [3], 2, parse_psi("indicator:1/9,le:9")) == Fr(4, 81)
    assert A.product_space_measure(0, [5], 3, parse_psi("indicator:1/25,le:9")) == Fr(4, 25)
    assert A.product_space_measure(2, [2, 3], 4, zero()) == 0


@given(st.integers(0, 2), st.lists(st.sampled_from([2, 3, 5]), max_size=3), st.integers(1, 40), st.randoms())
def test_product_space_is_permutation_invariant(ell, primes, n, rnd):
    psi = power_law(1, 2)
    shuffled = list(primes)
    rnd.shuffle(shuffled)
    assert A.product_space_measure(ell, primes, n, psi) == A.product_space_measure(ell, shuffled, n, psi)


def test_hausdorff_examples():
    r = A.hausdorff_partial_sums(A.DimensionFunction(Fr(1)), power_law(1, 2), 1, 10**5)
    assert r.classification == "divergent-trend"
    r = A.hausdorff_partial_sums(A.DimensionFunction(Fr(1)), zero(), 1, 100)
    assert r.classification == "convergent-trend" and r.exact_total == 0
    r = A.hausdorff_partial_sums(A.DimensionFunction(Fr(2)), power_law(1, 2), 1, 2000)
    assert r.classification == "convergent-trend" and r.exact_terms


def test_hausdorff_exact_and_float_paths():
    f = A.DimensionFunction(Fr(1, 2))
    assert f(Fr(1, 9)) == (Fr(1, 3), True)
    val, exact = f(Fr(1, 2))
    assert not exact and abs(val - 2**-0.5) < 1e-15
    g = A.DimensionFunction.parse("powerlog:1")
    assert g(Fr(1, 8)) == (Fr(1, 32), True)
    r = A.hausdorff_partial_sums(f, power_law(1, 1), 1, 50)
    assert not r.exact_terms and r.exact_total is None


def test_hausdorff_small_exact_total():
    r = A.hausdorff_partial_sums(A.DimensionFunction(Fr(1)), power_law(1, 2), 1, 4)
    assert r.exact_total == 1 + Fr(1, 4) + Fr(2, 9) + Fr(2, 16)


# ---- hits


def test_hit_count_examples():
    x = padic.DigitStream.from_int(12345, 3, 20)
    assert A.hit_count(zero(), 3, 50, x).M == 0
    big = parse_psi("indicator:1,le:1000")
    assert A.hit_count(big, 3, 30, x).M == sum(1 for n in range(1, 31) if n % 3)
    with pytest.raises(ValueError):
        A.hit_count(power_law(1, 2), 3, 100, padic.DigitStream.from_int(1, 3, 3))


@given(st.integers(0, 3**12 - 1), st.integers(1, 60))
def test_hit_count_matches_set_membership(x, N):
    psi = power_law(1, 2)
    stream = padic.DigitStream.from_int(x, 3, 12)
    expected = 0
    for n in range(1, N + 1):
        M = padic.radius_exponent(psi(n), 3)
        expected += padic.contains(padic.build_E(n, 3, M), stream) if padic.build_E(n, 3, M) else 0
    h = A.hit_count(psi, 3, N, stream)
    assert h.M == expected and 0 <= h.M <= N


def test_hit_statistics_are_deterministic():
    psi = power_law(1, 2)
    a = A.hit_statistics(psi, 3, 200, 8, seed=11)
    b = A.hit_statistics(psi, 3, 200, 8, seed=11)
    c = A.hit_statistics(psi, 3, 200, 8, seed=12)
    assert a.counts == b.counts and a.counts != c.counts


# ---- zero-one


@pytest.mark.parametrize("p, n, mu", [(3, 6, Fr(1, 3)), (2, 2, Fr(1, 2)), (5, 35, Fr(1, 5))])
def test_zero_one_examples(p, n, mu):
    chk = A.zero_one_example_check(p, n)
    assert chk.holds and chk.lhs == mu


def test_zero_one_rejects_non_multiple():
    with pytest.raises(PreconditionError):
        A.zero_one_example_check(3, 7)
