import math

import pytest
from hypothesis import given, strategies as st

from padicds.ntheory import (
    CapExceededError,
    Factorization,
    ModularInverseError,
    divisors,
    euler_phi,
    factorize,
    is_prime,
    mobius,
    mod_inverse,
    omega,
    p_valuation,
    squarefree_divisors,
    totient_sieve,
)

from oracles import phi as brute_phi


@pytest.mark.parametrize("n, expected", [(1, ()), (12, ((2, 2), (3, 1))), (97, ((97, 1),))])
def test_factorize_examples(n, expected):
    assert factorize(n).factors == expected


def test_factorize_rejects_bad_input():
    with pytest.raises(ValueError):
        factorize(0)
    with pytest.raises(CapExceededError):
        factorize(10**12 + 1)
    with pytest.raises(ValueError):
        Factorization(12, ((3, 1), (2, 2)))


@pytest.mark.parametrize("n, mu", [(1, 1), (4, 0), (6, 1), (30, -1), (97, -1)])
def test_mobius(n, mu):
    assert mobius(n) == mu


@pytest.mark.parametrize("n, ph", [(1, 1), (12, 4), (97, 96)])
def test_euler_phi(n, ph):
    assert euler_phi(n) == ph


@pytest.mark.parametrize("n, w", [(1, 0), (12, 2), (30, 3)])
def test_omega(n, w):
    assert omega(n) == w


@pytest.mark.parametrize("n, ds", [(1, (1,)), (6, (1, 2, 3, 6)), (8, (1, 2, 4, 8))])
def test_divisors(n, ds):
    assert tuple(divisors(n)) == ds


def test_mod_inverse():
    assert mod_inverse(1, 5) == 1
    assert mod_inverse(3, 25) == 17
    assert mod_inverse(-3, 25) == 8
    with pytest.raises(ModularInverseError):
        mod_inverse(2, 4)


def test_p_valuation():
    assert p_valuation(48, 2) == 4
    assert p_valuation(-45, 3) == 2
    assert p_valuation(7, 5) == 0


def test_sieve_examples():
    assert list(totient_sieve(1).phi[1:]) == [1]
    t = totient_sieve(10)
    assert list(totient_sieve(6).phi[1:]) == [1, 1, 2, 2, 4, 2]
    assert t.mu[10] == 1
    with pytest.raises(CapExceededError):
        totient_sieve(11, cap=10)


def test_sieve_matches_pointwise():
    t = totient_sieve(3000)
    for n in range(1, 3001):
        assert (t.phi[n], t.mu[n], t.omega[n]) == (euler_phi(n), mobius(n), omega(n))


def test_sieve_is_read_only():
    t = totient_sieve(10)
    with pytest.raises(ValueError):
        t.phi[3] = 0


@given(st.integers(1, 10**9))
def test_factorization_reassembles(n):
    f = factorize(n)
    assert math.prod(q**e for q, e in f.factors) == n
    assert all(is_prime(q) for q in f.primes)
    assert list(f.primes) == sorted(set(f.primes))


@given(st.integers(1, 400))
def test_phi_against_gcd_count(n):
    assert euler_phi(n) == brute_phi(n)


@given(st.integers(1, 5000))
def test_mobius_divisor_sum_is_delta(n):
    assert sum(mobius(d) for d in divisors(n)) == (1 if n == 1 else 0)
    assert sum(mu for _, mu in squarefree_divisors(n)) == (1 if n == 1 else 0)


@given(st.integers(1, 5000))
def test_gauss_phi_divisor_sum(n):
    assert sum(euler_phi(d) for d in divisors(n)) == n


@given(st.integers(-10**6, 10**6), st.integers(1, 10**6))
def test_mod_inverse_property(a, m):
    if math.gcd(a, m) != 1:
        with pytest.raises(ModularInverseError):
            mod_inverse(a, m)
    else:
        x = mod_inverse(a, m)
        assert 0 <= x < m and (a * x - 1) % m == 0
