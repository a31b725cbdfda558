import math
import random

import pytest
from hypothesis import given, strategies as st

from cmweil import arith


def naive_is_prime(n):
    return n >= 2 and all(n % d for d in range(2, math.isqrt(n) + 1))


def test_small_primality_matches_trial_division():
    assert [n for n in range(2000) if arith.is_prime(n)] == [n for n in range(2000) if naive_is_prime(n)]


@pytest.mark.parametrize("n", [2**160 + 685, 2**160 - 1445, 2**180 - 7427, 2023621, 2**127 - 1])
def test_known_primes(n):
    assert arith.is_prime(n)


@pytest.mark.parametrize("n", [561, 3215031751, 2**64 + 1, 3825123056546413051, (2**89 - 1) * (2**61 - 1)])
def test_known_composites(n):
    # includes Carmichael numbers and strong pseudoprimes to small bases
    assert not arith.is_prime(n)


def test_factorize_frozen_values():
    # sympy.factorint oracle
    assert arith.factorize(4092747290896) == {2: 4, 11: 3, 41: 1, 1021: 1, 4591: 1}
    assert arith.factorize(778417333) == {29: 1, 5153: 1, 5209: 1}
    assert arith.factorize(2**160 + 684) == {
        2: 2, 5: 1, 7: 1, 248944188971: 1, 41934288374662739280111597170467339: 1,
    }


@given(st.integers(min_value=1, max_value=10**12))
def test_factorize_reconstructs(n):
    f = arith.factorize(n)
    assert math.prod(p**e for p, e in f.items()) == n
    assert all(arith.is_prime(p) for p in f)


def test_factorize_partial_reports_cofactor():
    n = 1009 * (2**61 - 1)
    assert arith.factorize(n, trial_limit=2000, complete=False) == {1009: 1, 2**61 - 1: 1}


def test_multiplicative_order_frozen():
    # sympy.n_order oracle
    assert arith.multiplicative_order(911, 29) == 4
    assert arith.multiplicative_order(2023621, 1021) == 2
    assert [arith.multiplicative_order(a, 1021) for a in (2, 10, 802)] == [340, 1020, 5]
    with pytest.raises(ValueError):
        arith.multiplicative_order(29, 29)


def test_cyclotomic_polynomials():
    assert arith.cyclotomic_polynomial(1) == (-1, 1)
    assert arith.cyclotomic_polynomial(5) == (1, 1, 1, 1, 1)
    assert arith.cyclotomic_polynomial(12) == (1, 0, -1, 0, 1)
    assert arith.cyclotomic_polynomial(30) == (1, 1, 0, -1, -1, -1, 0, 1, 1)


def test_order_and_cyclotomic_consistency_exhaustive():
    # Phi_k(a) = 0 mod r  <=>  ord_r(a) = k, for r not dividing k
    for r in arith.small_primes(500):
        if r < 3:
            continue
        for k in range(1, r):
            if (r - 1) % k:
                continue
            phi = arith.cyclotomic_polynomial(k)
            for a in range(1, r):
                root = sum(c * pow(a, i, r) for i, c in enumerate(phi)) % r == 0
                assert root == (arith.multiplicative_order(a, r) == k)


def test_primitive_roots():
    rng = random.Random(5)
    for r, k in [(1021, 10), (29, 4), (2**160 + 685, 10)]:
        z = arith.primitive_kth_root(r, k, rng)
        assert arith.multiplicative_order(z, r) == k
    assert arith.primitive_kth_roots(29, 4) == [12, 17]
    with pytest.raises(ValueError):
        arith.primitive_kth_root(29, 5, rng)


@given(st.sampled_from([3, 5, 13, 1009, 2**61 - 1]), st.integers(min_value=0, max_value=10**20))
def test_sqrt_mod(p, a):
    s = arith.sqrt_mod(a, p)
    if s is None:
        assert pow(a % p, (p - 1) // 2, p) == p - 1
    else:
        assert s * s % p == a % p


def test_parse_int():
    assert arith.parse_int("2^160+685") == 2**160 + 685
    assert arith.parse_int("2^180-7427") == 2**180 - 7427
    assert arith.parse_int("2**10") == 1024
    assert arith.parse_int("1021") == 1021


def test_squarefree():
    assert arith.is_squarefree(55) and not arith.is_squarefree(880) and not arith.is_squarefree(0)
