import random

import pytest
from hypothesis import given, settings, strategies as st

from cmweil.jacobian import (
    HyperellipticCurve,
    divisor_add,
    identity,
    is_valid,
    negate,
    order_check_details,
    parse_curve,
    probable_order_check,
    random_divisor,
    scalar_mul,
    twist_curve,
    twist_search,
    weil_interval,
)

CURVES = [
    twist_curve(5, 18, 1021),
    twist_curve(7, 34, 911),
    HyperellipticCurve(101, (3, 1, 0, 0, 0, 1)),
    HyperellipticCurve(10007, (5, 0, 7, 1)),
]


def brute_force_genus2_order(curve):
    """Independent oracle: #Jac from naive point counts over F_q and F_q^2 (genus 2 only)."""
    q, f = curve.q, curve.f

    def ev(x, mulf, addf, zero):
        acc = zero
        for c in reversed(f):
            acc = addf(mulf(acc, x), c)
        return acc

    # F_q
    n1 = 1
    for x in range(q):
        v = ev(x, lambda a, b: a * b % q, lambda a, c: (a + c) % q, 0)
        n1 += 1 if v == 0 else (2 if pow(v, (q - 1) // 2, q) == 1 else 0)
    # F_q^2 = F_q[i]/(i^2 - n) with n a non-residue
    nr = next(a for a in range(2, q) if pow(a, (q - 1) // 2, q) == q - 1)

    def mul(a, b):
        return ((a[0] * b[0] + nr * a[1] * b[1]) % q, (a[0] * b[1] + a[1] * b[0]) % q)

    def power(a, e):
        r = (1, 0)
        while e:
            if e & 1:
                r = mul(r, a)
            a = mul(a, a)
            e >>= 1
        return r

    n2 = 1
    half = (q * q - 1) // 2
    for x0 in range(q):
        for x1 in range(q):
            v = ev((x0, x1), mul, lambda a, c: ((a[0] + c) % q, a[1]), (0, 0))
            n2 += 1 if v == (0, 0) else (2 if power(v, half) == (1, 0) else 0)
    a1 = n1 - q - 1
    s2 = n2 - q * q - 1
    # L(T) = 1 + a1 T + a2 T^2 + q a1 T^3 + q^2 T^4, a2 from Newton's identity
    a2 = (s2 + a1 * a1) // 2
    return 1 + a1 + a2 + q * a1 + q * q


def test_brute_force_oracle_on_small_curve():
    curve = HyperellipticCurve(31, (3, 1, 0, 0, 0, 1))
    N = brute_force_genus2_order(curve)
    rng = random.Random(0)
    for _ in range(30):
        assert scalar_mul(N, random_divisor(curve, rng), curve).is_identity()
    assert probable_order_check(curve, N, 10, rng)


@pytest.mark.parametrize("curve", CURVES, ids=str)
def test_group_laws(curve):
    rng = random.Random(1)
    O = identity()
    for _ in range(250):
        a, b, c = (random_divisor(curve, rng) for _ in range(3))
        assert is_valid(a, curve)
        ab = divisor_add(a, b, curve)
        assert is_valid(ab, curve)
        assert ab == divisor_add(b, a, curve)
        assert divisor_add(ab, c, curve) == divisor_add(a, divisor_add(b, c, curve), curve)
        assert divisor_add(a, O, curve) == a
        assert divisor_add(a, negate(a, curve), curve).is_identity()


@settings(max_examples=60)
@given(m=st.integers(-500, 500), n=st.integers(-500, 500), seed=st.integers(0, 2**32))
def test_scalar_mul_is_homomorphism(m, n, seed):
    curve = CURVES[0]
    D = random_divisor(curve, random.Random(seed))
    lhs = scalar_mul(m + n, D, curve)
    assert lhs == divisor_add(scalar_mul(m, D, curve), scalar_mul(n, D, curve), curve)


def test_random_divisors_vary_with_seed():
    curve = CURVES[0]
    a = [random_divisor(curve, random.Random(s)) for s in range(20)]
    assert len(set(a)) > 15
    assert random_divisor(curve, random.Random(5)) == random_divisor(curve, random.Random(5))


def test_generic_divisor_has_full_degree():
    curve = CURVES[0]
    rng = random.Random(2)
    full = sum(len(random_divisor(curve, rng).u) - 1 == 2 for _ in range(400))
    # a sum of two random points has deg u = 2 unless the points are opposite or equal
    assert full > 390


def test_known_orders_pass_and_neighbours_fail():
    rng = random.Random(3)
    c7 = twist_curve(7, 34, 911)
    assert probable_order_check(c7, 778417333, 5, rng)
    assert not probable_order_check(c7, 778417334, 5, rng)
    c5 = twist_curve(5, 18, 1021)
    N = brute_force_genus2_order(c5)
    assert probable_order_check(c5, N, 10, rng)
    assert not probable_order_check(c5, N + 2, 10, rng)


def test_cofactor_probe_rejects_multiples_of_the_order():
    curve = HyperellipticCurve(47, (3, 1, 0, 0, 0, 1))
    N = brute_force_genus2_order(curve)
    assert N == 1795  # odd, and 2N still lies inside the Weil interval
    assert order_check_details(curve, N, 10, random.Random(0)).passed
    # [2N] annihilates every divisor, but [2N / 2]D = [N]D is always zero
    forced = order_check_details(curve, 2 * N, 10, random.Random(0))
    assert forced.within_weil_bounds and all(forced.annihilated)
    assert not forced.cofactor_primes[2] and not forced.passed


def test_outside_weil_interval():
    res = order_check_details(CURVES[0], 5, 5, random.Random(0))
    assert not res.passed and not res.within_weil_bounds
    lo, hi = weil_interval(1021, 2)
    assert lo <= 1021**2 <= hi


def test_twist_search_finds_known_twist():
    a = twist_search(7, 778417333, 911, 40, random.Random(0), trials=4)
    assert a is not None
    assert probable_order_check(twist_curve(7, a, 911), 778417333, 8, random.Random(1))


def test_curve_validation_and_parsing():
    c = parse_curve("hyperelliptic:1021:18,0,0,0,0,1")
    assert c == twist_curve(5, 18, 1021) and c.genus == 2
    assert parse_curve(str(c)) == c
    with pytest.raises(ValueError):
        HyperellipticCurve(1021, (1, 0, 0, 0, 1))  # even degree
    with pytest.raises(ValueError):
        HyperellipticCurve(1021, (1, 0, 2))
    with pytest.raises(ValueError):
        HyperellipticCurve(1021, (0, 0, 1, 0, 0, 1))  # x^2 | f
    with pytest.raises(ValueError):
        HyperellipticCurve(1000, (1, 0, 0, 0, 0, 1))
    with pytest.raises(ValueError):
        parse_curve("elliptic:7:1,1")
