"""Jacobians of odd-degree hyperelliptic curves y^2 = f(x) over F_q (Cantor's algorithm).

Divisor classes are kept in Mumford form (u, v): u monic, deg v < deg u <= g,
u | v^2 - f.  The identity is (1, 0).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from . import arith
from . import polynomial as P


@dataclass(frozen=True)
class HyperellipticCurve:
    q: int
    f: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "f", tuple(P.mod_p(self.f, self.q)))
        q, f = self.q, list(self.f)
        if q < 3 or not arith.is_prime(q):
            raise ValueError("q must be an odd prime")
        if len(f) < 2 or (len(f) - 1) % 2 == 0:
            raise ValueError("f must have odd degree")
        if f[-1] != 1:
            raise ValueError("f must be monic")
        if len(P.gcd_p(f, P.derivative(f), q)) > 1:
            raise ValueError("f is not squarefree over F_q")

    @property
    def genus(self) -> int:
        return (len(self.f) - 2) // 2

    def __str__(self):
        return f"hyperelliptic:{self.q}:" + ",".join(str(c) for c in self.f)


@dataclass(frozen=True)
class MumfordDivisor:
    u: tuple[int, ...]
    v: tuple[int, ...]

    def is_identity(self) -> bool:
        return self.u == (1,)


def identity() -> MumfordDivisor:
    return MumfordDivisor((1,), ())


def parse_curve(text: str) -> HyperellipticCurve:
    kind, q, coeffs = text.strip().split(":")
    if kind != "hyperelliptic":
        raise ValueError(f"unsupported curve kind {kind!r}")
    return HyperellipticCurve(arith.parse_int(q), tuple(int(c) for c in coeffs.split(",")))


def twist_curve(p: int, a: int, q: int) -> HyperellipticCurve:
    """y^2 = x^p + a."""
    return HyperellipticCurve(q, (a,) + (0,) * (p - 1) + (1,))


def is_valid(D: MumfordDivisor, curve: HyperellipticCurve) -> bool:
    q = curve.q
    u, v = list(D.u), list(D.v)
    if not u or u[-1] != 1 or len(u) - 1 > curve.genus or len(v) >= len(u):
        return False
    rem = P.rem_p(P.sub_p(P.mul_p(v, v, q), list(curve.f), q), u, q)
    return not rem


def _make(u, v, q) -> MumfordDivisor:
    return MumfordDivisor(tuple(u), tuple(P.rem_p(v, u, q)) if len(u) > 1 else ())


def _reduce(u, v, curve: HyperellipticCurve) -> MumfordDivisor:
    q, f, g = curve.q, list(curve.f), curve.genus
    while len(u) - 1 > g:
        u2, rem = P.divmod_p(P.sub_p(f, P.mul_p(v, v, q), q), u, q)
        assert not rem
        u = P.monic_p(u2, q)
        v = P.rem_p(P.neg_p(v, q), u, q)
    return _make(u, v, q)


def divisor_add(D1: MumfordDivisor, D2: MumfordDivisor, curve: HyperellipticCurve) -> MumfordDivisor:
    """Cantor composition followed by reduction."""
    q, f = curve.q, list(curve.f)
    u1, v1, u2, v2 = list(D1.u), list(D1.v), list(D2.u), list(D2.v)
    if D1.is_identity():
        return D2
    if D2.is_identity():
        return D1
    d0, e1, e2 = P.xgcd_p(u1, u2, q)
    d, c1, s3 = P.xgcd_p(d0, P.add_p(v1, v2, q), q)
    s1, s2 = P.mul_p(c1, e1, q), P.mul_p(c1, e2, q)
    dd = P.mul_p(d, d, q)
    u, rem = P.divmod_p(P.mul_p(u1, u2, q), dd, q)
    assert not rem
    num = P.add_p(
        P.add_p(P.mul_p(P.mul_p(s1, u1, q), v2, q), P.mul_p(P.mul_p(s2, u2, q), v1, q), q),
        P.mul_p(s3, P.add_p(P.mul_p(v1, v2, q), f, q), q),
        q,
    )
    v, rem = P.divmod_p(num, d, q)
    assert not rem
    u = P.monic_p(u, q)
    v = P.rem_p(v, u, q) if len(u) > 1 else []
    return _reduce(u, v, curve)


def negate(D: MumfordDivisor, curve: HyperellipticCurve) -> MumfordDivisor:
    return MumfordDivisor(D.u, tuple(P.neg_p(list(D.v), curve.q)))


def scalar_mul(n: int, D: MumfordDivisor, curve: HyperellipticCurve) -> MumfordDivisor:
    if n < 0:
        return scalar_mul(-n, negate(D, curve), curve)
    result, base = identity(), D
    while n:
        if n & 1:
            result = divisor_add(result, base, curve)
        n >>= 1
        if n:
            base = divisor_add(base, base, curve)
    return result


def random_point(curve: HyperellipticCurve, rng: random.Random) -> tuple[int, int]:
    q = curve.q
    while True:
        x = rng.randrange(q)
        y = arith.sqrt_mod(P.evaluate(curve.f, x) % q, q)
        if y is not None:
            return x, (y if rng.getrandbits(1) else (-y) % q)


def random_divisor(curve: HyperellipticCurve, rng: random.Random) -> MumfordDivisor:
    """Sum of g random affine points."""
    q = curve.q
    D = identity()
    for _ in range(curve.genus):
        x, y = random_point(curve, rng)
        pt = MumfordDivisor(((-x) % q, 1), (y,) if y else ())
        D = divisor_add(D, pt, curve)
    return D


def weil_interval(q: int, g: int) -> tuple[int, int]:
    """Integer bounds (sqrt q - 1)^(2g) <= N <= (sqrt q + 1)^(2g), rounded outward."""
    s = math.isqrt(q)
    lo = max(s - 1, 0) ** (2 * g)  # sqrt(q) - 1 >= isqrt(q) - 1
    hi = (s + 2) ** (2 * g)
    return lo, hi


def _valuation(n: int, ell: int) -> int:
    v = 0
    while n % ell == 0:
        n //= ell
        v += 1
    return v


@dataclass
class OrderCheck:
    passed: bool
    within_weil_bounds: bool
    annihilated: list[bool]
    cofactor_primes: dict[int, bool]


def order_check_details(curve: HyperellipticCurve, N: int, trials: int, rng: random.Random,
                        factors: dict[int, int] | None = None) -> OrderCheck:
    """[N]D = 0 for every trial divisor, and each prime l | N divides some trial's order.

    Every prime dividing a group's order divides its exponent, so for each l
    some D should have [N / l^v]D != 0 with l^v the exact power of l in N.
    (Probing [N/l]D instead would reject groups with non-cyclic l-part, such
    as the full rational 2-torsion of y^2 = x^5 + a when q = 1 mod 5.)
    """
    if N < 1 or trials < 1:
        raise ValueError("need N >= 1 and trials >= 1")
    lo, hi = weil_interval(curve.q, curve.genus)
    if not lo <= N <= hi:
        return OrderCheck(False, False, [], {})
    if factors is None:
        factors = {p: e for p, e in arith.factorize(N, complete=False).items() if p < arith.TRIAL_DIVISION_LIMIT}
    witnessed = {ell: False for ell in factors}
    annihilated = []
    for _ in range(trials):
        D = random_divisor(curve, rng)
        annihilated.append(scalar_mul(N, D, curve).is_identity())
        if not annihilated[-1]:
            break
        for ell in witnessed:
            if not witnessed[ell] and not scalar_mul(N // ell ** _valuation(N, ell), D, curve).is_identity():
                witnessed[ell] = True
    passed = all(annihilated) and len(annihilated) == trials and all(witnessed.values())
    return OrderCheck(passed, True, annihilated, witnessed)


def probable_order_check(curve: HyperellipticCurve, N: int, trials: int, rng: random.Random,
                         factors: dict[int, int] | None = None) -> bool:
    return order_check_details(curve, N, trials, rng, factors).passed


def twist_search(p: int, target_order: int, q: int, a_bound: int, rng: random.Random,
                 trials: int = 10) -> int | None:
    """Smallest a in [1, a_bound] such that Jac(y^2 = x^p + a) passes the order check."""
    for a in range(1, a_bound + 1):
        if a % q == 0:
            continue
        curve = twist_curve(p, a, q)
        if probable_order_check(curve, target_order, trials, rng):
            return a
    return None
