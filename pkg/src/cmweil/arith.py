"""Integer and prime-field primitives: primality, factoring, orders, roots of unity."""

from __future__ import annotations

import math
import random
from functools import lru_cache

# Deterministic Miller-Rabin witness sets (Jaeschke / Sorenson-Webster bounds).
_MR_BOUNDS = (
    (2047, (2,)),
    (1373653, (2, 3)),
    (25326001, (2, 3, 5)),
    (3215031751, (2, 3, 5, 7)),
    (2152302898747, (2, 3, 5, 7, 11)),
    (3474749660383, (2, 3, 5, 7, 11, 13)),
    (341550071728321, (2, 3, 5, 7, 11, 13, 17)),
    (3825123056546413051, (2, 3, 5, 7, 11, 13, 17, 19, 23)),
    (1 << 64, (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)),
)

RANDOM_MR_ROUNDS = 64
TRIAL_DIVISION_LIMIT = 10**6


@lru_cache(maxsize=None)
def small_primes(limit: int = TRIAL_DIVISION_LIMIT) -> tuple[int, ...]:
    """All primes below ``limit`` (sieve of Eratosthenes)."""
    sieve = bytearray([1]) * limit
    sieve[0:2] = b"\x00\x00"
    for p in range(2, math.isqrt(limit - 1) + 1):
        if sieve[p]:
            sieve[p * p :: p] = bytearray(len(range(p * p, limit, p)))
    return tuple(i for i, flag in enumerate(sieve) if flag)


_SMALL = small_primes(1000)


def _strong_probable_prime(n: int, a: int, d: int, s: int) -> bool:
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def is_prime(n: int) -> bool:
    """Primality test.

    Deterministic for ``n < 2**64``.  Above that, base 2 followed by 64
    Miller-Rabin rounds with bases drawn from a generator seeded by ``n``,
    so the answer is a pure function of ``n`` and the false-positive rate is
    below ``4**-64``.
    """
    if n < 2:
        return False
    for p in _SMALL:
        if n % p == 0:
            return n == p
    if n < 1_000_000:
        return True
    d, s = n - 1, 0
    while not d & 1:
        d >>= 1
        s += 1
    if n < 1 << 64:
        for bound, bases in _MR_BOUNDS:
            if n < bound:
                return all(_strong_probable_prime(n, a, d, s) for a in bases)
    if not _strong_probable_prime(n, 2, d, s):
        return False
    gen = random.Random(n)
    for _ in range(RANDOM_MR_ROUNDS):
        if not _strong_probable_prime(n, gen.randrange(3, n - 1), d, s):
            return False
    return True


def _pollard_brent(n: int, gen: random.Random) -> int:
    """Return a nontrivial factor of the odd composite ``n``."""
    if n % 2 == 0:
        return 2
    while True:
        y, c, m = gen.randrange(1, n), gen.randrange(1, n), 128
        g = r = q = 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


def factorize(n: int, trial_limit: int = TRIAL_DIVISION_LIMIT, complete: bool = True) -> dict[int, int]:
    """Prime factorization of ``n >= 1`` as ``{prime: exponent}``.

    Trial division below ``trial_limit``, then Pollard rho (Brent).  With
    ``complete=False`` the rho stage is skipped and a composite cofactor is
    reported under its own value; callers use that for "small primes only".
    """
    return dict(_factorize(n, trial_limit, complete))


@lru_cache(maxsize=1024)
def _factorize(n: int, trial_limit: int, complete: bool) -> tuple[tuple[int, int], ...]:
    if n < 1:
        raise ValueError("factorize expects a positive integer")
    out: dict[int, int] = {}
    for p in small_primes(trial_limit):
        if p * p > n:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out[p] = e
    if n == 1:
        return tuple(out.items())
    if not complete:
        out[n] = out.get(n, 0) + 1
        return tuple(out.items())
    gen = random.Random(n)
    stack = [n]
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        d = _pollard_brent(m, gen)
        stack.extend((d, m // d))
    return tuple(sorted(out.items()))


def multiplicative_order(a: int, r: int, factors: dict[int, int] | None = None) -> int:
    """Order of ``a`` in ``(Z/rZ)*`` for prime ``r``.

    ``factors`` may carry the factorization of ``r - 1`` to avoid factoring it.
    """
    a %= r
    if a == 0:
        raise ValueError(f"{a} is not invertible modulo {r}")
    if factors is None:
        factors = factorize(r - 1)
    order = r - 1
    for p, e in factors.items():
        for _ in range(e):
            if pow(a, order // p, r) == 1:
                order //= p
            else:
                break
    return order


@lru_cache(maxsize=256)
def cyclotomic_polynomial(k: int) -> tuple[int, ...]:
    """Coefficients (low degree first) of the k-th cyclotomic polynomial.

    Uses x^k - 1 = prod_{d | k} Phi_d(x) and exact division.
    """
    if k < 1:
        raise ValueError("k must be positive")
    num = [-1] + [0] * (k - 1) + [1]
    for d in range(1, k):
        if k % d == 0:
            num = _exact_div(num, list(cyclotomic_polynomial(d)))
    return tuple(num)


def _exact_div(num: list[int], den: list[int]) -> list[int]:
    # den is monic
    num = num[:]
    out = [0] * (len(num) - len(den) + 1)
    for i in range(len(out) - 1, -1, -1):
        c = num[i + len(den) - 1]
        out[i] = c
        if c:
            for j, dj in enumerate(den):
                num[i + j] -= c * dj
    assert not any(num), "inexact division"
    return out


def euler_phi(n: int) -> int:
    result = n
    for p in factorize(n):
        result -= result // p
    return result


def primitive_kth_root(r: int, k: int, rng: random.Random, factors: dict[int, int] | None = None) -> int:
    """A random element of exact order ``k`` modulo the prime ``r``.

    Draws ``g`` uniformly and returns ``g^((r-1)/k)`` once that has order ``k``.
    """
    if (r - 1) % k:
        raise ValueError(f"k={k} does not divide r-1")
    if k == 1:
        return 1
    kf = factorize(k)
    while True:
        z = pow(rng.randrange(2, r), (r - 1) // k, r)
        if all(pow(z, k // p, r) != 1 for p in kf):
            return z


def primitive_kth_roots(r: int, k: int) -> list[int]:
    """All ``phi(k)`` elements of exact order ``k`` mod ``r``, ascending."""
    if (r - 1) % k:
        raise ValueError(f"k={k} does not divide r-1")
    kf = factorize(k)
    g = 2
    while True:
        z = pow(g, (r - 1) // k, r)
        if all(pow(z, k // p, r) != 1 for p in kf):
            break
        g += 1
    return sorted(pow(z, j, r) for j in range(1, k + 1) if math.gcd(j, k) == 1)


def sqrt_mod(a: int, p: int) -> int | None:
    """A square root of ``a`` modulo the odd prime ``p`` (Tonelli-Shanks), or None."""
    a %= p
    if a == 0:
        return 0
    if pow(a, (p - 1) // 2, p) != 1:
        return None
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, x = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, x = t * c % p, x * b % p
    return x


def is_squarefree(n: int) -> bool:
    return all(e == 1 for e in factorize(abs(n)).values()) if n else False


def parse_int(text: str) -> int:
    """Parse a decimal integer or an expression ``2^e+c`` / ``2^e-c``."""
    s = text.replace(" ", "").replace("**", "^")
    if "^" not in s:
        return int(s)
    base, rest = s.split("^", 1)
    for i, ch in enumerate(rest):
        if ch in "+-" and i > 0:
            return int(base) ** int(rest[:i]) + int(rest[i:])
    return int(base) ** int(rest)
