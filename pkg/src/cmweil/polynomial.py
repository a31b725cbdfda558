"""Dense univariate polynomials, coefficient lists lowest degree first.

Two flavours live here: exact polynomials over Z/Q (plain ints or
``Fraction``) and polynomials over a prime field F_p (ints reduced mod p).
Zero polynomial is the empty list.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence


def trim(a: list) -> list:
    while a and a[-1] == 0:
        a.pop()
    return a


def degree(a: Sequence) -> int:
    return len(a) - 1


def evaluate(a: Sequence, x):
    acc = 0
    for c in reversed(a):
        acc = acc * x + c
    return acc


# -- Z[x] / Q[x] ------------------------------------------------------------

def add(a: Sequence, b: Sequence) -> list:
    n = max(len(a), len(b))
    return trim([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])


def sub(a: Sequence, b: Sequence) -> list:
    n = max(len(a), len(b))
    return trim([(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)])


def mul(a: Sequence, b: Sequence) -> list:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
    return trim(out)


def scale(a: Sequence, c) -> list:
    return trim([c * x for x in a])


def derivative(a: Sequence) -> list:
    return trim([i * a[i] for i in range(1, len(a))])


def divmod_q(a: Sequence, b: Sequence) -> tuple[list, list]:
    """Division with remainder over Q (exact Fractions)."""
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    rem = [Fraction(x) for x in a]
    lead = Fraction(b[-1])
    quo = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    for i in range(len(quo) - 1, -1, -1):
        c = rem[i + len(b) - 1] / lead
        quo[i] = c
        if c:
            for j, bj in enumerate(b):
                rem[i + j] -= c * bj
    return trim(quo), trim(rem[: len(b) - 1])


def monic_q(a: Sequence) -> list:
    lead = Fraction(a[-1])
    return [Fraction(x) / lead for x in a]


def gcd_q(a: Sequence, b: Sequence) -> list:
    """Monic gcd over Q."""
    a, b = trim(list(a)), trim(list(b))
    while b:
        a, b = b, divmod_q(a, b)[1]
    return monic_q(a) if a else []


def pseudo_rem(a: list[int], b: list[int]) -> list[int]:
    """lc(b)^(deg a - deg b + 1) * a mod b, computed over Z."""
    lb, db = b[-1], len(b) - 1
    r = [x * lb ** (len(a) - db) for x in a]
    for i in range(len(a) - 1 - db, -1, -1):
        c = r[i + db] // lb
        if c:
            for j, bj in enumerate(b):
                r[i + j] -= c * bj
    return trim(r[:db])


def resultant(a: Sequence[int], b: Sequence[int]) -> int:
    """Resultant of two integer polynomials by the subresultant PRS."""
    a, b = trim(list(a)), trim(list(b))
    if not a or not b:
        return 0
    sign = 1
    if len(a) < len(b):
        a, b = b, a
        if (len(a) - 1) * (len(b) - 1) % 2:
            sign = -1
    if len(b) == 1:
        return sign * b[0] ** (len(a) - 1)
    g = h = 1
    while len(b) > 1:
        da, db = len(a) - 1, len(b) - 1
        delta = da - db
        if da % 2 and db % 2:
            sign = -sign
        r = pseudo_rem(a, b)
        if not r:
            return 0
        a, b = b, [x // (g * h**delta) for x in r]
        g = a[-1]
        if delta:
            h = g**delta // h ** (delta - 1)
    da = len(a) - 1
    return sign * b[0] ** da // h ** (da - 1)


# -- F_p[x] ------------------------------------------------------------------

def mod_p(a: Sequence[int], p: int) -> list[int]:
    return trim([x % p for x in a])


def add_p(a, b, p):
    n = max(len(a), len(b))
    return trim([((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)) % p for i in range(n)])


def sub_p(a, b, p):
    n = max(len(a), len(b))
    return trim([((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p for i in range(n)])


def neg_p(a, p):
    return trim([(-x) % p for x in a])


def mul_p(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
    return trim([x % p for x in out])


def scale_p(a, c, p):
    return trim([x * c % p for x in a])


def divmod_p(a, b, p):
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    rem = list(a)
    inv = pow(b[-1], -1, p)
    db = len(b) - 1
    quo = [0] * max(len(a) - db, 0)
    for i in range(len(quo) - 1, -1, -1):
        c = rem[i + db] * inv % p
        quo[i] = c
        if c:
            for j, bj in enumerate(b):
                rem[i + j] = (rem[i + j] - c * bj) % p
    return trim(quo), trim([x % p for x in rem[:db]])


def rem_p(a, b, p):
    return divmod_p(a, b, p)[1]


def monic_p(a, p):
    if not a:
        return []
    inv = pow(a[-1], -1, p)
    return [x * inv % p for x in a]


def gcd_p(a, b, p):
    a, b = mod_p(a, p), mod_p(b, p)
    while b:
        a, b = b, rem_p(a, b, p)
    return monic_p(a, p)


def xgcd_p(a, b, p):
    """Return (g, s, t) with s*a + t*b = g, g monic."""
    r0, r1 = mod_p(a, p), mod_p(b, p)
    s0, s1, t0, t1 = [1], [], [], [1]
    while r1:
        q, r = divmod_p(r0, r1, p)
        r0, r1 = r1, r
        s0, s1 = s1, sub_p(s0, mul_p(q, s1, p), p)
        t0, t1 = t1, sub_p(t0, mul_p(q, t1, p), p)
    if not r0:
        return [], [], []
    inv = pow(r0[-1], -1, p)
    return scale_p(r0, inv, p), scale_p(s0, inv, p), scale_p(t0, inv, p)


def powmod_p(a, e, m, p):
    """a^e mod (m, p)."""
    result = [1]
    base = rem_p(a, m, p)
    while e:
        if e & 1:
            result = rem_p(mul_p(result, base, p), m, p)
        e >>= 1
        if e:
            base = rem_p(mul_p(base, base, p), m, p)
    return result


def roots_p(f: Sequence[int], p: int) -> list[int]:
    """All distinct roots of ``f`` in F_p, ascending.

    gcd with x^p - x isolates the split part, then equal-degree splitting
    with the deterministic shifts (x + delta)^((p-1)/2) - 1.
    """
    f = monic_p(mod_p(f, p), p)
    if not f:
        raise ValueError("zero polynomial")
    if p == 2:
        return [x for x in (0, 1) if evaluate(f, x) % 2 == 0]
    xp = powmod_p([0, 1], p, f, p)
    g = gcd_p(sub_p(xp, [0, 1], p), f, p)
    roots: list[int] = []
    stack = [g]
    delta = 0
    while stack:
        h = stack.pop()
        d = len(h) - 1
        if d <= 0:
            continue
        if d == 1:
            roots.append((-h[0]) % p)
            continue
        while True:
            w = powmod_p([delta % p, 1], (p - 1) // 2, h, p)
            delta += 1
            split = gcd_p(sub_p(w, [1], p), h, p)
            if 0 < len(split) - 1 < d:
                stack.append(split)
                stack.append(divmod_p(h, split, p)[0])
                break
    return sorted(roots)
