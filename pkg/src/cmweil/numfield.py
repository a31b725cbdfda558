"""Exact arithmetic in Q[x]/(f) for monic integral f, plus certified complex embeddings."""

from __future__ import annotations

import math
from contextlib import contextmanager
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import mpmath

from . import polynomial as P


@contextmanager
def _iv_prec(bits: int):
    old = mpmath.iv.prec
    mpmath.iv.prec = bits
    try:
        yield
    finally:
        mpmath.iv.prec = old


class FieldMismatchError(ValueError):
    pass


class RamifiedPrimeError(ValueError):
    """The prime divides the discriminant of the defining polynomial."""


class RootIsolationError(ArithmeticError):
    """Root enclosures could not be certified at the requested precision."""


@dataclass(frozen=True, eq=False)
class NumberField:
    """Q(theta) with theta a root of the monic irreducible integer polynomial ``poly``."""

    poly: tuple[int, ...]
    name: str = dc_field(default="K", compare=False)

    def __post_init__(self):
        if len(self.poly) < 2 or self.poly[-1] != 1:
            raise ValueError("defining polynomial must be monic of degree >= 1")
        object.__setattr__(self, "poly", tuple(int(c) for c in self.poly))
        if self.disc == 0:
            raise ValueError("defining polynomial is not squarefree")

    def __eq__(self, other):
        return isinstance(other, NumberField) and self.poly == other.poly

    def __hash__(self):
        return hash(self.poly)

    def __repr__(self):
        return f"NumberField({list(self.poly)})"

    @property
    def degree(self) -> int:
        return len(self.poly) - 1

    @cached_property
    def disc(self) -> int:
        """Discriminant of the defining polynomial."""
        n = self.degree
        res = P.resultant(list(self.poly), P.derivative(list(self.poly)))
        return (-1) ** (n * (n - 1) // 2) * res

    @cached_property
    def _power_table(self) -> tuple[tuple[int, ...], ...]:
        # theta^(n+j) in the power basis, j = 0 .. n-2
        n = self.degree
        cur = [-c for c in self.poly[:-1]]
        table = []
        for _ in range(max(n - 1, 0)):
            table.append(tuple(cur))
            top = cur[-1]
            cur = [0] + cur[:-1]
            if top:
                cur = [cur[i] - top * self.poly[i] for i in range(n)]
        return tuple(table)

    def reduce(self, coeffs: Sequence[int]) -> list[int]:
        """Reduce an integer polynomial of any degree modulo ``poly``."""
        n = self.degree
        c = list(coeffs) + [0] * max(0, n - len(coeffs))
        # fold down from the top; generic for arbitrary length
        for i in range(len(c) - 1, n - 1, -1):
            top = c[i]
            if top:
                for j in range(n):
                    c[i - n + j] -= top * self.poly[j]
        return c[:n]

    def mul_coeffs(self, a: Sequence[int], b: Sequence[int]) -> list[int]:
        n = self.degree
        prod = [0] * (2 * n - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    prod[i + j] += ai * bj
        out = prod[:n]
        for j, row in enumerate(self._power_table):
            c = prod[n + j]
            if c:
                for i in range(n):
                    out[i] += c * row[i]
        return out

    def element(self, coords: Sequence, den: int = 1) -> "FieldElement":
        """Element from rational (or integer) power-basis coordinates."""
        n = self.degree
        coords = list(coords) + [0] * (n - len(coords))
        if len(coords) != n:
            raise ValueError(f"expected {n} coordinates")
        fr = [Fraction(c) / den for c in coords]
        d = 1
        for x in fr:
            d = d * x.denominator // math.gcd(d, x.denominator)
        return FieldElement(self, tuple(int(x * d) for x in fr), d)

    def from_int(self, c: int) -> "FieldElement":
        return FieldElement(self, (int(c),) + (0,) * (self.degree - 1), 1)

    @property
    def one(self) -> "FieldElement":
        return self.from_int(1)

    @property
    def zero(self) -> "FieldElement":
        return self.from_int(0)

    @property
    def gen(self) -> "FieldElement":
        if self.degree == 1:
            return self.from_int(-self.poly[0])
        return FieldElement(self, (0, 1) + (0,) * (self.degree - 2), 1)


@dataclass(frozen=True)
class FieldElement:
    """``sum(num[i] * theta**i) / den`` with ``den > 0`` and gcd(num, den) = 1."""

    field: NumberField
    num: tuple[int, ...]
    den: int = 1

    def __post_init__(self):
        g = self.den
        for c in self.num:
            g = math.gcd(g, c)
            if g == 1:
                break
        if self.den == 0:
            raise ZeroDivisionError("zero denominator")
        if self.den < 0:
            g = -g
        if g != 1:
            object.__setattr__(self, "num", tuple(c // g for c in self.num))
            object.__setattr__(self, "den", self.den // g)

    def _check(self, other) -> "FieldElement":
        if isinstance(other, int):
            return self.field.from_int(other)
        if isinstance(other, Fraction):
            return self.field.element([other])
        if not isinstance(other, FieldElement):
            return NotImplemented
        if other.field != self.field:
            raise FieldMismatchError("elements belong to different fields")
        return other

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        d = self.den * other.den // math.gcd(self.den, other.den)
        sa, sb = d // self.den, d // other.den
        return FieldElement(self.field, tuple(x * sa + y * sb for x, y in zip(self.num, other.num)), d)

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.field, tuple(-x for x in self.num), self.den)

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return FieldElement(self.field, tuple(self.field.mul_coeffs(self.num, other.num)), self.den * other.den)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative powers are not supported")
        result, base = self.field.one, self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.field.from_int(other)
        if not isinstance(other, FieldElement):
            return NotImplemented
        return self.field == other.field and self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.field, self.num, self.den))

    def __repr__(self):
        terms = [f"{c}*t^{i}" for i, c in enumerate(self.num) if c]
        body = " + ".join(terms) or "0"
        return f"({body})/{self.den}" if self.den != 1 else body

    @property
    def coords(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(c, self.den) for c in self.num)

    @property
    def is_integral_coords(self) -> bool:
        return self.den == 1

    def is_rational(self) -> bool:
        return not any(self.num[1:])

    def compose(self, image: "FieldElement") -> "FieldElement":
        """Substitute ``theta -> image``: returns num(image)/den."""
        acc = self.field.zero
        for c in reversed(self.num):
            acc = acc * image + c
        return FieldElement(self.field, acc.num, acc.den * self.den)

    def multiplication_matrix(self) -> list[list[int]]:
        """Integer matrix of multiplication by ``num`` (columns are num*theta^j)."""
        n = self.field.degree
        cols = []
        cur = list(self.num)
        for _ in range(n):
            cols.append(cur)
            top = cur[-1]
            cur = [0] + cur[:-1]
            if top:
                cur = [cur[i] - top * self.field.poly[i] for i in range(n)]
        return [[cols[j][i] for j in range(n)] for i in range(n)]


def element_arithmetic(a: FieldElement, b: FieldElement, op: str) -> FieldElement:
    if a.field != b.field:
        raise FieldMismatchError("elements belong to different fields")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown operation {op!r}")


def norm(a: FieldElement) -> Fraction:
    """N_{K/Q}(a) = Res(f, num) / den^n (f monic)."""
    res = P.resultant(list(a.field.poly), list(a.num))
    return Fraction(res, a.den ** a.field.degree)


def integer_norm(a: FieldElement) -> int:
    """Norm of an element with integral coordinates."""
    if a.den != 1:
        raise ValueError("element does not have integral coordinates")
    return P.resultant(list(a.field.poly), list(a.num))


def charpoly_int(m: list[list[int]]) -> list[int]:
    """Characteristic polynomial of an integer matrix (Faddeev-LeVerrier), low degree first."""
    n = len(m)
    coeffs = [0] * (n + 1)
    coeffs[n] = 1
    mk = [[0] * n for _ in range(n)]
    for k in range(1, n + 1):
        # mk <- m * mk + c_{n-k+1} I
        prev = mk
        mk = [[sum(m[i][t] * prev[t][j] for t in range(n)) for j in range(n)] for i in range(n)]
        for i in range(n):
            mk[i][i] += coeffs[n - k + 1]
        am = [[sum(m[i][t] * mk[t][j] for t in range(n)) for j in range(n)] for i in range(n)]
        tr = sum(am[i][i] for i in range(n))
        assert tr % k == 0
        coeffs[n - k] = -tr // k
    return coeffs


def characteristic_polynomial(a: FieldElement) -> list[Fraction]:
    cp = charpoly_int(a.multiplication_matrix())
    n = len(cp) - 1
    return [Fraction(c, a.den ** (n - i)) for i, c in enumerate(cp)]


def minimal_polynomial(a: FieldElement) -> list[Fraction]:
    """Monic minimal polynomial over Q, low degree first.

    The characteristic polynomial is a power of the minimal polynomial,
    so the latter is its squarefree part.
    """
    cp = characteristic_polynomial(a)
    g = P.gcd_q(cp, P.derivative(cp))
    if len(g) <= 1:
        return P.monic_q(cp)
    quo, rem = P.divmod_q(cp, g)
    assert not rem
    return P.monic_q(quo)


def generates_field(a: FieldElement) -> bool:
    return len(minimal_polynomial(a)) - 1 == a.field.degree


def roots_mod_r(field: NumberField, r: int) -> list[int]:
    """Roots of the defining polynomial modulo the prime ``r``, ascending."""
    if field.disc % r == 0:
        raise RamifiedPrimeError(f"{r} divides the discriminant {field.disc}")
    return P.roots_p(list(field.poly), r)


def reduce_mod_root(a: FieldElement, t: int, r: int) -> int:
    """Image of ``a`` under the map O -> F_r sending theta to the root ``t``."""
    if a.den % r == 0:
        raise ValueError(f"element is not integral at {r}")
    val = P.evaluate(a.num, t) % r
    return val * pow(a.den, -1, r) % r if a.den != 1 else val


# -- norm form (vectorised exact norms) ----------------------------------------

def norm_form(field: NumberField) -> list[tuple[tuple[int, ...], int]]:
    """N(sum c_i theta^i) as a homogeneous integer polynomial in (c_0..c_{n-1}).

    Returned as ``[(exponent_tuple, coefficient), ...]``.  Built from the
    determinant of the symbolic multiplication matrix by column-subset
    expansion, so intended for small degrees (n <= 8).
    """
    n = field.degree
    basis = [FieldElement(field, tuple(1 if j == i else 0 for j in range(n)), 1) for i in range(n)]
    mats = [b.multiplication_matrix() for b in basis]

    def unit(i):
        return tuple(1 if j == i else 0 for j in range(n))

    entry = [[{unit(i): mats[i][row][col] for i in range(n) if mats[i][row][col]} for col in range(n)] for row in range(n)]

    def mul_lin(poly, lin):
        out: dict[tuple[int, ...], int] = {}
        for e1, c1 in poly.items():
            for e2, c2 in lin.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return out

    # dets[mask] = det of rows 0..|mask|-1 against the columns in mask
    dets: dict[int, dict] = {0: {(0,) * n: 1}}
    for row in range(n):
        nxt: dict[int, dict] = {}
        for mask, poly in dets.items():
            if not poly:
                continue
            for col in range(n):
                if mask >> col & 1 or not entry[row][col]:
                    continue
                # sign: number of chosen columns greater than col
                sign = -1 if bin(mask >> (col + 1)).count("1") % 2 else 1
                term = mul_lin(poly, entry[row][col])
                acc = nxt.setdefault(mask | 1 << col, {})
                for e, c in term.items():
                    acc[e] = acc.get(e, 0) + sign * c
        dets = nxt
    full = dets.get((1 << n) - 1, {})
    return sorted((e, c) for e, c in full.items() if c)


# -- complex embeddings ----------------------------------------------------------

@dataclass(frozen=True)
class EmbeddingSet:
    """Certified disjoint disks, each holding exactly one complex root of ``field.poly``.

    Order: conjugate pairs sorted by (real part, |imaginary part|), the
    member with positive imaginary part first; real roots sorted by value.
    """

    field: NumberField
    precision_bits: int
    centers: tuple
    radii: tuple

    def __len__(self):
        return len(self.centers)

    def value(self, j: int) -> complex:
        return complex(self.centers[j])

    def box(self, j: int):
        """Interval enclosure of the j-th root as an ``mpmath.iv`` complex box."""
        # c +- rad must be formed in interval arithmetic: a plain mpf subtraction
        # at the ambient precision can round away more than the radius itself
        with _iv_prec(self.precision_bits + 32):
            c, rad = self.centers[j], self.radii[j]
            disk = mpmath.iv.mpf(rad) * mpmath.iv.mpf([-1, 1])
            re = mpmath.iv.mpf(c.real) + disk
            im = mpmath.iv.mpf(c.imag) + disk
            return mpmath.iv.mpc(re, im)

    def evaluate(self, a: FieldElement, j: int):
        """Certified enclosure of the j-th embedding of ``a``."""
        with _iv_prec(self.precision_bits + 20):
            z = self.box(j)
            acc = mpmath.iv.mpc(0)
            for c in reversed(a.num):
                acc = acc * z + c
            return acc / a.den

    def evaluate_approx(self, a: FieldElement, j: int):
        with mpmath.workprec(self.precision_bits + 20):
            z = self.centers[j]
            acc = mpmath.mpc(0)
            for c in reversed(a.num):
                acc = acc * z + c
            return acc / a.den

    def index_of(self, z, tol: float = 1e-6) -> int:
        """Index of the root closest to the approximate value ``z``."""
        dists = [abs(complex(c) - complex(z)) for c in self.centers]
        j = min(range(len(dists)), key=dists.__getitem__)
        if dists[j] > tol * max(1.0, abs(complex(z))):
            raise ValueError("value is not close to any root")
        return j

    def is_totally_complex(self) -> bool:
        return all(abs(c.imag) > rad for c, rad in zip(self.centers, self.radii))


def _canonical_order(roots, radii):
    idx = list(range(len(roots)))
    reals = [i for i in idx if abs(roots[i].imag) <= radii[i]]
    upper = [i for i in idx if roots[i].imag > radii[i]]
    lower = [i for i in idx if roots[i].imag < -radii[i]]
    order = sorted(reals, key=lambda i: roots[i].real)
    # rounding the real part keeps purely imaginary roots from sorting on noise
    for i in sorted(upper, key=lambda i: (round(float(roots[i].real), 12), float(roots[i].imag))):
        order.append(i)
        # partner: the lower root closest to the conjugate
        partner = min(lower, key=lambda j: abs(roots[j] - mpmath.conj(roots[i])))
        lower.remove(partner)
        order.append(partner)
    return order


def complex_embeddings(field: NumberField, precision_bits: int = 128) -> EmbeddingSet:
    """Approximate all roots and certify disjoint enclosures.

    Roots come from mpmath's Durand-Kerner solver; each approximation z gets
    the disk of radius n*|f(z)|/|f'(z)| evaluated in interval arithmetic,
    which always contains a root.  If the n disks are pairwise disjoint each
    holds exactly one.
    """
    if precision_bits < 64:
        raise ValueError("precision_bits must be at least 64")
    n = field.degree
    coeffs = list(reversed(field.poly))
    dcoeffs = list(reversed(P.derivative(list(field.poly))))
    with mpmath.workprec(precision_bits + 32):
        try:
            approx = mpmath.polyroots(coeffs, maxsteps=200 + 20 * n, extraprec=2 * precision_bits)
        except mpmath.libmp.NoConvergence as exc:
            raise RootIsolationError(str(exc)) from exc
        approx = [mpmath.mpc(z) for z in approx]
    radii = []
    with _iv_prec(precision_bits + 32):
        for z in approx:
            zi = mpmath.iv.mpc(mpmath.iv.mpf(z.real), mpmath.iv.mpf(z.imag))
            fz = mpmath.iv.mpc(0)
            for c in coeffs:
                fz = fz * zi + c
            dz = mpmath.iv.mpc(0)
            for c in dcoeffs:
                dz = dz * zi + c
            upper = mpmath.mpf(abs(fz).b)
            lower = mpmath.mpf(abs(dz).a)
            if lower <= 0:
                raise RootIsolationError("derivative vanishes near a root")
            # slack covers the rounding of the final quotient
            radii.append(n * upper / lower * (1 + mpmath.mpf(2) ** (-precision_bits // 2)))
    for i in range(n):
        for j in range(i + 1, n):
            if abs(approx[i] - approx[j]) <= radii[i] + radii[j]:
                raise RootIsolationError("root enclosures overlap; increase precision")
    order = _canonical_order(approx, radii)
    return EmbeddingSet(field, precision_bits, tuple(approx[i] for i in order), tuple(radii[i] for i in order))
