"""CM fields from the supported families, CM types, reflexes and type norms.

Supported families:

* ``cyclotomic``: Q(zeta_m) with (Z/mZ)* cyclic.  Embedding labels are the
  units n mod m, phi_n(zeta) = exp(2 pi i n / m).
* ``quadratic``: Q(sqrt(-d)), labels 0 (theta -> i sqrt d) and 1.
* ``quartic-cyclic``: Q(sqrt(-a + b sqrt d)) Galois with cyclic group.  Labels
  are exponents e of a generator sigma, phi_e = phi_0 o sigma^e.
* ``quartic-nongalois``: Q(sqrt(-a + b sqrt d)) non-Galois.  Labels are
  indices into the canonical root order of the defining polynomial.

For Galois families the embedding phi_l equals phi_ref o tau_l for the
automorphism tau_l, where phi_ref is the embedding with label 1
(cyclotomic) or 0 (others).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import mpmath

from . import arith
from .numfield import (
    EmbeddingSet,
    FieldElement,
    NumberField,
    RootIsolationError,
    complex_embeddings,
    minimal_polynomial,
    norm,
)


class UnsupportedFieldError(ValueError):
    pass


class ImprimitiveTypeError(ValueError):
    pass


class PrecisionError(ArithmeticError):
    """Numeric reconstruction failed even after the allowed precision doublings."""


@dataclass(frozen=True, eq=False)
class Automorphism:
    """A field automorphism, stored as the images of the power basis."""

    field: NumberField
    image: FieldElement  # image of theta

    @cached_property
    def _basis_images(self) -> tuple[tuple[int, ...], int]:
        n = self.field.degree
        den = self.image.den ** (n - 1)
        cols = []
        cur = self.field.one
        for _ in range(n):
            cols.append(tuple(c * (den // cur.den) for c in cur.num))
            cur = cur * self.image
        return tuple(cols), den

    def __call__(self, x: FieldElement) -> FieldElement:
        cols, den = self._basis_images
        n = self.field.degree
        out = [0] * n
        for i, xi in enumerate(x.num):
            if xi:
                col = cols[i]
                for j in range(n):
                    out[j] += xi * col[j]
        return FieldElement(self.field, tuple(out), den * x.den)


def _is_square(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


def _squarefree_decomposition(n: int) -> tuple[int, int]:
    """n = s^2 * D with D squarefree; returns (s, D)."""
    s, D = 1, 1
    for p, e in arith.factorize(n).items():
        s *= p ** (e // 2)
        if e % 2:
            D *= p
    return s, D


@dataclass(frozen=True, eq=False)
class CMField:
    """A CM field K of degree 2g together with complex conjugation and family data."""

    family: str
    params: tuple[int, ...]
    field: NumberField
    g: int
    conjugation: FieldElement  # image of theta under complex conjugation
    generator: FieldElement | None = None  # image of theta under a generator of Gal(K/Q)

    def __repr__(self):
        return f"CMField({self.spec_string()})"

    def __eq__(self, other):
        return isinstance(other, CMField) and (self.family, self.params) == (other.family, other.params)

    def __hash__(self):
        return hash((self.family, self.params))

    def spec_string(self) -> str:
        if self.family == "cyclotomic":
            return f"cyclotomic:{self.params[0]}"
        if self.family == "quadratic":
            return f"quadratic:{self.params[0]}"
        return "quartic:" + ",".join(str(x) for x in self.params)

    @property
    def is_galois(self) -> bool:
        return self.family != "quartic-nongalois"

    @property
    def degree(self) -> int:
        return self.field.degree

    def conj(self, x: FieldElement) -> FieldElement:
        return self.conj_automorphism(x)

    @cached_property
    def conj_automorphism(self) -> Automorphism:
        return Automorphism(self.field, self.conjugation)

    @cached_property
    def real_subfield_gen(self) -> FieldElement:
        """theta + conj(theta), or theta * conj(theta) when the sum degenerates (quartic: -theta^2)."""
        t = self.field.gen
        for cand in (t + self.conj(t), t * self.conj(t)):
            if len(minimal_polynomial(cand)) - 1 == self.g:
                return cand
        raise AssertionError("no generator of the real subfield among the standard candidates")

    @cached_property
    def embeddings(self) -> EmbeddingSet:
        bits = 128
        while True:
            try:
                return complex_embeddings(self.field, bits)
            except RootIsolationError:
                if bits > 4096:
                    raise
                bits *= 2

    # -- labels ------------------------------------------------------------

    @cached_property
    def labels(self) -> tuple[int, ...]:
        if self.family == "cyclotomic":
            m = self.params[0]
            return tuple(n for n in range(1, m) if math.gcd(n, m) == 1)
        return tuple(range(self.degree))

    @cached_property
    def _cyclic_generator_label(self) -> int:
        m = self.params[0]
        order = arith.euler_phi(m)
        for a in range(2, m):
            if math.gcd(a, m) == 1 and all(pow(a, order // p, m) != 1 for p in arith.factorize(order)):
                return a
        return 1  # m in (3, 4, 6): group of order 2 generated by m-1

    def exponent(self, label: int) -> int:
        """Discrete log of the automorphism tau_label w.r.t. the generator (Galois only)."""
        if self.family == "cyclotomic":
            m = self.params[0]
            a = self._cyclic_generator_label if self.degree > 2 else m - 1
            x = 1
            for e in range(self.degree):
                if x == label % m:
                    return e
                x = x * a % m
            raise ValueError(f"{label} is not a unit mod {m}")
        if self.is_galois:
            return label % self.degree
        raise UnsupportedFieldError("non-Galois field has no cyclic Galois group")

    def label_of_exponent(self, e: int) -> int:
        e %= self.degree
        if self.family == "cyclotomic":
            m = self.params[0]
            a = self._cyclic_generator_label if self.degree > 2 else m - 1
            return pow(a, e, m)
        return e

    def conj_label(self, label: int) -> int:
        if self.family == "cyclotomic":
            return self.params[0] - label
        if self.is_galois:
            return (label + self.g) % self.degree
        return label ^ 1  # canonical order puts conjugate pairs at (0,1), (2,3)

    def automorphism(self, label: int) -> Automorphism:
        return self._automorphisms[label]

    @cached_property
    def _automorphisms(self) -> dict[int, Automorphism]:
        if not self.is_galois:
            return {}
        out = {}
        if self.family == "cyclotomic":
            t = self.field.gen
            for n in self.labels:
                out[n] = Automorphism(self.field, t**n)
            return out
        gen = Automorphism(self.field, self.generator)
        img = self.field.gen
        for e in range(self.degree):
            out[e] = Automorphism(self.field, img)
            img = gen(img)
        return out

    def embedding_root(self, label: int) -> complex:
        """Approximate value of theta under the embedding with this label."""
        if self.family == "cyclotomic":
            m = self.params[0]
            return complex(mpmath.exp(2j * mpmath.pi * label / m))
        if self.is_galois:
            emb = self.embeddings
            return complex(emb.evaluate_approx(self.automorphism(label).image, 0))
        return self.embeddings.value(label)

    def embedding_index(self, label: int) -> int:
        return self.embeddings.index_of(self.embedding_root(label))

    def label_of_index(self, index: int) -> int:
        for lab in self.labels:
            if self.embedding_index(lab) == index:
                return lab
        raise ValueError(index)

    def conjugate_pairs(self) -> list[tuple[int, int]]:
        pairs, seen = [], set()
        for lab in self.labels:
            if lab in seen:
                continue
            other = self.conj_label(lab)
            seen.update((lab, other))
            pairs.append((lab, other))
        return pairs


# -- constructors -------------------------------------------------------------

def _cyclic_units(m: int) -> bool:
    if m in (1, 2, 4):
        return True
    if m % 2 == 0:
        m //= 2
        if m % 2 == 0:
            return False
    return len(arith.factorize(m)) == 1


def make_cyclotomic_cm(m: int) -> CMField:
    """Q(zeta_m) for m with cyclic unit group (m = 4, p^e, 2p^e)."""
    if m < 3 or arith.euler_phi(m) < 2:
        raise UnsupportedFieldError("need phi(m) >= 2")
    if not _cyclic_units(m):
        raise UnsupportedFieldError(f"(Z/{m}Z)* is not cyclic")
    f = NumberField(arith.cyclotomic_polynomial(m), name=f"Q(zeta_{m})")
    n = f.degree
    t = f.gen
    spec = CMField("cyclotomic", (m,), f, n // 2, t ** (m - 1))
    a = spec._cyclic_generator_label if n > 2 else m - 1
    object.__setattr__(spec, "generator", t**a)
    return spec


def make_imaginary_quadratic(d: int) -> CMField:
    """Q(sqrt(-d)) with defining polynomial x^2 + d."""
    if d <= 0 or not arith.is_squarefree(d):
        raise UnsupportedFieldError("d must be a positive squarefree integer")
    f = NumberField((d, 0, 1), name=f"Q(sqrt(-{d}))")
    conj = -f.gen
    return CMField("quadratic", (d,), f, 1, conj, conj)


def make_quartic_cm(a: int, b: int, d: int) -> CMField:
    """Q(eta), eta^2 = -a + b sqrt(d), with defining polynomial x^4 + 2a x^2 + (a^2 - b^2 d)."""
    if d <= 1 or not arith.is_squarefree(d):
        raise UnsupportedFieldError("d must be a squarefree integer > 1")
    if b == 0:
        raise UnsupportedFieldError("b = 0 gives a biquadratic (imprimitive) field")
    n0 = a * a - b * b * d
    if a <= 0 or n0 <= 0:
        raise UnsupportedFieldError("-a +- b sqrt(d) must both be negative (totally imaginary)")
    if _is_square(n0):
        raise UnsupportedFieldError("biquadratic field: a^2 - b^2 d is a square")
    f = NumberField((n0, 0, 2 * a, 0, 1), name=f"Q(sqrt(-{a}+{b}sqrt{d}))")
    t = f.gen
    if _is_square(d * n0):
        # eta2 = +- m sqrt(d) / eta1, sqrt(d) = (theta^2 + a) / b, 1/theta = -(theta^3 + 2a theta)/n0
        m = math.isqrt(n0 // d)
        sqrt_d = (t * t + a) * Fraction(1, b)
        inv_t = -(t**3 + 2 * a * t) * Fraction(1, n0)
        sigma = sqrt_d * inv_t * m
        spec = CMField("quartic-cyclic", (a, b, d), f, 2, -t, sigma)
        # orient sigma so that phi_0 o sigma has positive imaginary part
        if spec.embeddings.evaluate_approx(sigma, 0).imag < 0:
            sigma = -sigma
            spec = CMField("quartic-cyclic", (a, b, d), f, 2, -t, sigma)
        if Automorphism(f, sigma)(sigma) != -t:
            raise AssertionError("sigma^2 is not complex conjugation")
        return spec
    return CMField("quartic-nongalois", (a, b, d), f, 2, -t)


def parse_field_spec(text: str) -> CMField:
    kind, _, rest = text.strip().partition(":")
    try:
        if kind == "cyclotomic":
            return make_cyclotomic_cm(int(rest))
        if kind == "quartic":
            a, b, d = (int(x) for x in rest.split(","))
            return make_quartic_cm(a, b, d)
        if kind == "quadratic":
            return make_imaginary_quadratic(int(rest))
    except ValueError as exc:
        if isinstance(exc, UnsupportedFieldError):
            raise
        raise UnsupportedFieldError(f"malformed field spec {text!r}") from exc
    raise UnsupportedFieldError(f"unknown field family in {text!r}")


# -- CM types -----------------------------------------------------------------

@dataclass(frozen=True)
class CMType:
    """A CM type: one embedding label from each conjugate pair."""

    spec: CMField
    selected: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "selected", frozenset(self.selected))
        if len(self.selected) != self.spec.g:
            raise ValueError(f"a CM type of {self.spec} has exactly {self.spec.g} embeddings")
        labels = set(self.spec.labels)
        for lab in self.selected:
            if lab not in labels:
                raise ValueError(f"unknown embedding label {lab}")
            if self.spec.conj_label(lab) in self.selected:
                raise ValueError("a CM type cannot contain a conjugate pair")

    def __repr__(self):
        return f"CMType({self.spec.spec_string()}, {sorted(self.selected)})"

    @property
    def labels(self) -> list[int]:
        return sorted(self.selected)

    def compose(self, label: int) -> "CMType":
        """The type Phi o tau_label (Galois families)."""
        s = self.spec
        return CMType(s, frozenset(s.label_of_exponent(s.exponent(l) + s.exponent(label)) for l in self.selected))

    def conjugate(self) -> "CMType":
        return CMType(self.spec, frozenset(self.spec.conj_label(l) for l in self.selected))


def is_primitive(t: CMType) -> bool:
    """True iff the type is not induced from a proper CM subfield."""
    s = t.spec
    if not s.is_galois:
        return True  # a non-biquadratic quartic field has no CM subfield
    n = s.degree
    exps = {s.exponent(l) for l in t.selected}
    for step in range(1, n):
        if n % step == 0 and {(e + step) % n for e in exps} == exps:
            return False
    return True


def enumerate_cm_types(spec: CMField) -> list[CMType]:
    """All 2^g CM types; bit i of the counter picks the second member of pair i."""
    pairs = spec.conjugate_pairs()
    out = []
    for bits in itertools.product((0, 1), repeat=len(pairs)):
        out.append(CMType(spec, frozenset(p[b] for p, b in zip(pairs, bits))))
    return out


def equivalence_classes(spec: CMField) -> list[list[CMType]]:
    """CM types grouped under Phi ~ Phi o sigma for automorphisms sigma of K."""
    types = enumerate_cm_types(spec)
    classes: list[list[CMType]] = []
    seen: set[frozenset] = set()
    for t in types:
        if t.selected in seen:
            continue
        if spec.is_galois:
            orbit = {t.compose(l).selected for l in spec.labels}
        else:
            orbit = {t.selected, t.conjugate().selected}
        seen |= orbit
        classes.append([u for u in types if u.selected in orbit])
    return classes


def first_primitive_type(spec: CMField) -> CMType:
    for t in enumerate_cm_types(spec):
        if is_primitive(t):
            return t
    raise ImprimitiveTypeError(f"{spec} has no primitive CM type")


def parse_cm_type(spec: CMField, text: str) -> CMType:
    text = text.strip()
    if text in ("", "auto"):
        return first_primitive_type(spec)
    return CMType(spec, frozenset(int(x) for x in text.split(",")))


# -- reflex -------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ReflexData:
    """Reflex (K^, Psi) of a primitive CM type (K, Phi).

    ``kind == "galois"``: K^ = K and Psi = {phi^-1}; ``psi_labels`` are the
    automorphism labels used in the type norm.

    ``kind == "quartic"``: K = Q(eta_1), K^ = Q(omega) with
    omega = (eta_1 + eta_2)/c, and the two reflex embeddings send omega to
    (eta_1 + eta_2)/c and (eta_1 - eta_2)/c, eta_2 being a root from the
    other conjugate pair of K's polynomial.
    """

    cm_type: CMType
    reflex_field: CMField
    reflex_type: CMType
    kind: str
    psi_labels: tuple[int, ...] = ()
    scale: int = 1  # c above

    @property
    def source(self) -> CMField:
        return self.cm_type.spec

    @property
    def g_hat(self) -> int:
        return self.reflex_field.g


def _quartic_reflex_params(a: int, b: int, d: int) -> tuple[int, int, int, int]:
    """(A, B, D, c) with K^ = Q(sqrt(-A + B sqrt D)) and omega = (eta1 + eta2)/c."""
    s, D = _squarefree_decomposition(a * a - b * b * d)
    c = 1
    g = math.gcd(2 * a, 2 * s)
    for x in range(math.isqrt(g), 0, -1):
        if g % (x * x) == 0:
            c = x
            break
    return 2 * a // (c * c), 2 * s // (c * c), D, c


def reflex(t: CMType) -> ReflexData:
    if not is_primitive(t):
        raise ImprimitiveTypeError(f"{t} is not primitive")
    spec = t.spec
    if spec.is_galois:
        s = spec
        inv = tuple(sorted(s.label_of_exponent(-s.exponent(l)) for l in t.selected))
        return ReflexData(t, spec, CMType(spec, frozenset(inv)), "galois", inv)
    a, b, d = spec.params
    A, B, D, c = _quartic_reflex_params(a, b, d)
    hat = make_quartic_cm(A, B, D)
    # numeric labels of the two reflex embeddings, with eta1 = root 0 and eta2 = root 2
    emb = spec.embeddings
    eta1, eta2 = emb.value(0), emb.value(2)
    idx = {hat.embeddings.index_of((eta1 + eta2) / c), hat.embeddings.index_of((eta1 - eta2) / c)}
    return ReflexData(t, hat, CMType(hat, frozenset(idx)), "quartic", scale=c)


def _quartic_eta2_square(spec: CMField) -> FieldElement:
    """eta_2^2 = -a - b sqrt(d) as an element of K = Q(eta_1)."""
    a, b, d = spec.params
    t = spec.field.gen
    sqrt_d = (t * t + a) * Fraction(1, b)
    return -sqrt_d * b - a


def type_norm(rx: ReflexData, xi: FieldElement) -> FieldElement:
    """pi = prod_{psi in Psi} psi(xi), exact, as an element of K."""
    if xi.field != rx.reflex_field.field:
        raise ValueError("xi must lie in the reflex field")
    K = rx.source
    if rx.kind == "galois":
        out = K.field.one
        for lab in rx.psi_labels:
            out = out * K.automorphism(lab)(xi)
        return out
    # K[y]/(y^2 - Y): evaluate xi at (theta + y)/c as P0 + P1*y, then pi = P0^2 - P1^2 Y
    Y = _quartic_eta2_square(K)
    theta = K.field.gen
    c = rx.scale
    u0, u1 = theta * Fraction(1, c), K.field.from_int(1) * Fraction(1, c)
    p0, p1 = K.field.zero, K.field.zero
    for coeff in reversed(xi.num):
        # (p0 + p1 y)(u0 + u1 y) + coeff
        p0, p1 = p0 * u0 + p1 * u1 * Y + coeff, p0 * u1 + p1 * u0
    p0 = p0 * Fraction(1, xi.den)
    p1 = p1 * Fraction(1, xi.den)
    return p0 * p0 - p1 * p1 * Y


def _reflex_values_at(rx: ReflexData, xi: FieldElement, prec: int) -> list:
    """phi_j(N_Psi(xi)) for every K-embedding j (canonical order), numerically."""
    K = rx.source
    emb = complex_embeddings(K.field, prec)
    with mpmath.workprec(prec + 32):
        def ev(poly_num, den, z):
            acc = mpmath.mpc(0)
            for c in reversed(poly_num):
                acc = acc * z + c
            return acc / den

        values = []
        for j in range(len(emb)):
            z = emb.centers[j]
            if rx.kind == "galois":
                v = mpmath.mpc(1)
                for lab in rx.psi_labels:
                    img = K.automorphism(lab).image
                    v *= ev(xi.num, xi.den, ev(img.num, img.den, z))
            else:
                a, b, _ = K.params
                target = -a - (z * z + a)
                # eta2 candidates: roots from the other conjugate pair
                w = min((emb.centers[i] for i in range(len(emb)) if i // 2 != j // 2),
                        key=lambda w: abs(w * w - target))
                c = rx.scale
                v = ev(xi.num, xi.den, (z + w) / c) * ev(xi.num, xi.den, (z - w) / c)
            values.append(v)
        return emb, values


def type_norm_numeric(rx: ReflexData, xi: FieldElement, max_retries: int = 4) -> FieldElement:
    """Type norm through complex embeddings and exact verification.

    Evaluates pi at every embedding of K, solves the Vandermonde system for
    power-basis coordinates, rounds to rationals whose denominators divide the
    polynomial discriminant, and accepts only if pi * conj(pi) = N(xi) holds
    exactly.  Precision doubles on failure.
    """
    K = rx.source
    n = K.degree
    disc = abs(K.field.disc)
    size_bits = max(abs(c).bit_length() for c in xi.num) + 8
    prec = 128 + 2 * rx.g_hat * size_bits * 2
    target = norm(xi)
    for _ in range(max_retries + 1):
        emb, values = _reflex_values_at(rx, xi, prec)
        with mpmath.workprec(prec + 32):
            V = mpmath.matrix([[emb.centers[j] ** i for i in range(n)] for j in range(n)])
            sol = mpmath.lu_solve(V, mpmath.matrix(values))
            coords = []
            ok = True
            for i in range(n):
                x = sol[i]
                if abs(x.imag) > mpmath.mpf(2) ** (-prec // 4) * (1 + abs(x.real)):
                    ok = False
                    break
                approx = Fraction(str(mpmath.nstr(x.real, prec // 3, strip_zeros=False)))
                coords.append(approx.limit_denominator(disc))
        if ok:
            pi = K.field.element(coords)
            if pi * K.conj(pi) == K.field.element([target]):
                return pi
        prec *= 2
    raise PrecisionError("numeric type norm did not verify")
