from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from cmweil import arith
from cmweil.numfield import (
    FieldMismatchError,
    NumberField,
    RamifiedPrimeError,
    complex_embeddings,
    element_arithmetic,
    generates_field,
    integer_norm,
    minimal_polynomial,
    norm,
    norm_form,
    reduce_mod_root,
    roots_mod_r,
)

Q5 = NumberField(arith.cyclotomic_polynomial(5))
Q7 = NumberField(arith.cyclotomic_polynomial(7))
QUARTIC = NumberField((5, 0, 30, 0, 1))


def elements(field, bound=30):
    return st.lists(st.integers(-bound, bound), min_size=field.degree, max_size=field.degree).map(field.element)


def test_discriminants():
    # sympy.discriminant oracle
    assert Q5.disc == 125
    assert Q7.disc == -16807
    assert QUARTIC.disc == 61952000
    assert NumberField(arith.cyclotomic_polynomial(17)).disc == 2862423051509815793


def test_norms_frozen():
    # sympy.resultant oracle
    assert integer_norm(Q5.element([3, -5, 7, 2])) == 5801
    assert integer_norm(Q7.element([1, 1, 0, -2, 0, 4])) == 9199
    assert norm(Q5.gen - 1) == 5


def test_minimal_polynomial():
    z = Q5.gen
    assert minimal_polynomial(z + z**4) == [-1, 1, 1]
    assert minimal_polynomial(Q5.from_int(3)) == [-3, 1]
    assert generates_field(z) and not generates_field(z + z**4)
    assert minimal_polynomial(QUARTIC.gen) == [5, 0, 30, 0, 1]


@given(elements(Q7), elements(Q7))
def test_norm_multiplicative(a, b):
    assert norm(a * b) == norm(a) * norm(b)


@given(elements(Q5))
def test_norm_form_agrees_with_resultant(a):
    terms = norm_form(Q5)
    val = 0
    for e, c in terms:
        t = c
        for x, k in zip(a.num, e):
            t *= x**k
        val += t
    assert val == integer_norm(a)


@given(elements(QUARTIC), elements(QUARTIC), elements(QUARTIC))
def test_ring_axioms(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert (a * b) * c == a * (b * c)
    assert a - a == QUARTIC.zero


def test_field_mismatch():
    with pytest.raises(FieldMismatchError):
        element_arithmetic(Q5.gen, Q7.gen, "add")


def test_roots_mod_r():
    assert roots_mod_r(Q5, 1021) == [589, 676, 802, 995]
    assert roots_mod_r(Q7, 29) == [7, 16, 20, 23, 24, 25]
    assert roots_mod_r(Q5, 7) == []
    with pytest.raises(RamifiedPrimeError):
        roots_mod_r(Q5, 5)


@given(elements(Q5), elements(Q5))
def test_reduction_is_a_ring_map(a, b):
    for t in roots_mod_r(Q5, 1021):
        assert reduce_mod_root(a * b, t, 1021) == reduce_mod_root(a, t, 1021) * reduce_mod_root(b, t, 1021) % 1021
        assert reduce_mod_root(a + b, t, 1021) == (reduce_mod_root(a, t, 1021) + reduce_mod_root(b, t, 1021)) % 1021


def test_reduction_with_denominator():
    half = QUARTIC.element([Fraction(1, 2)])
    assert reduce_mod_root(half, 3, 1021) * 2 % 1021 == 1


def test_embeddings_are_certified_and_ordered():
    emb = complex_embeddings(Q5, 128)
    assert emb.is_totally_complex()
    # upper member of each conjugate pair first
    for j in range(0, 4, 2):
        assert emb.value(j).imag > 0 and abs(emb.value(j).conjugate() - emb.value(j + 1)) < 1e-30
    with mpmath.workprec(400):
        units = [mpmath.exp(2j * mpmath.pi * m / 5) for m in (1, 2, 3, 4)]
        for j in range(4):
            box = emb.evaluate(Q5.gen, j)
            exact = min(units, key=lambda u: abs(u - emb.centers[j]))
            assert mpmath.mpf(box.real.a) <= exact.real <= mpmath.mpf(box.real.b)
            assert mpmath.mpf(box.imag.a) <= exact.imag <= mpmath.mpf(box.imag.b)
            assert mpmath.mpf(box.real.b) - mpmath.mpf(box.real.a) < mpmath.mpf(2) ** -100


def test_purely_imaginary_roots_sort_by_modulus():
    emb = complex_embeddings(QUARTIC, 128)
    assert 0 < emb.value(0).imag < emb.value(2).imag
