"""Exact number field arithmetic, embeddings and CM extensions."""

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shimura_descent.errors import DivisionByZero, NotTotallyReal
from shimura_descent.numfield import (CMExtension, NumberField, QQ_field,
                                      cm_conjugate, gaussian_field,
                                      isolate_real_roots, nf_arith, rat,
                                      totality_check, totally_positive)


@pytest.fixture(scope="module")
def sqrt2():
    return NumberField([-2, 0, 1])


@pytest.fixture(scope="module")
def sqrt5():
    return NumberField([-5, 0, 1])


def test_constructor_validates():
    with pytest.raises(ValueError):
        NumberField([2, 0, 2])        # not monic
    with pytest.raises(ValueError):
        NumberField([0, 0, 1])        # x^2 is not squarefree
    with pytest.raises(ValueError):
        NumberField([1])              # degree zero


def test_gen_squares_to_two(sqrt2):
    x = sqrt2.gen()
    assert nf_arith(x, x, "mul") == sqrt2.element(2)


def test_inverse_of_generator(sqrt2):
    x = sqrt2.gen()
    inv = nf_arith(x, None, "inv")
    assert inv == sqrt2.element([0, Fraction(1, 2)])
    assert x * inv == sqrt2.one()


def test_add_cancels(sqrt2):
    x = sqrt2.gen()
    assert (1 + x) + (1 - x) == sqrt2.element(2)


def test_inversion_of_zero(sqrt2):
    with pytest.raises(DivisionByZero):
        sqrt2.zero().inv()


def test_rationals_as_degree_one_field():
    q = QQ_field()
    v, = q.real_embeddings()
    e = q.element(Fraction(7, 3))
    assert v(e) == pytest.approx(7 / 3, abs=1e-15)


def test_sqrt2_embeddings_ordered(sqrt2):
    v1, v2 = sqrt2.real_embeddings()
    x = sqrt2.gen()
    assert v1(x) == pytest.approx(-math.sqrt(2), abs=1e-12)
    assert v2(x) == pytest.approx(math.sqrt(2), abs=1e-12)


def test_golden_ratio_values(sqrt5):
    e = (sqrt5.gen() + 1) * Fraction(1, 2)
    vals = sorted(v(e) for v in sqrt5.real_embeddings())
    assert vals[0] == pytest.approx((1 - math.sqrt(5)) / 2, abs=1e-12)
    assert vals[1] == pytest.approx((1 + math.sqrt(5)) / 2, abs=1e-12)


def test_embeddings_of_non_totally_real_field():
    f = NumberField([2, 0, 1])  # x^2 + 2
    with pytest.raises(NotTotallyReal):
        f.real_embeddings()
    assert not totality_check(f, None, "totally_real_field")


def test_totally_negative(sqrt2):
    q = QQ_field()
    assert totality_check(q, q.element(-1), "totally_negative")
    x = sqrt2.gen()
    assert not totality_check(sqrt2, x, "totally_negative")
    assert totality_check(sqrt2, x - 2, "totally_negative")
    assert not totality_check(sqrt2, sqrt2.zero(), "totally_negative")


def test_totality_stable_under_precision(sqrt2):
    x = sqrt2.gen()
    for prec in (64, 128, 256):
        signs = [v.sign(x - 2) for v in sqrt2.real_embeddings(prec)]
        assert signs == [-1, -1]


def test_embedding_is_ring_hom(sqrt2):
    v1, v2 = sqrt2.real_embeddings()
    a = sqrt2.element([Fraction(1, 3), 2])
    b = sqrt2.element([-1, Fraction(5, 7)])
    for v in (v1, v2):
        assert v(a * b) == pytest.approx(v(a) * v(b), rel=1e-12)
        assert v(a + b) == pytest.approx(v(a) + v(b), rel=1e-12)


small_rats = st.fractions(min_value=-10, max_value=10, max_denominator=12)


@given(a0=small_rats, a1=small_rats, b0=small_rats, b1=small_rats)
@settings(max_examples=40, deadline=None)
def test_field_arithmetic_properties(a0, a1, b0, b1):
    f = NumberField([-2, 0, 1])
    a = f.element([a0, a1])
    b = f.element([b0, b1])
    assert a * b == b * a
    assert (a + b) * (a - b) == a * a - b * b
    if not a.is_zero():
        assert a * a.inv() == f.one()


def test_cm_extension_requires_negative_delta(sqrt2):
    with pytest.raises(ValueError):
        CMExtension(sqrt2, sqrt2.gen())  # mixed signs
    with pytest.raises(NotTotallyReal):
        CMExtension(NumberField([2, 0, 1]), None)


def test_cm_conjugation_gaussian():
    K = gaussian_field()
    z = K.element(3, 2)
    assert cm_conjugate(K, z) == K.element(3, -2)
    assert cm_conjugate(K, (3, 2)) == K.element(3, -2)
    w = K.element(5)
    assert cm_conjugate(K, w) == w


@given(a=small_rats, b=small_rats)
@settings(max_examples=30, deadline=None)
def test_cm_conjugation_is_involution(a, b):
    K = gaussian_field()
    z = K.element(a, b)
    assert z.conj().conj() == z
    assert (z.conj() == z) == z.b.is_zero()


def test_cm_arithmetic_and_embedding():
    K = gaussian_field()
    z = K.element(3, 2)
    w = K.element(-1, 5)
    assert (z * w).a == K.base.element(3 * (-1) - 2 * 5)
    emb = K.embeddings()[0]
    assert emb(z) == pytest.approx(complex(3, 2), abs=1e-12)
    assert z * z.inv() == K.one()


def test_totally_positive(sqrt2):
    assert totally_positive(sqrt2, sqrt2.element(3))
    assert not totally_positive(sqrt2, sqrt2.gen())


def test_root_isolation_with_rational_roots():
    # (x-1)(x-2)(x+3): rational roots land on bisection midpoints
    poly = [rat(c) for c in [6, -7, 0, 1]]
    ivs = isolate_real_roots(poly)
    assert len(ivs) == 3


def test_serialization_round_trip(sqrt2):
    data = sqrt2.to_json()
    assert data == {"min_poly": [-2, 0, 1]}
    again = NumberField.from_json(data)
    assert again == sqrt2
    K = CMExtension(sqrt2, sqrt2.gen() - 2)
    K2 = CMExtension.from_json(K.to_json())
    assert K2 == K
    el = sqrt2.element([Fraction(1, 2), 3])
    assert el.to_json() == ["1/2", "3/1"]
