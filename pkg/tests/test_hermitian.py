"""Hermitian and skew-hermitian spaces, signatures, profiles, strong tests."""

import pytest

from shimura_descent.errors import NotAdmissible, WrongModel
from shimura_descent.hermitian import (HermitianSpace, SkewHermitianSpace,
                                       associated_bilinear_form,
                                       diagonalize_hermitian_gram,
                                       is_strongly_hermitian,
                                       is_strongly_skew_hermitian,
                                       place_profile, signature_at_place)
from shimura_descent.numfield import (CMExtension, NumberField, QQ_field,
                                      gaussian_field)
from shimura_descent.quat import QuaternionAlgebra, SecondKindData


@pytest.fixture(scope="module")
def qi():
    return gaussian_field()


@pytest.fixture(scope="module")
def sqrt2():
    return NumberField([-2, 0, 1])


def test_signature_m1(qi):
    v, = QQ_field().real_embeddings()
    V = HermitianSpace(qi, [1, 1, -1])
    assert signature_at_place(V, v) == (2, 1)
    W = HermitianSpace(qi, [1, 1])
    assert signature_at_place(W, v) == (2, 0)


def test_signature_counts_sum(qi):
    v, = QQ_field().real_embeddings()
    for gram in ([1, -1], [2, 3, -5, 7], [-1, -2]):
        V = HermitianSpace(qi, gram)
        p, q = signature_at_place(V, v)
        assert p + q == V.dim


def test_profile_m1(qi):
    V = HermitianSpace(qi, [1, -1])
    prof = place_profile(V)
    assert prof.I_c == [] and prof.I_nc == [0]
    W = HermitianSpace(qi, [1, 1])
    assert place_profile(W).I_c == [0]


def test_profile_two_places(sqrt2):
    K = CMExtension(sqrt2, sqrt2.element(-1))
    V = HermitianSpace(K, [1, 1])
    prof = place_profile(V)
    assert prof.I_c == [0, 1]       # definite everywhere


def test_m2_split_signature(qi):
    v, = QQ_field().real_embeddings()
    D0 = QuaternionAlgebra(QQ_field(), -1, 2)
    V = HermitianSpace(SecondKindData(qi, D0), [1, -1])
    assert signature_at_place(V, v) == (2, 2)


def test_strongly_hermitian_m1_always(qi):
    V = HermitianSpace(qi, [1, -1, 3])
    ok, reasons = is_strongly_hermitian(V)
    assert ok
    assert any("always strongly hermitian" in r for r in reasons)


def test_strongly_hermitian_m2(qi):
    q = QQ_field()
    # split everywhere: I_ns empty, any signs pass
    V = HermitianSpace(SecondKindData(qi, QuaternionAlgebra(q, -1, 2)), [1, -1])
    assert is_strongly_hermitian(V)[0]
    # nonsplit and indefinite: noncompact nonsplit place
    W = HermitianSpace(SecondKindData(qi, QuaternionAlgebra(q, -1, -1)), [1, -1])
    ok, reasons = is_strongly_hermitian(W)
    assert not ok
    # nonsplit but definite: compact nonsplit place, admissible
    W2 = HermitianSpace(SecondKindData(qi, QuaternionAlgebra(q, -1, -1)), [1, 1])
    assert is_strongly_hermitian(W2)[0]


def test_k_valued_gram_is_flagged(qi):
    V = HermitianSpace(qi, [qi.element(1, 2), qi.element(-1)])
    assert V.warnings
    assert V.gram[0] == QQ_field().element(1)


def test_profile_invariant_under_positive_scaling(sqrt2):
    K = CMExtension(sqrt2, sqrt2.element(-2))
    x = sqrt2.gen()
    base = HermitianSpace(K, [sqrt2.element(1), x - 2])
    prof = place_profile(base)
    # 3 - x and 7 are totally positive
    scaled = HermitianSpace(K, [(3 - x), (x - 2) * 7])
    prof2 = place_profile(scaled)
    assert prof.I_c == prof2.I_c and prof.I_nc == prof2.I_nc
    assert [p.signature for p in prof.places] == \
        [p.signature for p in prof2.places]


@pytest.fixture(scope="module")
def skew_space():
    D = QuaternionAlgebra(QQ_field(), -1, -1)
    lam, mu = D.lam(), D.mu()
    return SkewHermitianSpace(D, [mu, lam * mu, mu, 2 * mu, lam * mu], lam)


def test_skew_constructor_validates():
    D = QuaternionAlgebra(QQ_field(), -1, -1)
    with pytest.raises(ValueError):
        SkewHermitianSpace(D, [D.one()], D.lam())      # gram not pure
    with pytest.raises(ValueError):
        SkewHermitianSpace(D, [D.mu()], D.one())       # r not pure
    K = gaussian_field()
    DK = QuaternionAlgebra(K, K.element(-1), K.element(-1))
    with pytest.raises(ValueError):
        SkewHermitianSpace(DK, [DK.mu()], DK.lam())    # base must be F


def test_skew_strong_acceptance_example(skew_space):
    ok, reasons = is_strongly_skew_hermitian(skew_space)
    assert ok
    prof = place_profile(skew_space)
    assert prof.I_s == [] and prof.I_c == [] and prof.I_nc == [0]
    assert skew_space.r_squared == QQ_field().element(-1)


def test_skew_strong_rejects_commuting_entry():
    D = QuaternionAlgebra(QQ_field(), -1, -1)
    lam, mu = D.lam(), D.mu()
    bad = SkewHermitianSpace(D, [lam, mu, mu, mu, mu], lam)
    ok, reasons = is_strongly_skew_hermitian(bad)
    assert not ok
    assert any("anticommute" in r for r in reasons)


def test_skew_strong_rejects_wrong_dimension():
    D = QuaternionAlgebra(QQ_field(), -1, -1)
    mu = D.mu()
    even = SkewHermitianSpace(D, [mu, mu, mu, mu], D.lam())
    assert not is_strongly_skew_hermitian(even)[0]
    small = SkewHermitianSpace(D, [mu, mu, mu], D.lam())
    ok, reasons = is_strongly_skew_hermitian(small)
    assert not ok
    assert any("5" in r for r in reasons)


def test_skew_strong_requires_Ic_equals_Is():
    # split algebra with an indefinite associated form: I_c != I_s
    D = QuaternionAlgebra(QQ_field(), -1, 2)
    mu = D.mu()
    space = SkewHermitianSpace(D, [mu] * 5, D.lam())
    ok, reasons = is_strongly_skew_hermitian(space)
    assert not ok
    assert any("I_c" in r for r in reasons)


def test_associated_bilinear_form_spec_example():
    # q = mu in (-1, 2): contribution diag(1, -2), indefinite
    D = QuaternionAlgebra(QQ_field(), -1, 2)
    v, = QQ_field().real_embeddings()
    space = SkewHermitianSpace(D, [D.mu()], D.lam())
    data = associated_bilinear_form(space, v)
    assert data["matrix"] == [[1.0, 0.0], [0.0, -2.0]]


def test_associated_bilinear_form_definite_case():
    # all q_i = mu with mu^2 < 0 at the split place: entries c = 1, -b > 0
    D = QuaternionAlgebra(QQ_field(), 2, -1)
    v, = QQ_field().real_embeddings()
    space = SkewHermitianSpace(D, [D.mu(), D.mu()], D.lam())
    data = associated_bilinear_form(space, v)
    assert data["matrix"] == [[1.0, 0, 0, 0], [0, 1.0, 0, 0],
                              [0, 0, 1.0, 0], [0, 0, 0, 1.0]]
    prof = place_profile(space)
    assert prof.I_c == [0] == prof.I_s


def test_associated_bilinear_form_n1_shape():
    D = QuaternionAlgebra(QQ_field(), 2, -1)
    v, = QQ_field().real_embeddings()
    space = SkewHermitianSpace(D, [D.mu()], D.lam())
    data = associated_bilinear_form(space, v)
    assert len(data["matrix"]) == 2


def test_associated_bilinear_form_needs_split_place(skew_space):
    v, = QQ_field().real_embeddings()
    with pytest.raises(WrongModel):
        associated_bilinear_form(skew_space, v)


def test_strong_implies_definite_at_split_places():
    F = NumberField([-2, 0, 1])
    x = F.gen()
    # nonsplit at both places (a, b totally negative): I_s empty
    D = QuaternionAlgebra(F, x - 2, -1)
    mu = D.mu()
    lam = D.lam()
    space = SkewHermitianSpace(D, [mu, lam * mu, mu, mu, lam * mu], lam)
    ok, _ = is_strongly_skew_hermitian(space)
    assert ok
    prof = place_profile(space)
    for idx in prof.I_s:
        assert idx in prof.I_c


def test_diagonalize_hermitian_gram(qi):
    one = qi.one()
    two = qi.element(2)
    i = qi.element(0, 1)
    entries = [[two, i], [i.conj(), one]]
    diag, basis = diagonalize_hermitian_gram(
        entries, lambda z: z.conj(), qi.zero())
    assert len(diag) == 2
    # the transformed Gram matrix is diagonal with the reported entries
    for r, row in enumerate(basis):
        for s, col in enumerate(basis):
            val = qi.zero()
            for a in range(2):
                for b in range(2):
                    val = val + row[a].conj() * entries[a][b] * col[b]
            if r == s:
                assert val == diag[r]
            else:
                assert val.is_zero()


def test_diagonalize_with_isotropic_pivot(qi):
    zero, one = qi.zero(), qi.one()
    entries = [[zero, one], [one, zero]]
    diag, basis = diagonalize_hermitian_gram(
        entries, lambda z: z.conj(), zero)
    assert not diag[0].is_zero() and not diag[1].is_zero()


def test_space_serialization(qi, skew_space):
    V = HermitianSpace(qi, [1, -1])
    data = V.to_json()
    assert data["kind"] == "hermitian" and len(data["gram"]) == 2
    data2 = skew_space.to_json()
    assert data2["kind"] == "skew" and "r" in data2
