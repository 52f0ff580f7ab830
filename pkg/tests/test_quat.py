"""Quaternion algebras: arithmetic, splitting, phi/psi models, second kind."""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shimura_descent.errors import (DivisionByZero, NoComplement,
                                    NotAdmissible, WrongModel)
from shimura_descent.numfield import NumberField, QQ_field, gaussian_field
from shimura_descent.quat import (NonsplitPsi, Quaternion, QuaternionAlgebra,
                                  SecondKindData, anticommuting_complement,
                                  canonical_conjugation, norm_form_isotropic_at,
                                  pure_part_tools, quat_arith,
                                  real_place_splitting, splitting_iso_phi)


@pytest.fixture(scope="module")
def hamilton():
    return QuaternionAlgebra(QQ_field(), -1, -1)


@pytest.fixture(scope="module")
def split_alg():
    return QuaternionAlgebra(QQ_field(), -1, 2)


def test_basis_relations(hamilton):
    lam, mu = hamilton.lam(), hamilton.mu()
    assert quat_arith(lam, None, "sigma") == -lam
    assert quat_arith(lam, None, "nrd") == QQ_field().element(1)  # -a = 1
    assert (lam * mu + mu * lam).is_zero()
    assert lam * lam == hamilton.scalar(-1)


def test_associativity_on_basis_triples(hamilton):
    basis = hamilton.basis()
    for x in basis:
        for y in basis:
            for z in basis:
                assert (x * y) * z == x * (y * z)


def test_trd_nrd_land_in_base(hamilton):
    q = hamilton.element([1, 2, 3, 4])
    assert quat_arith(q, None, "trd") == QQ_field().element(2)
    # Nrd(q) = q sigma(q)
    prod = q * q.sigma()
    assert prod.coeffs[1].is_zero() and prod.coeffs[2].is_zero()
    assert prod.coeffs[0] == q.nrd()
    assert q.nrd() == QQ_field().element(1 + 1 + 4 + 9 + 16 - 1)


rand_coeff = st.integers(min_value=-5, max_value=5)


@given(x=st.tuples(*[rand_coeff] * 4), y=st.tuples(*[rand_coeff] * 4))
@settings(max_examples=40, deadline=None)
def test_sigma_is_antiautomorphism(x, y):
    alg = QuaternionAlgebra(QQ_field(), -1, -1)
    a, b = alg.element(list(x)), alg.element(list(y))
    assert (a * b).sigma() == b.sigma() * a.sigma()
    assert (a * b).nrd() == a.nrd() * b.nrd()
    assert (a + b).trd() == a.trd() + b.trd()


def test_inverse(hamilton):
    q = hamilton.element([1, 2, -1, 3])
    assert q * q.inv() == hamilton.one()
    with pytest.raises(DivisionByZero):
        hamilton.zero().inv()


def test_pure_part_tools(hamilton):
    lam, mu = hamilton.lam(), hamilton.mu()
    assert not pure_part_tools(hamilton.one(), "is_pure")
    assert pure_part_tools(mu + lam * mu, "is_pure")
    comp = pure_part_tools(lam, "anticommuting_complement")
    assert (lam * comp + comp * lam).is_zero()
    assert comp.is_pure() and not comp.nrd().is_zero()
    with pytest.raises(NoComplement):
        anticommuting_complement(hamilton.one())
    with pytest.raises(NoComplement):
        anticommuting_complement(hamilton.zero())


def test_complement_is_deterministic(split_alg):
    q = split_alg.element([0, 1, 2, 0])
    assert anticommuting_complement(q) == anticommuting_complement(q)


def test_real_place_splitting_table():
    q = QQ_field()
    v, = q.real_embeddings()
    assert real_place_splitting(QuaternionAlgebra(q, -1, -1), v) == "nonsplit"
    assert real_place_splitting(QuaternionAlgebra(q, 1, -7), v) == "split"
    assert real_place_splitting(QuaternionAlgebra(q, -1, 2), v) == "split"


def test_splitting_agrees_with_isotropy_oracle():
    rng = np.random.default_rng(7)
    fields = [QQ_field(), NumberField([-2, 0, 1])]
    for f in fields:
        embs = f.real_embeddings()
        for _ in range(25):
            coeffs = rng.integers(-9, 10, size=2 * f.degree)
            a = f.element([int(c) for c in coeffs[: f.degree]])
            b = f.element([int(c) for c in coeffs[f.degree:]])
            if a.is_zero() or b.is_zero():
                continue
            alg = QuaternionAlgebra(f, a, b)
            for v in embs:
                nonsplit = real_place_splitting(alg, v) == "nonsplit"
                assert nonsplit == (not norm_form_isotropic_at(alg, v))


def _matmul2(A, B):
    return [[A[0][0] * B[0][0] + A[0][1] * B[1][0],
             A[0][0] * B[0][1] + A[0][1] * B[1][1]],
            [A[1][0] * B[0][0] + A[1][1] * B[1][0],
             A[1][0] * B[0][1] + A[1][1] * B[1][1]]]


def test_phi_structure_and_homomorphism(split_alg):
    phi = splitting_iso_phi(split_alg)
    L = phi.L
    lam_img = phi(split_alg.lam())
    assert lam_img[0][0] == L.sq() and lam_img[1][1] == -L.sq()
    assert lam_img[0][1].is_zero() and lam_img[1][0].is_zero()
    mu_img = phi(split_alg.mu())
    assert mu_img[0][1] == L.element(2) and mu_img[1][0] == L.one()
    # phi(lam)^2 = a I
    sq = _matmul2(lam_img, lam_img)
    assert sq[0][0] == L.element(-1) and sq[1][1] == L.element(-1)
    # anticommutation in the image
    lm = _matmul2(lam_img, mu_img)
    ml = _matmul2(mu_img, lam_img)
    assert all(lm[i][j] == -ml[i][j] for i in range(2) for j in range(2))
    # homomorphism on all 16 basis pairs, exactly
    for x in split_alg.basis():
        for y in split_alg.basis():
            lhs = phi(x * y)
            rhs = _matmul2(phi(x), phi(y))
            assert all(lhs[i][j] == rhs[i][j]
                       for i in range(2) for j in range(2))


def test_phi_sends_l_to_diagonal(split_alg):
    phi = splitting_iso_phi(split_alg)
    elt = split_alg.element([3, 2, 0, 0])   # 3 + 2 lam lies in L
    img = phi(elt)
    assert img[0][1].is_zero() and img[1][0].is_zero()


def test_psi_nonsplit_model(hamilton):
    v, = QQ_field().real_embeddings()
    psi = NonsplitPsi(hamilton, v, hamilton.lam(), hamilton.mu())
    e2 = np.array([[1j, 0], [0, -1j]])
    e3 = np.array([[0, 1], [-1, 0]])
    e4 = np.array([[0, 1j], [1j, 0]])
    assert np.allclose(psi(hamilton.lam()), e2)
    assert np.allclose(psi(hamilton.mu()), e3)
    assert np.allclose(psi(hamilton.one()), np.eye(2))
    # psi(r s) = sqrt(u t) e4 with u = t = -1
    assert np.allclose(psi(hamilton.lam() * hamilton.mu()), e4)
    # R-algebra homomorphism on basis pairs, to 1e-9
    for x in hamilton.basis():
        for y in hamilton.basis():
            lhs = np.asarray(psi(x * y))
            rhs = np.asarray(psi(x)) @ np.asarray(psi(y))
            assert np.abs(lhs - rhs).max() < 1e-9


def test_psi_rejects_split_place(split_alg):
    v, = QQ_field().real_embeddings()
    with pytest.raises(WrongModel):
        NonsplitPsi(split_alg, v, split_alg.lam(), split_alg.mu())


def test_psi_images_are_hamilton_matrices(hamilton):
    v, = QQ_field().real_embeddings()
    psi = NonsplitPsi(hamilton, v, hamilton.lam(), hamilton.mu())
    rng = np.random.default_rng(3)
    for _ in range(10):
        q = hamilton.element([int(c) for c in rng.integers(-4, 5, size=4)])
        m = np.asarray(psi(q))
        assert abs(m[0, 0] - np.conj(m[1, 1])) < 1e-12
        assert abs(m[0, 1] + np.conj(m[1, 0])) < 1e-12


def test_second_kind_package(hamilton):
    K = gaussian_field()
    data = SecondKindData(K, hamilton)
    rep = canonical_conjugation(data)
    assert all(rep[k] for k in ("alpha_squared_is_identity",
                                "alpha_commutes_with_J",
                                "alpha_J_equals_canonical"))
    D = data.D
    lam = D.lam()
    assert data.alpha(lam) == lam
    i_scalar = D.scalar(K.element(0, 1))
    assert data.alpha(i_scalar) == -i_scalar
    # alpha J on a pure quaternion of D0 equals the canonical involution
    p = D.element([K.zero(), K.element(2), K.element(-1), K.element(3)])
    assert data.alpha(data.J(p)) == -p
    # J restricted to K-scalars is iota
    z = D.scalar(K.element(1, 4))
    assert data.J(z) == D.scalar(K.element(1, -4))


def test_second_kind_degenerate_case():
    K = gaussian_field()
    data = SecondKindData(K, None)
    rep = canonical_conjugation(data)
    assert rep["degree_over_K"] == 1
    assert all(rep[k] for k in ("alpha_squared_is_identity",
                                "alpha_commutes_with_J",
                                "alpha_J_equals_canonical"))
    z = K.element(3, 2)
    assert data.alpha(z) == z.conj()
    assert data.J(z) == z.conj()


def test_second_kind_rejects_higher_degree(hamilton):
    K = gaussian_field()
    with pytest.raises(NotAdmissible):
        SecondKindData(K, hamilton, degree_over_K=3)


def test_alpha_unique_up_to_inner(hamilton):
    """A second conjugation built from a twist differs from alpha by an
    inner automorphism, hence agrees with it on K."""
    K = gaussian_field()
    data = SecondKindData(K, hamilton)
    D = data.D
    u = D.lam() + D.mu()          # invertible twist
    uinv = u.inv()

    def alpha_prime(x):
        return u * data.alpha(x) * uinv

    # alpha' o alpha^{-1} = int(u) fixes K pointwise
    for z in (K.element(2, 3), K.element(-1, 1)):
        zq = D.scalar(z)
        assert alpha_prime(data.alpha(zq)) == zq
    # and alpha' is still a conjugation of the second kind
    i_scalar = D.scalar(K.element(0, 1))
    assert alpha_prime(i_scalar) == -i_scalar


def test_quaternion_serialization(hamilton):
    data = hamilton.to_json()
    assert data["over"] == "F"
    q = hamilton.element([1, 2, 3, 4])
    assert len(q.to_json()) == 4
