"""Quaternion algebras (a,b/F) with the canonical involution, real-place
splitting, the splitting isomorphism into 2x2 matrices over L = F(lambda),
the nonsplit model into Hamilton quaternions, and the second-kind package
(J, canonical conjugation alpha) on D0 tensor K.

The base of an algebra is either a totally real NumberField or a CMExtension;
quaternion coefficients live in that base and all arithmetic is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import (DivisionByZero, NoComplement, NotAdmissible, WrongModel)
from .numfield import (CMElement, CMEmbedding, CMExtension, FieldElement,
                       NumberField, RealEmbedding, rat)


def _domain_zero(base):
    return base.zero()


def _domain_one(base):
    return base.one()


class QuaternionAlgebra:
    """D = (a, b / base) with basis {1, lam, mu, lam*mu}, lam*mu = -mu*lam."""

    def __init__(self, base, a, b):
        self.base = base
        self.a = base.element(a)
        self.b = base.element(b)
        if self.a.is_zero() or self.b.is_zero():
            raise ValueError("a and b must be nonzero")

    def __repr__(self):
        return f"QuaternionAlgebra(a={self.a!r}, b={self.b!r})"

    def __eq__(self, other):
        return (isinstance(other, QuaternionAlgebra) and self.base == other.base
                and self.a == other.a and self.b == other.b)

    def __hash__(self):
        return hash((self.a, self.b))

    def element(self, coeffs) -> "Quaternion":
        if isinstance(coeffs, Quaternion):
            if coeffs.algebra != self:
                raise ValueError("quaternion from a different algebra")
            return coeffs
        cs = [self.base.element(c) for c in coeffs]
        if len(cs) != 4:
            raise ValueError("need four coordinates")
        return Quaternion(self, tuple(cs))

    def zero(self) -> "Quaternion":
        z = _domain_zero(self.base)
        return Quaternion(self, (z, z, z, z))

    def one(self) -> "Quaternion":
        z = _domain_zero(self.base)
        return Quaternion(self, (_domain_one(self.base), z, z, z))

    def lam(self) -> "Quaternion":
        z = _domain_zero(self.base)
        return Quaternion(self, (z, _domain_one(self.base), z, z))

    def mu(self) -> "Quaternion":
        z = _domain_zero(self.base)
        return Quaternion(self, (z, z, _domain_one(self.base), z))

    def lammu(self) -> "Quaternion":
        z = _domain_zero(self.base)
        return Quaternion(self, (z, z, z, _domain_one(self.base)))

    def basis(self) -> list["Quaternion"]:
        return [self.one(), self.lam(), self.mu(), self.lammu()]

    def scalar(self, c) -> "Quaternion":
        z = _domain_zero(self.base)
        return Quaternion(self, (self.base.element(c), z, z, z))

    def to_json(self):
        over = "K" if isinstance(self.base, CMExtension) else "F"
        a = self.a.to_json() if over == "F" else self.a.a.to_json()
        b = self.b.to_json() if over == "F" else self.b.a.to_json()
        return {"a": a, "b": b, "over": over}


@dataclass(frozen=True)
class Quaternion:
    """x0 + x1*lam + x2*mu + x3*lam*mu, coefficients in the base field."""

    algebra: QuaternionAlgebra
    coeffs: tuple

    def _check(self, other) -> "Quaternion":
        if isinstance(other, Quaternion):
            if other.algebra != self.algebra:
                raise ValueError("quaternions from different algebras")
            return other
        return self.algebra.scalar(other)

    def __add__(self, other):
        o = self._check(other)
        return Quaternion(self.algebra,
                          tuple(a + b for a, b in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return Quaternion(self.algebra, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        o = self._check(other)
        x0, x1, x2, x3 = self.coeffs
        y0, y1, y2, y3 = o.coeffs
        a, b = self.algebra.a, self.algebra.b
        ab = a * b
        z0 = x0 * y0 + a * (x1 * y1) + b * (x2 * y2) - ab * (x3 * y3)
        z1 = x0 * y1 + x1 * y0 - b * (x2 * y3) + b * (x3 * y2)
        z2 = x0 * y2 + x2 * y0 + a * (x1 * y3) - a * (x3 * y1)
        z3 = x0 * y3 + x3 * y0 + x1 * y2 - x2 * y1
        return Quaternion(self.algebra, (z0, z1, z2, z3))

    def __rmul__(self, other):
        return self._check(other) * self

    def sigma(self) -> "Quaternion":
        """Canonical involution: negates the pure part."""
        x0, x1, x2, x3 = self.coeffs
        return Quaternion(self.algebra, (x0, -x1, -x2, -x3))

    def trd(self):
        """Reduced trace, as a base-field element."""
        return self.coeffs[0] + self.coeffs[0]

    def nrd(self):
        """Reduced norm q * sigma(q), as a base-field element."""
        x0, x1, x2, x3 = self.coeffs
        a, b = self.algebra.a, self.algebra.b
        return x0 * x0 - a * (x1 * x1) - b * (x2 * x2) + a * b * (x3 * x3)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def is_pure(self) -> bool:
        return self.coeffs[0].is_zero()

    def pure_part(self) -> "Quaternion":
        z = _domain_zero(self.algebra.base)
        return Quaternion(self.algebra, (z,) + self.coeffs[1:])

    def inv(self) -> "Quaternion":
        n = self.nrd()
        if n.is_zero():
            raise DivisionByZero("quaternion has reduced norm zero")
        ninv = n.inv()
        s = self.sigma()
        return Quaternion(self.algebra, tuple(c * ninv for c in s.coeffs))

    def __eq__(self, other):
        try:
            o = self._check(other)
        except (ValueError, TypeError):
            return NotImplemented
        return self.coeffs == o.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"Quaternion({list(self.coeffs)!r})"

    def to_json(self):
        return [c.to_json() for c in self.coeffs]


def quat_arith(x: Quaternion, y: Quaternion | None, op: str):
    """Dispatch head for quaternion operations."""
    if op == "mul":
        return x * y
    if op == "sigma":
        return x.sigma()
    if op == "nrd":
        return x.nrd()
    if op == "trd":
        return x.trd()
    raise ValueError(f"unknown op {op!r}")


# ---------------------------------------------------------------------------
# pure-part tools

def pure_part_tools(q: Quaternion, mode: str):
    if mode == "is_pure":
        return q.is_pure()
    if mode == "anticommuting_complement":
        return anticommuting_complement(q)
    raise ValueError(f"unknown mode {mode!r}")


def anticommuting_complement(q: Quaternion) -> Quaternion:
    """A pure invertible q' with q q' = -q' q.

    For pure p, q the anticommutator is the scalar
    2(a x1 y1 + b x2 y2 - ab x3 y3); the solution plane of that linear
    condition is scanned in reduced-echelon order and the first candidate
    with nonzero reduced norm wins, so the choice is deterministic.
    """
    if q.is_zero() or not q.is_pure() or q.nrd().is_zero():
        raise NoComplement("need a pure invertible quaternion")
    alg = q.algebra
    a, b = alg.a, alg.b
    _, x1, x2, x3 = q.coeffs
    row = [a * x1, b * x2, -(a * b) * x3]
    pivot = next(i for i in range(3) if not row[i].is_zero())
    piv_inv = row[pivot].inv()
    one = _domain_one(alg.base)
    zero = _domain_zero(alg.base)
    basis = []
    for j in range(3):
        if j == pivot:
            continue
        vec = [zero, zero, zero]
        vec[j] = one
        vec[pivot] = -(row[j] * piv_inv)
        basis.append(vec)
    v1, v2 = basis
    candidates = [v1, v2,
                  [p + r for p, r in zip(v1, v2)],
                  [p - r for p, r in zip(v1, v2)],
                  [p + r + r for p, r in zip(v1, v2)],
                  [p + p + r for p, r in zip(v1, v2)]]
    for cand in candidates:
        out = Quaternion(alg, (zero, cand[0], cand[1], cand[2]))
        if not out.nrd().is_zero():
            return out
    raise NoComplement("no invertible anticommuting complement found")


# ---------------------------------------------------------------------------
# real places

def real_place_splitting(alg: QuaternionAlgebra, v: RealEmbedding) -> str:
    """'split' or 'nonsplit' for D tensor_{F,v} R; nonsplit iff v(a), v(b) < 0."""
    if not isinstance(alg.base, NumberField):
        raise ValueError("real-place splitting needs an algebra over F")
    if v.sign(alg.a) < 0 and v.sign(alg.b) < 0:
        return "nonsplit"
    return "split"


def norm_form_isotropic_at(alg: QuaternionAlgebra, v: RealEmbedding) -> bool:
    """Brute-force oracle: is x^2 - a y^2 - b z^2 + ab w^2 isotropic at v?

    Decided by exact sign inspection of the diagonal form
    (1, -v(a), -v(b), v(a)v(b)).
    """
    sa, sb = v.sign(alg.a), v.sign(alg.b)
    signs = {1, -sa, -sb, sa * sb}
    return 1 in signs and -1 in signs


# ---------------------------------------------------------------------------
# quadratic extension L = base(lambda) and the splitting isomorphism phi

class QuadExt:
    """L = base(sq) with sq^2 = a; elements are pairs u + w*sq."""

    def __init__(self, base, a):
        self.base = base
        self.a = base.element(a)

    def element(self, u, w=None) -> "QuadExtElement":
        if isinstance(u, QuadExtElement):
            if u.ext is not self and u.ext != self:
                raise ValueError("element of a different extension")
            return u
        w = self.base.zero() if w is None else self.base.element(w)
        return QuadExtElement(self, self.base.element(u), w)

    def zero(self):
        return self.element(self.base.zero())

    def one(self):
        return self.element(self.base.one())

    def sq(self):
        return QuadExtElement(self, self.base.zero(), self.base.one())

    def __eq__(self, other):
        return (isinstance(other, QuadExt) and self.base == other.base
                and self.a == other.a)

    def __hash__(self):
        return hash(("QuadExt", self.a))


@dataclass(frozen=True)
class QuadExtElement:
    ext: QuadExt
    u: object
    w: object

    def _check(self, other):
        if isinstance(other, QuadExtElement):
            if other.ext != self.ext:
                raise ValueError("elements of different extensions")
            return other
        return self.ext.element(other)

    def __add__(self, other):
        o = self._check(other)
        return QuadExtElement(self.ext, self.u + o.u, self.w + o.w)

    __radd__ = __add__

    def __neg__(self):
        return QuadExtElement(self.ext, -self.u, -self.w)

    def __sub__(self, other):
        return self + (-self._check(other))

    def __mul__(self, other):
        o = self._check(other)
        a = self.ext.a
        return QuadExtElement(self.ext,
                              self.u * o.u + a * (self.w * o.w),
                              self.u * o.w + self.w * o.u)

    __rmul__ = __mul__

    def conj(self):
        """The nontrivial base-automorphism of L: sq -> -sq."""
        return QuadExtElement(self.ext, self.u, -self.w)

    def inv(self):
        n = self.u * self.u - self.ext.a * (self.w * self.w)
        if n.is_zero():
            raise DivisionByZero("zero or split-norm element of L")
        ninv = n.inv()
        return QuadExtElement(self.ext, self.u * ninv, -(self.w * ninv))

    def is_zero(self):
        return self.u.is_zero() and self.w.is_zero()

    def __eq__(self, other):
        try:
            o = self._check(other)
        except (ValueError, TypeError):
            return NotImplemented
        return self.u == o.u and self.w == o.w

    def __hash__(self):
        return hash((self.u, self.w))


class LEmbedding:
    """tau: L -> C extending a place of the base, sq on the positive branch.

    If v(a) > 0 then tau(sq) is the positive real square root; otherwise
    tau(sq) = +i sqrt(|v(a)|).
    """

    def __init__(self, ext: QuadExt, base_embedding):
        self.ext = ext
        self.base_embedding = base_embedding
        va = self._embed_base(ext.a)
        if abs(va.imag) > 1e-12 * (1 + abs(va)):
            raise ValueError("sq^2 must embed to a real number")
        va = va.real
        self.sq_image = complex(va ** 0.5, 0.0) if va >= 0 \
            else complex(0.0, (-va) ** 0.5)

    def _embed_base(self, x) -> complex:
        v = self.base_embedding
        if isinstance(v, RealEmbedding):
            return complex(v(x), 0.0)
        return v(x)

    def __call__(self, x: QuadExtElement) -> complex:
        x = self.ext.element(x)
        return self._embed_base(x.u) + self._embed_base(x.w) * self.sq_image


class SplittingPhi:
    """phi: D tensor L -> M_2(L) with phi(lam) = diag(lam, -lam),
    phi(mu) = [[0, mu^2], [1, 0]].

    `pure` and `partner` are the anticommuting pure quaternions playing the
    roles of lambda and mu; they default to the algebra's basis elements.
    """

    def __init__(self, alg: QuaternionAlgebra,
                 pure: Quaternion | None = None,
                 partner: Quaternion | None = None):
        self.algebra = alg
        self.pure = alg.lam() if pure is None else pure
        if not (self.pure.is_pure() and not self.pure.nrd().is_zero()):
            raise ValueError("pure must be pure and invertible")
        self.partner = anticommuting_complement(self.pure) if partner is None \
            else partner
        anti = self.pure * self.partner + self.partner * self.pure
        if not anti.is_zero():
            raise ValueError("partner must anticommute with pure")
        sq_a = self.pure * self.pure
        sq_b = self.partner * self.partner
        self.a_val = sq_a.coeffs[0]     # pure^2 in the base field
        self.b_val = sq_b.coeffs[0]     # partner^2 in the base field
        self.L = QuadExt(alg.base, self.a_val)
        self._basis_matrix = self._change_of_basis()

    def _change_of_basis(self):
        """Coordinates of {1, p, q, pq} in the standard basis, as columns."""
        alg = self.algebra
        pq = self.pure * self.partner
        cols = [alg.one().coeffs, self.pure.coeffs, self.partner.coeffs, pq.coeffs]
        return [[cols[j][i] for j in range(4)] for i in range(4)]

    def coords(self, q: Quaternion):
        """Coordinates of q in the basis {1, pure, partner, pure*partner}."""
        mat = [row[:] for row in self._basis_matrix]
        rhs = list(q.coeffs)
        n = 4
        for col in range(n):
            piv = next(r for r in range(col, n) if not mat[r][col].is_zero())
            mat[col], mat[piv] = mat[piv], mat[col]
            rhs[col], rhs[piv] = rhs[piv], rhs[col]
            f = mat[col][col].inv()
            mat[col] = [x * f for x in mat[col]]
            rhs[col] = rhs[col] * f
            for r in range(n):
                if r != col and not mat[r][col].is_zero():
                    g = mat[r][col]
                    mat[r] = [x - g * y for x, y in zip(mat[r], mat[col])]
                    rhs[r] = rhs[r] - g * rhs[col]
        return rhs

    def __call__(self, q: Quaternion):
        """phi(q) as a 2x2 matrix of L-elements."""
        y0, y1, y2, y3 = self.coords(q)
        L = self.L
        sq = L.sq()
        b = self.b_val
        # y0*I + y1*diag(sq,-sq) + y2*[[0,b],[1,0]] + y3*[[0, sq*b],[-sq, 0]]
        m00 = L.element(y0) + L.element(self.algebra.base.zero(), y1)
        m11 = L.element(y0) - L.element(self.algebra.base.zero(), y1)
        m01 = L.element(y2 * b) + sq * L.element(y3 * b)
        m10 = L.element(y2) - sq * L.element(y3)
        return [[m00, m01], [m10, m11]]

    def at_place(self, base_embedding) -> "SplittingPhiAtPlace":
        return SplittingPhiAtPlace(self, base_embedding)


class SplittingPhiAtPlace:
    """phi composed with an embedding tau of L into C."""

    def __init__(self, phi: SplittingPhi, base_embedding):
        self.phi = phi
        self.tau = LEmbedding(phi.L, base_embedding)

    def __call__(self, q: Quaternion):
        m = self.phi(q)
        return [[self.tau(m[0][0]), self.tau(m[0][1])],
                [self.tau(m[1][0]), self.tau(m[1][1])]]


def splitting_iso_phi(alg: QuaternionAlgebra,
                      pure: Quaternion | None = None,
                      partner: Quaternion | None = None) -> SplittingPhi:
    return SplittingPhi(alg, pure, partner)


# ---------------------------------------------------------------------------
# nonsplit model psi: D_v -> Hamilton quaternions

E1 = ((1, 0), (0, 1))
E2 = ((1j, 0), (0, -1j))
E3 = ((0, 1), (-1, 0))
E4 = ((0, 1j), (1j, 0))  # e2 * e3


class NonsplitPsi:
    """psi: D_v -> H sending r to sqrt(-u) e2 and s to sqrt(-t) e3,
    where u = v(r^2) < 0 and t = v(s^2) < 0."""

    def __init__(self, alg: QuaternionAlgebra, v: RealEmbedding,
                 r: Quaternion, s: Quaternion):
        if not (r.is_pure() and s.is_pure()):
            raise ValueError("r and s must be pure")
        anti = r * s + s * r
        if not anti.is_zero():
            raise ValueError("r and s must anticommute")
        self.algebra = alg
        self.v = v
        self.r, self.s = r, s
        u_el = (r * r).coeffs[0]
        t_el = (s * s).coeffs[0]
        if v.sign(u_el) >= 0 or v.sign(t_el) >= 0:
            raise WrongModel("nonsplit model needs v(r^2) < 0 and v(s^2) < 0")
        self.u = v(u_el)
        self.t = v(t_el)
        self._phi_coords = SplittingPhi(alg, r, s).coords

    def __call__(self, q: Quaternion):
        y0, y1, y2, y3 = (self.v(c) for c in self._phi_coords(q))
        su = (-self.u) ** 0.5
        st = (-self.t) ** 0.5
        scals = (y0, y1 * su, y2 * st, y3 * su * st)
        out = [[0j, 0j], [0j, 0j]]
        for c, e in zip(scals, (E1, E2, E3, E4)):
            for i in range(2):
                for j in range(2):
                    out[i][j] += c * e[i][j]
        return out


def nonsplit_iso_psi(alg: QuaternionAlgebra, v: RealEmbedding,
                     r: Quaternion, s: Quaternion) -> NonsplitPsi:
    return NonsplitPsi(alg, v, r, s)


# ---------------------------------------------------------------------------
# the second-kind package on D = D0 tensor_F K (or the degenerate D = K)

class SecondKindData:
    """J = sigma_0 tensor iota and alpha = 1_{D0} tensor iota on D0 tensor K.

    With D0 = None this degenerates to D = K, where J = alpha = iota and the
    canonical involution is the identity.
    """

    def __init__(self, K: CMExtension, D0: QuaternionAlgebra | None,
                 degree_over_K: int | None = None):
        if degree_over_K is None:
            degree_over_K = 1 if D0 is None else 2
        if degree_over_K not in (1, 2):
            raise NotAdmissible(
                "only Brauer classes of order 1 or 2 admit a conjugation "
                "of the second kind")
        if (D0 is None) != (degree_over_K == 1):
            raise ValueError("degree_over_K inconsistent with D0")
        if D0 is not None and D0.base != K.base:
            raise ValueError("D0 must be defined over the base of K")
        self.K = K
        self.D0 = D0
        self.degree_over_K = degree_over_K
        if D0 is not None:
            self.D = QuaternionAlgebra(K, K.element(D0.a), K.element(D0.b))
        else:
            self.D = None

    # --- maps on elements of D (quaternions over K, or K itself) ---

    def J(self, x):
        """The involution of the second kind sigma_0 tensor iota."""
        if self.D0 is None:
            return self.K.element(x).conj()
        x = self.D.element(x)
        c = [k.conj() for k in x.coeffs]
        return Quaternion(self.D, (c[0], -c[1], -c[2], -c[3]))

    def alpha(self, x):
        """The canonical conjugation 1_{D0} tensor iota."""
        if self.D0 is None:
            return self.K.element(x).conj()
        x = self.D.element(x)
        return Quaternion(self.D, tuple(k.conj() for k in x.coeffs))

    def sigma(self, x):
        """The canonical involution of D over K (identity when D = K)."""
        if self.D0 is None:
            return self.K.element(x)
        return self.D.element(x).sigma()

    def sample_elements(self):
        """Deterministic sample of elements for verification."""
        if self.D0 is None:
            K = self.K
            return [K.one(), K.sqrt_delta(), K.element(2, 3),
                    K.element(-1, 1), K.element(0, -2)]
        D = self.D
        K = self.K
        sd = K.sqrt_delta()
        out = list(D.basis())
        out.append(D.element([K.element(1, 1), K.element(0, 2),
                              K.element(3), sd]))
        out.append(D.element([sd, K.one(), K.element(-1, 1), K.element(2, -1)]))
        return out


def canonical_conjugation(data: SecondKindData) -> dict:
    """Verification report for the canonical conjugation alpha.

    Confirms alpha^2 = 1, alpha J = J alpha, and alpha J = sigma (quaternion
    case) or alpha J = identity (case D = K), exactly on a deterministic
    sample and on the basis.
    """
    samples = data.sample_elements()
    alpha_sq = all(data.alpha(data.alpha(x)) == x for x in samples)
    commute = all(data.alpha(data.J(x)) == data.J(data.alpha(x)) for x in samples)
    if data.D0 is None:
        composite = all(data.alpha(data.J(x)) == data.K.element(x)
                        for x in samples)
    else:
        composite = all(data.alpha(data.J(x)) == data.sigma(x) for x in samples)
    return {
        "alpha_squared_is_identity": alpha_sq,
        "alpha_commutes_with_J": commute,
        "alpha_J_equals_canonical": composite,
        "degree_over_K": data.degree_over_K,
    }
