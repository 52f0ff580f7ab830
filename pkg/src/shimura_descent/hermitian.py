"""Hermitian spaces over (K, iota) or (D0 tensor K, J), skew-hermitian spaces
over (D, sigma), their signatures, place profiles and the strong
admissibility tests.

Place profiles collect, for every real embedding v of the totally real base:
whether the quaternion algebra splits at v (I_s / I_ns), whether the real
group at v is compact (I_c / I_nc), and the signature where one is defined.
All sign decisions are certified through exact interval arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import NotAdmissible, WrongModel
from .numfield import CMElement, CMExtension, FieldElement, NumberField, RealEmbedding
from .quat import (Quaternion, QuaternionAlgebra, SecondKindData, SplittingPhi,
                   anticommuting_complement, real_place_splitting)


# ---------------------------------------------------------------------------
# spaces

class HermitianSpace:
    """Diagonal hermitian space over D = K (m = 1) or D0 tensor K (m = 2).

    Gram entries are stored as elements of the totally real base F; genuinely
    K-valued input (nonzero imaginary part) contradicts hermitian symmetry,
    so it is flagged in `warnings` and its F-part is kept.
    """

    def __init__(self, algebra, gram, basis_label: str = "beta"):
        if isinstance(algebra, CMExtension):
            self.kind_m = 1
            self.K = algebra
            self.second_kind = SecondKindData(algebra, None)
        elif isinstance(algebra, SecondKindData):
            self.kind_m = algebra.degree_over_K
            self.K = algebra.K
            self.second_kind = algebra
        else:
            raise TypeError("algebra must be a CMExtension or SecondKindData")
        self.F: NumberField = self.K.base
        self.basis_label = basis_label
        self.warnings: list[str] = []
        entries = []
        for i, q in enumerate(gram):
            if isinstance(q, CMElement):
                if not q.b.is_zero():
                    self.warnings.append(
                        f"gram[{i}] has a nonzero imaginary part; hermitian "
                        "symmetry forces diagonal entries into F, keeping the "
                        "F-part")
                q = q.a
            entries.append(self.F.element(q))
        if any(q.is_zero() for q in entries):
            raise ValueError("gram entries must be nonzero")
        self.gram: list[FieldElement] = entries
        self.dim = len(entries)

    @property
    def D0(self) -> QuaternionAlgebra | None:
        return self.second_kind.D0

    def __repr__(self):
        return (f"HermitianSpace(m={self.kind_m}, n={self.dim}, "
                f"gram={[str(q.coeffs[0]) for q in self.gram]})")

    def to_json(self):
        alg = {"kind": "cm", **self.K.to_json()} if self.kind_m == 1 else \
            {"kind": "second_kind", "K": self.K.to_json(),
             "D0": self.D0.to_json()}
        return {"kind": "hermitian", "algebra": alg,
                "gram": [q.to_json() for q in self.gram]}


class SkewHermitianSpace:
    """Diagonal skew-hermitian space over (D, sigma) with alpha = int(r).

    Gram entries are pure invertible quaternions; r is a pure quaternion
    anticommuting with each of them (so r q_i r^{-1} = -q_i and
    r^2 = -Nrd(r) lands in F automatically).
    """

    def __init__(self, algebra: QuaternionAlgebra, gram, r: Quaternion,
                 basis_label: str = "beta"):
        if not isinstance(algebra.base, NumberField) or not algebra.base.is_totally_real:
            raise ValueError("skew-hermitian spaces live over totally real F")
        self.algebra = algebra
        self.F: NumberField = algebra.base
        self.basis_label = basis_label
        self.r = algebra.element(r)
        if not self.r.is_pure() or self.r.nrd().is_zero():
            raise ValueError("r must be pure and invertible")
        self.gram: list[Quaternion] = [algebra.element(q) for q in gram]
        for i, q in enumerate(self.gram):
            if not q.is_pure():
                raise ValueError(f"gram[{i}] must be a pure quaternion")
            if q.nrd().is_zero():
                raise ValueError(f"gram[{i}] must be invertible")
        self.dim = len(self.gram)
        self.r_squared: FieldElement = (self.r * self.r).coeffs[0]

    def r_anticommutes(self) -> list[bool]:
        return [(self.r * q + q * self.r).is_zero() for q in self.gram]

    def __repr__(self):
        return f"SkewHermitianSpace(n={self.dim})"

    def to_json(self):
        return {"kind": "skew", "algebra": self.algebra.to_json(),
                "gram": [q.to_json() for q in self.gram],
                "r": self.r.to_json()}


# ---------------------------------------------------------------------------
# place data

@dataclass
class PlaceData:
    index: int
    split: bool | None          # None for m = 1 hermitian spaces
    compact: bool
    signature: tuple[int, int] | None
    marker: str | None = None   # 'compact-definite' / 'compact-nonsplit' etc.


@dataclass
class PlaceProfile:
    places: list[PlaceData] = field(default_factory=list)

    @property
    def I_c(self) -> list[int]:
        return [p.index for p in self.places if p.compact]

    @property
    def I_nc(self) -> list[int]:
        return [p.index for p in self.places if not p.compact]

    @property
    def I_s(self) -> list[int]:
        return [p.index for p in self.places if p.split]

    @property
    def I_ns(self) -> list[int]:
        return [p.index for p in self.places if p.split is False]

    def to_json(self):
        return [{"place": p.index, "split": p.split, "compact": p.compact,
                 "signature": list(p.signature) if p.signature else None,
                 "marker": p.marker} for p in self.places]


# ---------------------------------------------------------------------------
# signatures

def signature_at_place(space: HermitianSpace, v: RealEmbedding):
    """Signature of the hermitian space at the real place v.

    m = 1: (p, q) by exact sign count of the v(q_i).
    m = 2 with D0 split at v: always (n, n).
    m = 2 with D0 nonsplit at v: the Morita-reduced form has signature
    (2p, 2q) with p the number of positive v(q_i); returned with a marker
    since the geometric datum is the compact/noncompact dichotomy.
    """
    n = space.dim
    pos = sum(1 for q in space.gram if v.sign(q) > 0)
    if space.kind_m == 1:
        return (pos, n - pos)
    if real_place_splitting(space.D0, v) == "split":
        return (n, n)
    return (2 * pos, 2 * (n - pos))


def place_profile(space) -> PlaceProfile:
    """Compact/split profile over all real places of the base field."""
    if isinstance(space, HermitianSpace):
        return _profile_hermitian(space)
    if isinstance(space, SkewHermitianSpace):
        return _profile_skew(space)
    raise TypeError("expected a hermitian or skew-hermitian space")


def _profile_hermitian(space: HermitianSpace) -> PlaceProfile:
    prof = PlaceProfile()
    for idx, v in enumerate(space.F.real_embeddings()):
        sig = signature_at_place(space, v)
        if space.kind_m == 1:
            compact = sig[0] * sig[1] == 0
            prof.places.append(PlaceData(idx, None, compact, sig,
                                         "compact-definite" if compact else None))
        else:
            split = real_place_splitting(space.D0, v) == "split"
            if split:
                prof.places.append(PlaceData(idx, True, False, sig))
            else:
                compact = sig[0] * sig[1] == 0
                prof.places.append(
                    PlaceData(idx, False, compact, sig,
                              "compact-nonsplit" if compact else "noncompact-nonsplit"))
    return prof


def _profile_skew(space: SkewHermitianSpace) -> PlaceProfile:
    prof = PlaceProfile()
    for idx, v in enumerate(space.F.real_embeddings()):
        split = real_place_splitting(space.algebra, v) == "split"
        if split:
            definite = _split_form_definite(space, v)
            prof.places.append(
                PlaceData(idx, True, definite, None,
                          "compact-definite" if definite else None))
        else:
            # type D^H place: the real group is an SO*(2n) form, noncompact
            prof.places.append(PlaceData(idx, False, False, None,
                                         "nonsplit-quaternionic"))
    return prof


# ---------------------------------------------------------------------------
# the associated bilinear form at split places

def _sign_in_L(v: RealEmbedding, u: FieldElement, w: FieldElement,
               a: FieldElement) -> int:
    """Certified sign of v(u) + v(w) sqrt(v(a)) for v(a) > 0."""
    su, sw = v.sign(u), v.sign(w)
    if sw == 0:
        return su
    if su == 0:
        return sw
    if su == sw:
        return su
    # opposite signs: compare u^2 against w^2 a
    d = v.sign(u * u - w * w * a)
    return su * d if d != 0 else 0


def _real_split_phi(space: SkewHermitianSpace, v: RealEmbedding) -> SplittingPhi:
    """A splitting of D at v whose defining pure element has positive square.

    Uses (r, s) when v(r^2) > 0, else (s, r); one of the two works at any
    split place.
    """
    alg = space.algebra
    r = space.r
    s = anticommuting_complement(r)
    if v.sign((r * r).coeffs[0]) > 0:
        return SplittingPhi(alg, r, s)
    if v.sign((s * s).coeffs[0]) > 0:
        return SplittingPhi(alg, s, r)
    raise WrongModel("no real splitting: place is nonsplit")


def associated_bilinear_form(space: SkewHermitianSpace, v: RealEmbedding):
    """Matrix of the associated real symmetric bilinear form at a split place.

    With phi(q_i) = [[0, b_i], [c_i, 0]] over L = F(r), the matrix is
    diag(c_1..c_n, -b_1..-b_n) whenever those entries are real at v (always
    the case when v(r^2) > 0).  When tau(r) is imaginary and some entry is
    genuinely complex, the s-based real splitting of D_v is used instead,
    which couples the paired coordinates symmetrically.  The return value
    carries the exact block data alongside a float rendering.
    """
    if real_place_splitting(space.algebra, v) != "split":
        raise WrongModel("the associated bilinear form lives at split places")
    alg = space.algebra
    r = space.r
    s = anticommuting_complement(r)
    phi_r = SplittingPhi(alg, r, s)
    b_entries, c_entries = [], []
    for q in space.gram:
        m = phi_r(q)
        b_entries.append(m[0][1])
        c_entries.append(m[1][0])
    r_real = v.sign(space.r_squared) > 0
    entries_real = all(e.w.is_zero() for e in b_entries + c_entries)
    n = space.dim
    if r_real or entries_real:
        blocks = [(c_entries[i], phi_r.L.zero(), -b_entries[i]) for i in range(n)]
        model = phi_r
    else:
        phi_s = _real_split_phi(space, v)
        blocks = []
        for q in space.gram:
            m = phi_s(q)
            # pure quaternions have trace zero, so m[0][0] = -m[1][1]
            blocks.append((m[1][0], m[1][1], -m[0][1]))
        model = phi_s
    a = model.a_val
    sq = float(v(a)) ** 0.5 if v.sign(a) > 0 else 0.0

    def val(e):
        if e.w.is_zero():
            return float(v(e.u))
        return float(v(e.u)) + float(v(e.w)) * sq

    mat = [[0.0] * (2 * n) for _ in range(2 * n)]
    for i, (p, c, q) in enumerate(blocks):
        mat[i][i] = val(p)
        mat[n + i][n + i] = val(q)
        mat[i][n + i] = mat[n + i][i] = val(c)
    return {"matrix": mat, "blocks": blocks, "phi": model, "ext_a": a}


def _split_form_definite(space: SkewHermitianSpace, v: RealEmbedding) -> bool:
    """Exact definiteness of the associated bilinear form at a split place."""
    data = associated_bilinear_form(space, v)
    a = data["ext_a"]
    overall = 0
    for (p, s, r) in data["blocks"]:
        det = p * r - s * s
        sd = _sign_in_L(v, det.u, det.w, a)
        if sd <= 0:
            return False
        sp = _sign_in_L(v, p.u, p.w, a)
        if sp == 0:
            return False
        if overall == 0:
            overall = sp
        elif sp != overall:
            return False
    return True


# ---------------------------------------------------------------------------
# strong admissibility

def is_strongly_hermitian(space: HermitianSpace):
    """Strong hermitian test: diagonal F-entries by construction, and for
    m = 2 every nonsplit place of D0 must be compact (I_ns inside I_c)."""
    reasons = []
    if space.warnings:
        reasons.extend(space.warnings)
    if space.kind_m == 1:
        reasons.append("hermitian space over D = K is always strongly hermitian")
        return True, reasons
    prof = place_profile(space)
    bad = [i for i in prof.I_ns if i not in prof.I_c]
    if bad:
        reasons.append(f"nonsplit places {bad} are noncompact: I_ns is not "
                       "contained in I_c")
        return False, reasons
    reasons.append("I_ns is contained in I_c")
    return True, reasons


def is_strongly_skew_hermitian(space: SkewHermitianSpace):
    """Strong skew-hermitian test: pure diagonal entries, r anticommuting
    with each of them, odd dimension at least 5, and I_c = I_s."""
    reasons = []
    anti = space.r_anticommutes()
    if not all(anti):
        bad = [i for i, ok in enumerate(anti) if not ok]
        reasons.append(f"r does not anticommute with gram entries {bad}")
        return False, reasons
    if space.dim % 2 == 0:
        reasons.append("even dimension is outside the type D scope")
        return False, reasons
    if space.dim < 5:
        reasons.append("odd dimension below 5 is outside the type D scope "
                       "(D_l needs l >= 5 odd)")
        return False, reasons
    prof = place_profile(space)
    if set(prof.I_c) != set(prof.I_s):
        reasons.append(f"I_c = {prof.I_c} differs from I_s = {prof.I_s}")
        return False, reasons
    reasons.append("every split place carries a definite associated form "
                   "(I_c = I_s)")
    return True, reasons


# ---------------------------------------------------------------------------
# diagonalization helper for full Gram matrices

def diagonalize_hermitian_gram(entries, involution, zero, retries: int = 4):
    """Gram-Schmidt over a (skew-)hermitian form given a full Gram matrix.

    `entries` is an n x n matrix over the coefficient algebra, `involution`
    the relevant twist (iota, J, or sigma).  Returns (diagonal, basis) where
    basis[i] are the coordinates of the new orthogonal vectors.  Isotropic
    pivots trigger a pivot swap and then a vector-mixing retry; if the form
    stays stuck it raises NotAdmissible.
    """
    n = len(entries)
    g = [[entries[i][j] for j in range(n)] for i in range(n)]
    basis = [[zero + 1 if i == j else zero for j in range(n)] for i in range(n)]

    def form(u, w):
        acc = zero
        for i in range(n):
            for j in range(n):
                acc = acc + involution(u[i]) * entries[i][j] * w[j]
        return acc

    out = []
    rows = [list(b) for b in basis]
    for step in range(n):
        pivot = None
        for k in range(step, n):
            if not form(rows[k], rows[k]).is_zero():
                pivot = k
                break
        if pivot is None:
            # mixing retry: add a later vector to the current one
            mixed = False
            for k in range(step + 1, n):
                cand = [a + b for a, b in zip(rows[step], rows[k])]
                if not form(cand, cand).is_zero():
                    rows[step] = cand
                    mixed = True
                    break
            if not mixed:
                raise NotAdmissible("isotropic pivot: form cannot be "
                                    "diagonalized by pivot swaps")
            pivot = step
        rows[step], rows[pivot] = rows[pivot], rows[step]
        d = form(rows[step], rows[step])
        out.append(d)
        dinv = d.inv()
        for k in range(step + 1, n):
            c = dinv * form(rows[step], rows[k])
            rows[k] = [a - b * c for a, b in zip(rows[k], rows[step])]
    return out, rows
