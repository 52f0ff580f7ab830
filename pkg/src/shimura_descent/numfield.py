"""Exact arithmetic in totally real number fields and their CM extensions.

A field F = Q[x]/(p) is presented by a monic squarefree integer polynomial p.
Elements are vectors of rationals in the power basis.  Real embeddings are
isolated roots of p, refined by bisection; every sign decision is certified
by exact interval arithmetic, so definiteness and totality checks never
depend on floating point.

A CM extension K = F(sqrt(delta)) is always presented relatively, as the
pair (F, delta) with delta totally negative; its conjugation iota fixes F
and negates sqrt(delta).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import DivisionByZero, NotTotallyReal, PrecisionExhausted

DEFAULT_PRECISION_BITS = 128
_MAX_PRECISION_BITS = 4096


# ---------------------------------------------------------------------------
# rational helpers

def rat(x) -> Fraction:
    """Coerce ints, Fractions and 'p/q' strings to Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"not a rational: {x!r}")


def rat_to_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


# ---------------------------------------------------------------------------
# polynomial arithmetic over Q (coefficient lists, low degree first)

def poly_trim(p: list[Fraction]) -> list[Fraction]:
    while p and p[-1] == 0:
        p.pop()
    return p


def poly_add(p, q):
    n = max(len(p), len(q))
    out = [Fraction(0)] * n
    for i, c in enumerate(p):
        out[i] += c
    for i, c in enumerate(q):
        out[i] += c
    return poly_trim(out)


def poly_scale(p, c):
    return poly_trim([ci * c for ci in p])


def poly_mul(p, q):
    if not p or not q:
        return []
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a == 0:
            continue
        for j, b in enumerate(q):
            out[i + j] += a * b
    return poly_trim(out)


def poly_divmod(p, q):
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    p = list(p)
    out = [Fraction(0)] * max(0, len(p) - len(q) + 1)
    while len(p) >= len(q):
        c = p[-1] / q[-1]
        k = len(p) - len(q)
        out[k] = c
        for i, b in enumerate(q):
            p[k + i] -= c * b
        poly_trim(p)
        if not p:
            break
    return poly_trim(out), p


def poly_deriv(p):
    return poly_trim([i * c for i, c in enumerate(p)][1:])


def poly_gcd(p, q):
    a, b = list(p), list(q)
    while b:
        _, r = poly_divmod(a, b)
        a, b = b, r
    if a:
        a = poly_scale(a, 1 / a[-1])
    return a


def poly_eval(p, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def poly_eval_interval(p, lo: Fraction, hi: Fraction) -> tuple[Fraction, Fraction]:
    """Horner evaluation with exact interval arithmetic."""
    alo, ahi = Fraction(0), Fraction(0)
    for c in reversed(p):
        cands = (alo * lo, alo * hi, ahi * lo, ahi * hi)
        alo, ahi = min(cands) + c, max(cands) + c
    return alo, ahi


def _sturm_chain(p):
    chain = [list(p), poly_deriv(p)]
    while chain[-1]:
        _, r = poly_divmod(chain[-2], chain[-1])
        if not r:
            break
        chain.append(poly_scale(r, -1))
    return chain


def _sign_changes(chain, x: Fraction) -> int:
    signs = []
    for q in chain:
        v = poly_eval(q, x)
        if v != 0:
            signs.append(1 if v > 0 else -1)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_real_roots(p, lo: Fraction | None = None, hi: Fraction | None = None) -> int:
    """Number of distinct real roots of squarefree p in (lo, hi]."""
    chain = _sturm_chain(p)
    if lo is None or hi is None:
        bound = root_bound(p)
        lo = -bound if lo is None else lo
        hi = bound if hi is None else hi
    return _sign_changes(chain, lo) - _sign_changes(chain, hi)


def root_bound(p) -> Fraction:
    """Cauchy bound: all real roots lie in (-B, B)."""
    lead = abs(p[-1])
    m = max((abs(c) for c in p[:-1]), default=Fraction(0))
    return Fraction(1) + m / lead


def isolate_real_roots(p) -> list[tuple[Fraction, Fraction]]:
    """Disjoint isolating intervals for the real roots of squarefree p.

    Each interval (lo, hi] contains exactly one root; endpoints are never
    roots except in the degenerate [r, r] case for a rational root.
    """
    chain = _sturm_chain(p)
    bound = root_bound(p)
    out: list[tuple[Fraction, Fraction]] = []

    def recurse(lo, hi, nlo, nhi):
        count = nlo - nhi
        if count == 0:
            return
        if count == 1:
            out.append((lo, hi))
            return
        mid = (lo + hi) / 2
        if poly_eval(p, mid) == 0:
            # nudge the split point off the root, keeping it isolated
            eps = (hi - lo) / (4 * len(p) * count)
            out_mid = (mid - eps, mid + eps)
            nml = _sign_changes(chain, out_mid[0])
            nmr = _sign_changes(chain, out_mid[1])
            recurse(lo, out_mid[0], nlo, nml)
            out.append(out_mid)
            recurse(out_mid[1], hi, nmr, nhi)
            return
        nmid = _sign_changes(chain, mid)
        recurse(lo, mid, nlo, nmid)
        recurse(mid, hi, nmid, nhi)

    recurse(-bound, bound, _sign_changes(chain, -bound), _sign_changes(chain, bound))
    return sorted(out)


# ---------------------------------------------------------------------------
# number fields

class NumberField:
    """F = Q[x]/(p) for a monic squarefree integer polynomial p."""

    def __init__(self, min_poly: Sequence[int]):
        coeffs = [rat(c) for c in min_poly]
        if not coeffs or coeffs[-1] != 1:
            raise ValueError("min_poly must be monic")
        if any(c.denominator != 1 for c in coeffs):
            raise ValueError("min_poly must have integer coefficients")
        if len(coeffs) < 2:
            raise ValueError("min_poly must have positive degree")
        g = poly_gcd(coeffs, poly_deriv(coeffs))
        if len(g) > 1:
            raise ValueError("min_poly must be squarefree")
        self.min_poly = coeffs
        self.degree = len(coeffs) - 1
        self._root_intervals: list[list[Fraction]] | None = None
        self._n_real_roots = count_real_roots(coeffs)

    def __repr__(self):
        ints = [int(c) for c in self.min_poly]
        return f"NumberField({ints})"

    def __eq__(self, other):
        return isinstance(other, NumberField) and self.min_poly == other.min_poly

    def __hash__(self):
        return hash(tuple(self.min_poly))

    @property
    def is_totally_real(self) -> bool:
        return self._n_real_roots == self.degree

    def zero(self) -> "FieldElement":
        return FieldElement(self, [0] * self.degree)

    def one(self) -> "FieldElement":
        return FieldElement(self, [1] + [0] * (self.degree - 1))

    def gen(self) -> "FieldElement":
        if self.degree == 1:
            # Q presented as Q[x]/(x - c): generator is the rational c
            return FieldElement(self, [-self.min_poly[0]])
        return FieldElement(self, [0, 1] + [0] * (self.degree - 2))

    def element(self, coeffs) -> "FieldElement":
        if isinstance(coeffs, FieldElement):
            if coeffs.field != self:
                raise ValueError("element of a different field")
            return coeffs
        if isinstance(coeffs, (int, Fraction, str)):
            coeffs = [coeffs]
        cs = [rat(c) for c in coeffs]
        if len(cs) > self.degree:
            raise ValueError("too many coordinates")
        cs += [Fraction(0)] * (self.degree - len(cs))
        return FieldElement(self, cs)

    def real_embeddings(self, precision: int = DEFAULT_PRECISION_BITS) -> list["RealEmbedding"]:
        """Ordered (ascending) real embeddings of a totally real field."""
        if not self.is_totally_real:
            raise NotTotallyReal(f"{self!r} has complex embeddings")
        if self._root_intervals is None:
            self._root_intervals = [list(iv) for iv in isolate_real_roots(self.min_poly)]
        embs = [RealEmbedding(self, i) for i in range(self.degree)]
        for e in embs:
            e.refine(precision)
        return embs

    def _refine_root(self, index: int, precision: int):
        assert self._root_intervals is not None
        lo, hi = self._root_intervals[index]
        target = Fraction(1, 2 ** precision)
        p = self.min_poly
        if hi - lo <= target:
            return
        flo = poly_eval(p, lo)
        if flo == 0:
            self._root_intervals[index] = [lo, lo]
            return
        slo = 1 if flo > 0 else -1
        while hi - lo > target:
            mid = (lo + hi) / 2
            fm = poly_eval(p, mid)
            if fm == 0:
                lo = hi = mid
                break
            if (1 if fm > 0 else -1) == slo:
                lo = mid
            else:
                hi = mid
        self._root_intervals[index] = [lo, hi]

    def to_json(self):
        return {"min_poly": [int(c) for c in self.min_poly]}

    @classmethod
    def from_json(cls, data) -> "NumberField":
        return cls(data["min_poly"])


QQ = None  # set below, after FieldElement exists


@dataclass(frozen=True)
class FieldElement:
    """Element of a NumberField in power-basis coordinates."""

    field: NumberField
    coeffs: tuple[Fraction, ...]

    def __init__(self, field: NumberField, coeffs):
        cs = [rat(c) for c in coeffs]
        cs += [Fraction(0)] * (field.degree - len(cs))
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "coeffs", tuple(cs))

    def _check(self, other) -> "FieldElement":
        if isinstance(other, (int, Fraction, str)):
            return self.field.element([rat(other)])
        if not isinstance(other, FieldElement) or other.field != self.field:
            raise ValueError("elements of different fields")
        return other

    def __add__(self, other):
        o = self._check(other)
        return FieldElement(self.field, [a + b for a, b in zip(self.coeffs, o.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.field, [-a for a in self.coeffs])

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        o = self._check(other)
        prod = poly_mul(list(self.coeffs), list(o.coeffs))
        _, rem = poly_divmod(prod, self.field.min_poly)
        return FieldElement(self.field, rem)

    __rmul__ = __mul__

    def inv(self) -> "FieldElement":
        if self.is_zero():
            raise DivisionByZero("inversion of zero field element")
        # extended Euclid in Q[x] against min_poly
        a, b = list(self.field.min_poly), poly_trim(list(self.coeffs))
        s0, s1 = [], [Fraction(1)]
        while b:
            q, r = poly_divmod(a, b)
            a, b = b, r
            s0, s1 = s1, poly_add(s0, poly_scale(poly_mul(q, s1), -1))
        if len(a) != 1:
            raise DivisionByZero(
                "element is a zero divisor (min_poly is reducible)")
        inv_coeffs = poly_scale(s0, 1 / a[0])
        _, rem = poly_divmod(inv_coeffs, self.field.min_poly)
        return FieldElement(self.field, rem)

    def __truediv__(self, other):
        return self * self._check(other).inv()

    def __rtruediv__(self, other):
        return self._check(other) * self.inv()

    def __pow__(self, n: int):
        if n < 0:
            return self.inv() ** (-n)
        out = self.field.one()
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        try:
            o = self._check(other)
        except (ValueError, TypeError):
            return NotImplemented
        return self.coeffs == o.coeffs

    def __hash__(self):
        return hash((self.field, self.coeffs))

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coeffs[1:])

    def as_rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("element is not rational")
        return self.coeffs[0]

    def __repr__(self):
        return f"FieldElement({[str(c) for c in self.coeffs]})"

    def to_json(self):
        return [rat_to_str(c) for c in self.coeffs]


def nf_arith(a: FieldElement, b: FieldElement | None, op: str):
    """Dispatch head for the basic field operations."""
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "inv":
        return a.inv()
    if op == "eq":
        return a == b
    raise ValueError(f"unknown op {op!r}")


class RealEmbedding:
    """One real embedding v: F -> R, backed by an isolating interval."""

    def __init__(self, field: NumberField, index: int):
        self.field = field
        self.index = index
        self._precision = 0

    def refine(self, precision: int):
        if precision > self._precision:
            self.field._refine_root(self.index, precision)
            self._precision = precision

    def interval(self, element: FieldElement,
                 precision: int = DEFAULT_PRECISION_BITS) -> tuple[Fraction, Fraction]:
        self.refine(precision)
        lo, hi = self.field._root_intervals[self.index]
        return poly_eval_interval(list(element.coeffs), lo, hi)

    def sign(self, element: FieldElement) -> int:
        """Certified sign of v(element): -1, 0 or +1."""
        if element.is_zero():
            return 0
        prec = max(self._precision, DEFAULT_PRECISION_BITS)
        while True:
            lo, hi = self.interval(element, prec)
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            if lo == 0 and hi == 0:
                return 0
            if prec >= _MAX_PRECISION_BITS:
                raise PrecisionExhausted(
                    "cannot certify sign; is min_poly irreducible?")
            prec *= 2

    def rational(self, element: FieldElement,
                 precision: int = DEFAULT_PRECISION_BITS) -> Fraction:
        lo, hi = self.interval(element, precision)
        return (lo + hi) / 2

    def __call__(self, element: FieldElement,
                 precision: int = DEFAULT_PRECISION_BITS) -> float:
        return float(self.rational(element, precision))

    def __repr__(self):
        return f"RealEmbedding({self.field!r}, index={self.index})"


def totality_check(field: NumberField, element: FieldElement | None, mode: str) -> bool:
    """Certified totality decisions.

    mode='totally_real_field': is the field totally real (element ignored)?
    mode='totally_negative': is v(element) < 0 at every real embedding?
    """
    if mode == "totally_real_field":
        return field.is_totally_real
    if mode == "totally_negative":
        if element is None or element.is_zero():
            return False
        return all(v.sign(element) < 0 for v in field.real_embeddings())
    raise ValueError(f"unknown mode {mode!r}")


def totally_positive(field: NumberField, element: FieldElement) -> bool:
    if element.is_zero():
        return False
    return all(v.sign(element) > 0 for v in field.real_embeddings())


# ---------------------------------------------------------------------------
# CM extensions

class CMExtension:
    """K = F(sqrt(delta)) for totally real F and totally negative delta."""

    def __init__(self, base: NumberField, delta: FieldElement):
        if not base.is_totally_real:
            raise NotTotallyReal("base of a CM extension must be totally real")
        delta = base.element(delta)
        if not totality_check(base, delta, "totally_negative"):
            raise ValueError("delta must be totally negative")
        self.base = base
        self.delta = delta

    def __repr__(self):
        return f"CMExtension({self.base!r}, delta={self.delta!r})"

    def __eq__(self, other):
        return (isinstance(other, CMExtension)
                and self.base == other.base and self.delta == other.delta)

    def __hash__(self):
        return hash((self.base, self.delta))

    def zero(self) -> "CMElement":
        return CMElement(self, self.base.zero(), self.base.zero())

    def one(self) -> "CMElement":
        return CMElement(self, self.base.one(), self.base.zero())

    def sqrt_delta(self) -> "CMElement":
        return CMElement(self, self.base.zero(), self.base.one())

    def element(self, a, b=None) -> "CMElement":
        if isinstance(a, CMElement):
            if a.ext != self:
                raise ValueError("element of a different CM extension")
            return a
        if isinstance(a, FieldElement) and b is None:
            return CMElement(self, a, self.base.zero())
        b = self.base.zero() if b is None else self.base.element(b)
        return CMElement(self, self.base.element(a), b)

    def embeddings(self, precision: int = DEFAULT_PRECISION_BITS) -> list["CMEmbedding"]:
        """One embedding w: K -> C over each real place of F.

        The branch sends sqrt(delta) to the positive imaginary axis.
        """
        return [CMEmbedding(self, v) for v in self.base.real_embeddings(precision)]

    def to_json(self):
        return {"base": self.base.to_json(),
                "delta": self.delta.to_json()}

    @classmethod
    def from_json(cls, data) -> "CMExtension":
        base = NumberField.from_json(data["base"])
        return cls(base, base.element(data["delta"]))


@dataclass(frozen=True)
class CMElement:
    """a + b*sqrt(delta) with a, b in F."""

    ext: CMExtension
    a: FieldElement
    b: FieldElement

    def _check(self, other) -> "CMElement":
        if isinstance(other, CMElement):
            if other.ext != self.ext:
                raise ValueError("elements of different CM extensions")
            return other
        if isinstance(other, (int, Fraction, str, FieldElement)):
            return self.ext.element(other)
        raise TypeError(f"cannot coerce {other!r}")

    def __add__(self, other):
        o = self._check(other)
        return CMElement(self.ext, self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return CMElement(self.ext, -self.a, -self.b)

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        o = self._check(other)
        d = self.ext.delta
        return CMElement(self.ext,
                         self.a * o.a + self.b * o.b * d,
                         self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def conj(self) -> "CMElement":
        """The CM conjugation iota: fixes F, negates sqrt(delta)."""
        return CMElement(self.ext, self.a, -self.b)

    def norm_to_base(self) -> FieldElement:
        return self.a * self.a - self.b * self.b * self.ext.delta

    def inv(self) -> "CMElement":
        n = self.norm_to_base()
        if n.is_zero():
            raise DivisionByZero("inversion of zero CM element")
        ninv = n.inv()
        return CMElement(self.ext, self.a * ninv, -self.b * ninv)

    def __truediv__(self, other):
        return self * self._check(other).inv()

    def __eq__(self, other):
        try:
            o = self._check(other)
        except (ValueError, TypeError):
            return NotImplemented
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        return hash((self.a, self.b))

    def is_zero(self) -> bool:
        return self.a.is_zero() and self.b.is_zero()

    def in_base(self) -> bool:
        return self.b.is_zero()

    def __repr__(self):
        return f"CMElement(a={self.a!r}, b={self.b!r})"

    def to_json(self):
        return {"a": self.a.to_json(), "b": self.b.to_json()}


def cm_conjugate(ext: CMExtension, z) -> CMElement:
    """iota(a + b sqrt(delta)) = a - b sqrt(delta)."""
    if isinstance(z, tuple):
        z = CMElement(ext, ext.base.element(z[0]), ext.base.element(z[1]))
    return ext.element(z).conj()


class CMEmbedding:
    """An embedding w: K -> C extending a real place v of F."""

    def __init__(self, ext: CMExtension, place: RealEmbedding):
        self.ext = ext
        self.place = place

    def __call__(self, z: CMElement, precision: int = DEFAULT_PRECISION_BITS) -> complex:
        z = self.ext.element(z)
        va = self.place(z.a, precision)
        vb = self.place(z.b, precision)
        vd = self.place(self.ext.delta, precision)
        # v(delta) < 0; sqrt(delta) goes to +i sqrt(|v(delta)|)
        return complex(va, vb * (-vd) ** 0.5)


def QQ_field() -> NumberField:
    """The rationals, presented as Q[x]/(x)."""
    return NumberField([0, 1])


def gaussian_field() -> CMExtension:
    """Q(i) presented relatively as (Q, -1)."""
    q = QQ_field()
    return CMExtension(q, q.element(-1))
