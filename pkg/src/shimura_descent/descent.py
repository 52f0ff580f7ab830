"""Top-level assembly: factor classification, the strongly-(AD^H) test,
extension of the product involution to the full group, conjugate-point and
descent-cocycle verification, and the Hecke-descent condition.

The group of a type A factor with D = K is realized concretely as the
similitude unitary model GU(h): complex points are pairs (matrix, nu) of the
first-factor matrix and the similitude character, real points are matrices
with X* h X = nu h.  The extension of the derived-group involution to GU is
entrywise CM conjugation; on real points that is entrywise complex
conjugation, and its characterizing restrictions (theta | SU = theta',
theta | Z0 = c_{Z0}) together with the kernel identity of the isogeny
Z0 x G^der -> G are verified numerically on torsion points.
"""

from __future__ import annotations

import cmath
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import NotAdmissible, NotExtendable, ParseError
from .hermitian import (HermitianSpace, SkewHermitianSpace,
                        is_strongly_hermitian, is_strongly_skew_hermitian,
                        place_profile)
from .involution import (DEFAULT_SEED, InvolutionBundle, build_theta_A,
                         build_theta_D, build_y, verify_bundle)
from .numfield import (CMExtension, NumberField, rat, totality_check)
from .quat import QuaternionAlgebra, SecondKindData
from .rootdata import LatticeMap, character_conjugation
from .errors import NotCMSplit

SAMPLE_RADII = (1.0, 2.0)
SAMPLE_ANGLES = 16
POINT_TOL = 1e-9


# ---------------------------------------------------------------------------
# datum specifications

@dataclass
class FactorSpec:
    kind: str
    raw: dict
    space: object | None = None
    error: str | None = None


@dataclass
class CenterSpec:
    rank: int
    galois_generators: list[LatticeMap]
    conjugation: LatticeMap


@dataclass
class DatumSpec:
    factors: list[FactorSpec]
    center: CenterSpec | None
    kernel_points: list[dict] | None
    raw: dict


def _parse_field(data) -> NumberField:
    try:
        return NumberField([int(rat(c)) for c in data["min_poly"]])
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad number field data: {exc}") from exc


def _parse_factor(data: dict) -> FactorSpec:
    kind = data.get("kind")
    spec = FactorSpec(kind=kind, raw=data)
    try:
        if kind == "typeA":
            F = _parse_field(data["field"])
            delta = F.element([rat(c) for c in data["delta"]])
            if not totality_check(F, delta, "totally_negative"):
                spec.error = ("K must be a field and a CM extension of F: "
                              "delta is not totally negative")
                return spec
            K = CMExtension(F, delta)
            deg = int(data.get("degree_over_K", 1))
            if deg == 1:
                algebra = K
            elif deg == 2:
                qa = data["quaternion"]
                D0 = QuaternionAlgebra(F, F.element([rat(c) for c in qa["a"]]),
                                       F.element([rat(c) for c in qa["b"]]))
                algebra = SecondKindData(K, D0)
            else:
                spec.error = (f"degree_over_K = {deg}: the Brauer class of D "
                              "must have order 1 or 2")
                return spec
            gram = [F.element([rat(c) for c in q]) for q in data["gram"]]
            spec.space = HermitianSpace(algebra, gram)
        elif kind == "typeD":
            F = _parse_field(data["field"])
            qa = data["quaternion"]
            D = QuaternionAlgebra(F, F.element([rat(c) for c in qa["a"]]),
                                  F.element([rat(c) for c in qa["b"]]))

            def quat(coeffs):
                return D.element([F.element([rat(c) for c in comp])
                                  for comp in coeffs])

            spec.space = SkewHermitianSpace(
                D, [quat(q) for q in data["gram"]], quat(data["r"]))
        else:
            spec.error = f"factor kind {kind!r} is outside type A / type D^H"
    except ParseError:
        raise
    except KeyError as exc:
        raise ParseError(f"factor is missing field {exc}") from exc
    except (TypeError, ValueError) as exc:
        spec.error = str(exc)
    return spec


def parse_datum_spec(data: dict) -> DatumSpec:
    if not isinstance(data, dict) or "factors" not in data:
        raise ParseError("datum spec needs a 'factors' list")
    factors = [_parse_factor(f) for f in data["factors"]]
    center = None
    if "center" in data and data["center"] is not None:
        c = data["center"]
        try:
            center = CenterSpec(
                rank=int(c["rank"]),
                galois_generators=[LatticeMap.from_json(m)
                                   for m in c.get("galois_generators", [])],
                conjugation=LatticeMap.from_json(c["conjugation"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad center data: {exc}") from exc
    return DatumSpec(factors=factors, center=center,
                     kernel_points=data.get("kernel_points"), raw=data)


def load_datum_spec(path: str) -> DatumSpec:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read datum spec: {exc}") from exc
    return parse_datum_spec(data)


# ---------------------------------------------------------------------------
# classification

def classify_factor(factor: FactorSpec) -> dict:
    """Admissibility of one simple factor, with the reason."""
    if factor.error is not None:
        return {"admissible": False, "reason": factor.error}
    space = factor.space
    if factor.kind == "typeA":
        ok, reasons = is_strongly_hermitian(space)
        if not ok:
            return {"admissible": False, "reason": "; ".join(reasons)}
        if space.kind_m * space.dim < 3:
            return {"admissible": False,
                    "reason": "rank below A_2 is out of scope"}
        prof = place_profile(space)
        if not prof.I_nc:
            return {"admissible": False,
                    "reason": "factor has no noncompact places"}
        return {"admissible": True, "reason": "; ".join(reasons)}
    if factor.kind == "typeD":
        ok, reasons = is_strongly_skew_hermitian(space)
        if not ok:
            return {"admissible": False, "reason": "; ".join(reasons)}
        prof = place_profile(space)
        if not prof.I_nc:
            return {"admissible": False,
                    "reason": "factor has no noncompact places"}
        return {"admissible": True, "reason": "; ".join(reasons)}
    return {"admissible": False,
            "reason": f"factor kind {factor.kind!r} is outside type A / D^H"}


def is_strongly_ADH(spec: DatumSpec) -> bool:
    return bool(spec.factors) and all(classify_factor(f)["admissible"]
                                      for f in spec.factors)


# ---------------------------------------------------------------------------
# the similitude unitary model and the extended involution

class SimilitudeModel:
    """GU(h) at one noncompact place of a type A factor with D = K.

    Real points are complex matrices with X* h X = nu(X) h; the extended
    involution acts on them by entrywise complex conjugation.
    """

    def __init__(self, bundle, place: int):
        if bundle.kind != "typeA" or bundle.space.kind_m != 1:
            raise NotAdmissible("the similitude model is the D = K case")
        self.bundle = bundle
        self.place = place
        self.model = bundle.model_at(place)
        self.n = bundle.space.dim
        self.h = self.model.Qp

    def theta(self, X: np.ndarray) -> np.ndarray:
        """Entrywise CM conjugation on real points."""
        return np.conj(X)

    def theta_derived(self, X: np.ndarray) -> np.ndarray:
        """The derived-group involution Q^{-1} tX^{-1} Q."""
        return self.model.theta_point(X)

    def nu(self, X: np.ndarray) -> complex:
        prod = X.conj().T @ self.h @ X
        k = int(np.argmax(np.abs(np.diag(self.h))))
        return prod[k, k] / self.h[k, k]

    def in_group(self, X: np.ndarray, tol: float = 1e-8) -> bool:
        nu = self.nu(X)
        return bool(np.allclose(X.conj().T @ self.h @ X, nu * self.h,
                                atol=tol * max(1.0, abs(nu))))

    def hodge_point(self, z: complex) -> np.ndarray:
        return self.model.hodge_matrix(z)


@dataclass
class ExtensionResult:
    extension_ok: bool
    restriction_to_derived_ok: bool
    restriction_to_center_ok: bool
    kernel_checks: list[dict] = field(default_factory=list)
    central_inversion_ok: bool = True
    generator_independence_ok: bool = True
    notes: list[str] = field(default_factory=list)


def _kernel_pairs(n: int, powers=None):
    """C-points of ker(Z0 x SU -> GU): (zeta, zeta^{-1} I) for zeta^n = 1."""
    if powers is None:
        powers = range(n)
    return [cmath.exp(2j * cmath.pi * k / n) for k in powers]


def extend_involution(spec: DatumSpec, bundles: list[InvolutionBundle],
                      tol: float = 1e-12) -> ExtensionResult:
    """Extend the product involution to the full group on explicit models.

    For each GU-type factor the extension is entrywise CM conjugation; the
    kernel of Z0 x G^der -> G is checked pointwise on torsion points
    ((zeta, zeta^{-1} I) maps to theta'(zeta^{-1} I) c(zeta) = 1), central
    torsion is inverted, and the two characterizing restrictions are
    verified on samples.  Factors modelled adjointly contribute theta'
    itself and no kernel conditions.
    """
    out = ExtensionResult(True, True, True)
    if spec.center is not None:
        try:
            character_conjugation(spec.center.rank,
                                  spec.center.galois_generators,
                                  spec.center.conjugation)
            out.notes.append("center passes the CM-split commutation check")
        except NotCMSplit as exc:
            out.extension_ok = False
            out.notes.append(f"center: {exc}")
            return out
    gu_seen = False
    for bundle in bundles:
        if bundle.kind != "typeA" or bundle.space.kind_m != 1:
            out.notes.append(f"{bundle.kind} factor handled adjointly: "
                             "extension is theta' itself")
            continue
        gu_seen = True
        rng = np.random.default_rng(bundle.seed + 99)
        for place in bundle.noncompact_places():
            gm = SimilitudeModel(bundle, place)
            n = gm.n
            # restriction to the derived group: conj(X) = Q^{-1} tX^{-1} Q
            for _ in range(10):
                g = gm.model.group_sample(rng)
                if not np.allclose(gm.theta(g), gm.theta_derived(g),
                                   atol=1e-8):
                    out.restriction_to_derived_ok = False
            # restriction to the connected center: scalars map to conjugates
            for z in (0.3 + 1.1j, -2.0 + 0.4j):
                lhs = gm.theta(z * np.eye(n, dtype=complex))
                if not np.allclose(lhs, np.conj(z) * np.eye(n), atol=tol):
                    out.restriction_to_center_ok = False
            # kernel pairs
            powers_sets = [list(range(n)), [1] if n > 1 else [0]]
            if spec.kernel_points:
                powers_sets.append([int(p.get("power", 1)) % n
                                    for p in spec.kernel_points])
            results = []
            for powers in powers_sets:
                all_ok = True
                for zeta in _kernel_pairs(n, powers):
                    g = zeta ** (-1) * np.eye(n, dtype=complex)
                    img = gm.theta_derived(g) * zeta ** (-1)
                    ok = bool(np.abs(img - np.eye(n)).max() <= tol * 10)
                    all_ok = all_ok and ok
                    results.append({"order": n, "zeta": _cplx(zeta), "ok": ok})
                if not all_ok:
                    out.extension_ok = False
            out.kernel_checks.extend(results)
            if len({all(r["ok"] for r in results)}) != 1:
                out.generator_independence_ok = False
            # central torsion inversion, orders up to 6
            for k in range(1, 7):
                zeta = cmath.exp(2j * cmath.pi / k)
                if abs(zeta ** n - 1) > 1e-9:
                    continue
                img = gm.theta_derived(zeta * np.eye(n, dtype=complex))
                if np.abs(img - zeta ** (-1) * np.eye(n)).max() > tol * 10:
                    out.central_inversion_ok = False
    if not gu_seen:
        out.notes.append("no GU-type factor: extension is the product of the "
                         "factor involutions")
    out.extension_ok = (out.extension_ok and out.restriction_to_derived_ok
                        and out.restriction_to_center_ok
                        and out.central_inversion_ok)
    if not out.extension_ok and not out.kernel_checks:
        raise NotExtendable("kernel verification failed with no kernel data")
    return out


# ---------------------------------------------------------------------------
# point and cocycle checks

def _sample_z():
    for radius in SAMPLE_RADII:
        for k in range(SAMPLE_ANGLES):
            yield radius * cmath.exp(2j * cmath.pi * k / SAMPLE_ANGLES)


def conjugate_point_check(theta, x, tol: float = POINT_TOL) -> bool:
    """theta(x(z)) = x(conj z) on the sampling grid."""
    for z in _sample_z():
        lhs = theta(x(z))
        rhs = x(np.conj(z))
        scale = max(1.0, float(np.abs(rhs).max()))
        if np.abs(lhs - rhs).max() > tol * scale:
            return False
    return True


def cocycle_check(theta, x, tol: float = POINT_TOL) -> bool:
    """Phi(h) = theta o (h o c) squares to the identity on x, pointwise.

    This is the computable core of the effectivity identity
    psi o iota(psi) o n = id for the descent datum.
    """
    def phi(h):
        return lambda z: theta(h(np.conj(z)))

    phi2 = phi(phi(x))
    for z in _sample_z():
        lhs = phi2(z)
        rhs = x(z)
        scale = max(1.0, float(np.abs(rhs).max()))
        if np.abs(lhs - rhs).max() > tol * scale:
            return False
    return True


def corrupted_theta(theta, n: int):
    """Negative control: twist theta by a real shear against the last
    coordinate (where the Hodge pattern differs), breaking theta^2 = id."""
    U = np.eye(n)
    U[0, n - 1] = 1.0
    Uinv = np.linalg.inv(U)
    return lambda X: U @ theta(X) @ Uinv


def hecke_descent_condition(theta, q: np.ndarray, tol: float = 1e-12) -> dict:
    """theta(q) and the sufficient descent condition theta(q) = q.

    The full criterion is the Hecke-operator identity T_theta(q) = T_q; only
    the group-element equality is decided here, so a False answer does not
    exclude descent through the double coset.
    """
    tq = theta(q)
    same = bool(np.abs(tq - q).max() <= tol * max(1.0, float(np.abs(q).max())))
    return {"theta_q": tq, "descends_if_equal": same,
            "note": "sufficient condition theta(q) = q; the double-coset "
                    "criterion T_theta(q) = T_q is not decided"}


# ---------------------------------------------------------------------------
# report assembly

def _cplx(z: complex, precision_bits: int = 53) -> dict:
    return {"re": float(z.real), "im": float(z.imag),
            "precision_bits": precision_bits}


@dataclass
class DescentReport:
    factors: list[dict]
    strongly_ADH: bool
    extension_ok: bool
    conjugate_point_ok: bool
    cocycle_ok: bool
    negative_control_fails: bool
    hecke: list[dict]
    bundle_reports: list[dict]
    diagnostics: dict

    def all_ok(self) -> bool:
        return (self.strongly_ADH and self.extension_ok
                and self.conjugate_point_ok and self.cocycle_ok
                and self.negative_control_fails
                and all(r.get("all_ok", False) for r in self.bundle_reports))

    def to_json(self) -> dict:
        return {
            "factors": self.factors,
            "strongly_ADH": self.strongly_ADH,
            "extension_ok": self.extension_ok,
            "conjugate_point_ok": self.conjugate_point_ok,
            "cocycle_ok": self.cocycle_ok,
            "negative_control_fails": self.negative_control_fails,
            "hecke": self.hecke,
            "bundles": self.bundle_reports,
            "diagnostics": self.diagnostics,
            "all_ok": self.all_ok(),
        }


def build_bundles(spec: DatumSpec, seed: int = DEFAULT_SEED):
    bundles = []
    for f in spec.factors:
        cls = classify_factor(f)
        if not cls["admissible"]:
            raise NotAdmissible(cls["reason"])
        if f.kind == "typeA":
            bundles.append(build_theta_A(f.space, seed=seed))
        else:
            bundles.append(build_theta_D(f.space, seed=seed))
    return bundles


def verify_datum(spec: DatumSpec, seed: int = DEFAULT_SEED,
                 samples: int = 50, hecke_qs=None) -> DescentReport:
    """Run the full descent pipeline on a datum specification."""
    factor_reports = [classify_factor(f) for f in spec.factors]
    strongly = bool(spec.factors) and all(r["admissible"] for r in factor_reports)
    diagnostics = {"seed": seed}
    if not strongly:
        return DescentReport(factor_reports, False, False, False, False,
                             False, [], [], diagnostics)
    bundles = build_bundles(spec, seed)
    bundle_reports = [verify_bundle(b, samples=samples) for b in bundles]

    ext = extend_involution(spec, bundles)
    diagnostics["extension"] = {
        "kernel_checks": ext.kernel_checks,
        "central_inversion_ok": ext.central_inversion_ok,
        "generator_independence_ok": ext.generator_independence_ok,
        "restriction_to_derived_ok": ext.restriction_to_derived_ok,
        "restriction_to_center_ok": ext.restriction_to_center_ok,
        "notes": ext.notes,
    }

    conj_ok = True
    coc_ok = True
    neg_fails = True
    hecke_out = []
    for bundle in bundles:
        for place in bundle.noncompact_places():
            if bundle.kind == "typeA" and bundle.space.kind_m == 1:
                gm = SimilitudeModel(bundle, place)
                theta = gm.theta
                x = gm.hodge_point
                conj_ok = conj_ok and conjugate_point_check(theta, x)
                coc_ok = coc_ok and cocycle_check(theta, x)
                bad = corrupted_theta(theta, gm.n)
                neg_fails = neg_fails and not cocycle_check(bad, x)
                if hecke_qs is None:
                    qs = _default_hecke_qs(gm.n)
                else:
                    qs = hecke_qs
                for label, q in qs:
                    res = hecke_descent_condition(theta, q)
                    hecke_out.append({"q": label,
                                      "descends": res["descends_if_equal"],
                                      "note": res["note"]})
            else:
                # adjoint-model factor: theta(x) = conj(x) holds modulo the
                # center; check theta(x(z)) x(conj z)^{-1} is scalar
                model = bundle.models[place]
                y = build_y(bundle, place)

                def theta(X, m=model):
                    return m.theta_point(X)

                ok = True
                for z in _sample_z():
                    lhs = theta(y.matrix(z))
                    rhs = y.matrix(np.conj(z))
                    ratio = lhs @ np.linalg.inv(rhs)
                    scal = ratio[0, 0]
                    if not np.allclose(ratio, scal * np.eye(ratio.shape[0]),
                                       atol=1e-8 * max(1.0, abs(scal))):
                        ok = False
                conj_ok = conj_ok and ok
    report = DescentReport(
        factors=factor_reports,
        strongly_ADH=strongly,
        extension_ok=ext.extension_ok,
        conjugate_point_ok=conj_ok,
        cocycle_ok=coc_ok and ext.extension_ok,
        negative_control_fails=neg_fails,
        hecke=hecke_out,
        bundle_reports=bundle_reports,
        diagnostics=diagnostics,
    )
    return report


def _default_hecke_qs(n: int):
    q_rat = np.eye(n, dtype=complex)
    q_rat[0, min(1, n - 1)] = 2.0
    q_bad = np.eye(n, dtype=complex)
    q_bad[0, 0] = 1j
    return [("rational-entries", q_rat), ("identity", np.eye(n, dtype=complex)),
            ("diag(i,1,...)", q_bad)]


# ---------------------------------------------------------------------------
# canned specification: the GU(2,1)/Q(i) datum used by the acceptance gate

def gu21_spec_json() -> dict:
    return {
        "factors": [
            {
                "kind": "typeA",
                "field": {"min_poly": [0, 1]},
                "delta": ["-1"],
                "degree_over_K": 1,
                "gram": [["1"], ["1"], ["-1"]],
            }
        ],
        "center": {
            "rank": 2,
            "galois_generators": [[[0, 1], [1, 0]]],
            "conjugation": [[0, 1], [1, 0]],
        },
    }
