"""Command line interface.

    sdk classify  --input spec.json
    sdk involution --input spec.json --out bundle.json
    sdk verify    --input spec.json [--seed N] [--precision BITS] --report report.json
    sdk hecke     --input spec.json --q q.json

Exit code 0 iff every check requested by the subcommand passes.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import numfield
from .descent import (build_bundles, classify_factor, hecke_descent_condition,
                      is_strongly_ADH, load_datum_spec, SimilitudeModel,
                      verify_datum)
from .errors import SdkError
from .involution import verify_bundle
from .numfield import rat


def _cplx(z, bits: int) -> dict:
    return {"re": float(np.real(z)), "im": float(np.imag(z)),
            "precision_bits": bits}


def cmd_classify(args) -> int:
    spec = load_datum_spec(args.input)
    results = [classify_factor(f) for f in spec.factors]
    out = {"factors": results, "strongly_ADH": is_strongly_ADH(spec)}
    print(json.dumps(out, indent=2))
    return 0 if out["strongly_ADH"] else 1


def cmd_involution(args) -> int:
    spec = load_datum_spec(args.input)
    bundles = build_bundles(spec, seed=args.seed)
    reports = [verify_bundle(b, samples=args.samples) for b in bundles]
    payload = {"bundles": reports, "seed": args.seed}
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(payload, fh, indent=2)
    else:
        print(json.dumps(payload, indent=2))
    return 0 if all(r["all_ok"] for r in reports) else 1


def cmd_verify(args) -> int:
    numfield.DEFAULT_PRECISION_BITS = args.precision
    spec = load_datum_spec(args.input)
    report = verify_datum(spec, seed=args.seed, samples=args.samples)
    payload = report.to_json()
    if args.report:
        with open(args.report, "w") as fh:
            json.dump(payload, fh, indent=2)
    else:
        print(json.dumps(payload, indent=2))
    return 0 if report.all_ok() else 1


def _parse_q(path: str, n: int) -> np.ndarray:
    with open(path) as fh:
        data = json.load(fh)
    rows = data["matrix"]
    q = np.zeros((len(rows), len(rows[0])), dtype=complex)
    for i, row in enumerate(rows):
        for j, entry in enumerate(row):
            if isinstance(entry, list):
                re, im = entry
            else:
                re, im = entry, 0
            q[i, j] = complex(float(rat(re)), float(rat(im)))
    if q.shape != (n, n):
        raise SdkError(f"q has shape {q.shape}, model needs {(n, n)}")
    return q


def cmd_hecke(args) -> int:
    spec = load_datum_spec(args.input)
    bundles = build_bundles(spec, seed=args.seed)
    out = []
    ok = True
    for bundle in bundles:
        if bundle.kind != "typeA" or bundle.space.kind_m != 1:
            continue
        place = bundle.noncompact_places()[0]
        gm = SimilitudeModel(bundle, place)
        q = _parse_q(args.q, gm.n)
        res = hecke_descent_condition(gm.theta, q)
        out.append({
            "place": place,
            "descends_if_equal": res["descends_if_equal"],
            "theta_q": [[_cplx(z, 53) for z in row] for row in res["theta_q"]],
            "note": res["note"],
        })
        ok = ok and res["descends_if_equal"]
    print(json.dumps({"hecke": out}, indent=2))
    return 0 if ok else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="sdk",
        description="Verify opposition-involution descent data for Shimura "
                    "datum specifications")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--input", required=True, help="datum spec JSON")
        p.add_argument("--seed", type=int, default=20240808)
        p.add_argument("--samples", type=int, default=50,
                       help="random samples per numeric identity check")

    p = sub.add_parser("classify", help="factor admissibility")
    common(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("involution", help="build and verify the involution "
                                          "bundles")
    common(p)
    p.add_argument("--out", help="write bundle reports to this JSON file")
    p.set_defaults(func=cmd_involution)

    p = sub.add_parser("verify", help="full descent verification pipeline")
    common(p)
    p.add_argument("--precision", type=int, default=128,
                   help="working precision (bits) for embeddings")
    p.add_argument("--report", help="write the report to this JSON file")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("hecke", help="sufficient Hecke descent condition")
    common(p)
    p.add_argument("--q", required=True, help="JSON file with the matrix q")
    p.set_defaults(func=cmd_hecke)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SdkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
