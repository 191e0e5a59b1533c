"""Command-line front end: instance generation, distance computation, unitary
construction, and the inequality audit with machine-readable reports.

Exit codes: 0 all pass, 1 verdict failure, 2 input error, 3 partial result
(a mass mismatch was reported).  All randomness derives from the named seed.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass

import numpy as np

from .builder import BuildCertificate, BuildRequest, build_weyl_unitary
from .distances import delta_matching
from .errors import MassMismatch, OrbitDistError
from .razak import (RazakElement, RazakParams, d_p_path, d_w_path, dist_norm,
                    gen_random, validate)

CHAIN_TOL = 1e-9

CSV_COLUMNS = [
    "instance", "seed", "k", "n", "N", "gamma",
    "delta", "d_w", "d_p", "d_u_lower", "d_u_upper", "dist_norm",
    "r", "epsilon", "sup_error", "unitarity_defect", "membership_defect",
    "continuity_constant", "refinement_count", "lipschitz_a", "lipschitz_b",
    "lemma_cts", "lemma_levy", "factor_8", "theorem_nccw",
]


@dataclass
class AuditRecord:
    """One audited instance; verdicts are pure functions of the stored values."""

    instance: int
    seed: int
    params: RazakParams
    delta: float
    d_w: float
    d_p: float | None
    d_u_lower: float
    d_u_upper: float
    dist_norm: float
    r: float
    epsilon: float
    certificate: BuildCertificate
    lipschitz_a: float
    lipschitz_b: float

    def verdicts(self) -> dict[str, bool | None]:
        return compute_verdicts(self.d_w, self.d_p, self.d_u_upper,
                                self.dist_norm, self.certificate.passed)

    def to_row(self) -> list[str]:
        v = self.verdicts()
        p = self.params
        c = self.certificate
        vals = [self.instance, self.seed, p.k, p.n, p.grid, repr(p.gamma),
                repr(self.delta), repr(self.d_w),
                "" if self.d_p is None else repr(self.d_p),
                repr(self.d_u_lower), repr(self.d_u_upper), repr(self.dist_norm),
                repr(self.r), repr(self.epsilon), repr(c.sup_error),
                repr(c.unitarity_defect), repr(c.membership_defect),
                repr(c.continuity_constant), c.refinement_count,
                repr(self.lipschitz_a), repr(self.lipschitz_b),
                v["lemma_cts"], "" if v["lemma_levy"] is None else v["lemma_levy"],
                v["factor_8"], v["theorem_nccw"]]
        return [str(x) for x in vals]


def compute_verdicts(d_w: float, d_p: float | None, d_u_upper: float,
                     norm: float, cert_passed: bool) -> dict[str, bool | None]:
    lemma_cts = (d_w <= d_u_upper + CHAIN_TOL) and (d_w <= norm + CHAIN_TOL)
    lemma_levy = None
    if d_p is not None:
        lemma_levy = (d_w <= d_p + CHAIN_TOL) and (d_p <= d_u_upper + CHAIN_TOL)
    factor_8 = d_u_upper <= 8.0 * d_w + CHAIN_TOL
    return {"lemma_cts": lemma_cts, "lemma_levy": lemma_levy,
            "factor_8": factor_8, "theorem_nccw": cert_passed}


def _params_from_args(args) -> RazakParams:
    return RazakParams(args.k, args.n, args.grid, args.gamma)


def _load_element(path: str) -> RazakElement:
    with open(path) as fh:
        element = RazakElement.from_json(json.load(fh))
    report = validate(element)
    if not report.passed:
        failed = ", ".join(c.name for c in report.failures())
        raise OrbitDistError(f"{path}: element fails validation ({failed})")
    return element


def _fiber_delta(a: RazakElement, b: RazakElement) -> float:
    return max(delta_matching(lam_a, lam_b)
               for (lam_a, _), (lam_b, _) in zip(a.spectra(), b.spectra()))


def cmd_gen(args) -> int:
    params = _params_from_args(args)
    element = gen_random(params, args.seed, full_spectrum=args.full_spectrum)
    with open(args.out, "w") as fh:
        json.dump(element.to_json(), fh, indent=2)
        fh.write("\n")
    return 0


def cmd_dist(args) -> int:
    a = _load_element(args.a)
    b = _load_element(args.b)
    d_w = d_w_path(a, b)
    delta = _fiber_delta(a, b)
    mismatch = False
    try:
        d_p = d_p_path(a, b, stride=args.traces)
    except MassMismatch as exc:
        print(f"mass mismatch: {exc}", file=sys.stderr)
        d_p = None
        mismatch = True
    d_u_upper = None
    if args.build:
        r = args.r if args.r is not None else d_w + 0.01
        _, cert = build_weyl_unitary(BuildRequest(a, b, r, args.epsilon))
        d_u_upper = min(cert.sup_error, dist_norm(a, b))
    report = {
        "delta": delta,
        "d_w": d_w,
        "d_p": d_p,
        "d_u_upper": d_u_upper,
        "d_u_lower": d_w,
        "witness": None,
        "mass_mismatch": mismatch,
    }
    print(json.dumps(report, indent=2))
    return 3 if mismatch else 0


def cmd_build(args) -> int:
    a = _load_element(args.a)
    b = _load_element(args.b)
    r = args.r if args.r is not None else d_w_path(a, b) + 0.01
    path, cert = build_weyl_unitary(BuildRequest(a, b, r, args.epsilon))
    print(json.dumps(cert.to_json(), indent=2))
    if args.out:
        with open(args.out, "w") as fh:
            json.dump({"certificate": cert.to_json(),
                       "witness_path": path.to_json()}, fh, indent=2)
            fh.write("\n")
    return 0 if cert.passed else 1


def audit_instance(instance: int, seed: int, params: RazakParams,
                   epsilon: float) -> AuditRecord:
    a = gen_random(params, (seed, instance, 0), full_spectrum=True)
    b = gen_random(params, (seed, instance, 1), full_spectrum=True)
    d_w = d_w_path(a, b)
    try:
        d_p = d_p_path(a, b)
    except MassMismatch:
        d_p = None
    r = d_w + 0.01
    _, cert = build_weyl_unitary(BuildRequest(a, b, r, epsilon))
    norm = dist_norm(a, b)
    return AuditRecord(
        instance=instance, seed=seed, params=params,
        delta=_fiber_delta(a, b), d_w=d_w, d_p=d_p, d_u_lower=d_w,
        d_u_upper=min(cert.sup_error, norm), dist_norm=norm,
        r=r, epsilon=epsilon, certificate=cert,
        lipschitz_a=a.lipschitz, lipschitz_b=b.lipschitz)


def cmd_audit(args) -> int:
    params = _params_from_args(args)
    records = [audit_instance(i, args.seed, params, args.epsilon)
               for i in range(args.count)]
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for rec in records:
            writer.writerow(rec.to_row())
    violations = {"lemma_cts": 0, "lemma_levy": 0, "factor_8": 0,
                  "theorem_nccw": 0}
    mismatch = False
    ratios = []
    for rec in records:
        for name, verdict in rec.verdicts().items():
            if verdict is None:
                mismatch = True
            elif not verdict:
                violations[name] += 1
        ratios.append((rec.d_u_upper - rec.d_w) / max(rec.d_w, 1e-6))
    summary = {
        "count": len(records),
        "violations": violations,
        "max_ratio": max(ratios) if ratios else 0.0,
        "mass_mismatch_present": mismatch,
        "pass": all(v == 0 for v in violations.values()),
    }
    print(json.dumps(summary, indent=2))
    if not summary["pass"]:
        return 1
    return 3 if mismatch else 0


def _add_params(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--k", type=int, default=2, help="core block size")
    parser.add_argument("--n", type=int, default=2, help="number of blocks")
    parser.add_argument("--grid", type=int, default=256,
                        help="number of grid intervals N")
    parser.add_argument("--gamma", type=float, default=0.1,
                        help="flat fraction at each end, in (0, 1/2)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="orbitdist",
        description="Spectral distances between unitary orbits of positive "
                    "matrix paths, with a certified conjugating-unitary builder.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("gen", help="generate a random path element")
    p_gen.add_argument("--seed", type=int, required=True)
    _add_params(p_gen)
    p_gen.add_argument("--full-spectrum", action="store_true")
    p_gen.add_argument("--out", required=True)
    p_gen.set_defaults(func=cmd_gen)

    p_dist = sub.add_parser("dist", help="distances between two elements")
    p_dist.add_argument("a")
    p_dist.add_argument("b")
    p_dist.add_argument("--traces", type=int, default=1,
                        help="stride over the point-evaluation trace grid")
    p_dist.add_argument("--build", action="store_true",
                        help="also build the conjugating unitary for d_u_upper")
    p_dist.add_argument("--r", type=float, default=None)
    p_dist.add_argument("--epsilon", type=float, default=0.05)
    p_dist.set_defaults(func=cmd_dist)

    p_build = sub.add_parser("build-unitary",
                             help="build and certify the conjugating unitary")
    p_build.add_argument("a")
    p_build.add_argument("b")
    p_build.add_argument("--r", type=float, default=None,
                         help="target radius; defaults to d_w + 0.01")
    p_build.add_argument("--epsilon", type=float, default=0.05)
    p_build.add_argument("--out", default=None,
                         help="write certificate plus witness path JSON here")
    p_build.set_defaults(func=cmd_build)

    p_audit = sub.add_parser("audit", help="run the inequality audit")
    p_audit.add_argument("--count", type=int, required=True)
    p_audit.add_argument("--seed", type=int, required=True)
    _add_params(p_audit)
    p_audit.add_argument("--epsilon", type=float, default=0.05)
    p_audit.add_argument("--out", required=True, help="CSV output path")
    p_audit.set_defaults(func=cmd_audit)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except (OrbitDistError, OSError, json.JSONDecodeError, KeyError,
            ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
