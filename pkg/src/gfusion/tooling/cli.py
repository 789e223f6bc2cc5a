"""``gfusion`` command-line interface.

Every verb prints one JSON object (``certify`` prints its report).  Exit status
is 0 when all verdicts hold, 1 when any verdict is false or a computation
fails, and 2 for usage, file or parse errors.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from gfusion.duals import canonical_dual, verify_dual_operator
from gfusion.errors import GFusionError, ParseError, ValidationError
from gfusion.frames import (
    BoundCertificate,
    CertificateKind,
    optimal_bounds,
    optimal_k_lower_bound,
    verify_certificate,
)
from gfusion.linalg import inverse
from gfusion.quotient import quotient_equivalence_report
from gfusion.stability import dual_stability_report
from gfusion.tooling.certify import SUITES, CertificationRun, emit_report, run_certification
from gfusion.tooling.generate import Profile, random_family
from gfusion.tooling.specfile import dump_spec, load_spec
from gfusion.transforms import (
    conjugate_transform,
    conjugated_family,
    k_dual_transform,
    member_map_transform,
    projected_dual_transform,
    pull_back_transform,
)

EXIT_OK, EXIT_FALSE, EXIT_USAGE = 0, 1, 2
THEOREMS = ("3.1", "3.2", "3.3", "3.4", "3.5")


class UsageError(Exception):
    pass


def _num(x):
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else str(x)


def _emit(obj, verdicts):
    obj = dict(obj)
    obj["verdicts"] = {k: bool(v) for k, v in verdicts.items()}
    print(json.dumps(obj))
    return EXIT_OK if all(verdicts.values()) else EXIT_FALSE


def _key(doc, key, default_identity=False):
    if key is None:
        if default_identity:
            return np.eye(doc.ambient_dim)
        raise UsageError("an operator key is required")
    try:
        return doc.operator(key)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None


def _cert_json(cert):
    return {
        "kind": cert.kind.value,
        "lower": _num(cert.lower),
        "upper": _num(cert.upper),
        "margins": [_num(m) for m in cert.margins],
    }


def cmd_bounds(args):
    doc = load_spec(args.spec)
    b = optimal_bounds(doc.family)
    return _emit({"lower": _num(b.lower), "upper": _num(b.upper), "class": b.frame_class.value}, {})


def cmd_verify(args):
    doc = load_spec(args.spec)
    if args.K is not None:
        if args.A is None:
            raise UsageError("--K needs --A")
        cert = BoundCertificate(CertificateKind.K_FRAME, args.B, args.A, _key(doc, args.K))
    elif args.A is not None:
        cert = BoundCertificate(CertificateKind.FRAME, args.B, args.A)
    else:
        cert = BoundCertificate(CertificateKind.BESSEL, args.B)
    cert = verify_certificate(doc.family, cert)
    return _emit(_cert_json(cert), {"certificate": cert.verdict})


def cmd_dual(args):
    doc = load_spec(args.spec)
    pair = canonical_dual(doc.family)
    chk = verify_dual_operator(pair)
    b = optimal_bounds(pair.dual)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(dump_spec(pair.dual))
    return _emit(
        {"dual_lower": _num(b.lower), "dual_upper": _num(b.upper), "operator_residual": _num(chk.residual)},
        {"dual_operator": chk.holds},
    )


def _bounds_for(family, K, args):
    A = args.A if args.A is not None else optimal_k_lower_bound(family, K)
    B = args.B if args.B is not None else optimal_bounds(family).upper
    if A is None:
        raise GFusionError("the family has no positive K-relative lower bound")
    return A, B


def cmd_transform(args):
    doc = load_spec(args.spec)
    fam = doc.family
    operators = {}
    if args.theorem == "3.1":
        U, K = _key(doc, args.U), _key(doc, args.K, True)
        result = conjugate_transform(fam, U, K, _bounds_for(fam, K, args))
    elif args.theorem == "3.2":
        # the spec holds the transformed family; recover the original from U
        U, K = _key(doc, args.U), _key(doc, args.K, True)
        original = conjugated_family(fam, inverse(U))
        result = pull_back_transform(fam, original, U, K, _bounds_for(fam, K, args))
    elif args.theorem == "3.3":
        result = k_dual_transform(fam, _key(doc, args.K, True))
    elif args.theorem == "3.4":
        result = projected_dual_transform(fam, _key(doc, args.V))
    else:
        T, K = _key(doc, args.T), _key(doc, args.K, True)
        if doc.member_maps is None:
            raise UsageError("theorem 3.5 needs member_maps in the spec")
        result = member_map_transform(fam, T, doc.member_maps, K, _bounds_for(fam, K, args))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(dump_spec(result.output, {"K": result.relative_to}))
    verdicts = {"certificate": result.guaranteed.verdict}
    for name in ("operator_identity", "assembly_identity"):
        if name in result.checks:
            verdicts[name] = result.checks[name] <= 1e-8
    checks = {k: _num(v) for k, v in result.checks.items()}
    return _emit(
        {"provenance": result.provenance.value, "guaranteed": _cert_json(result.guaranteed), "checks": checks},
        verdicts,
    )


def cmd_perturb(args):
    lhs, rhs = load_spec(args.lhs).family, load_spec(args.rhs).family
    r = dual_stability_report(lhs, rhs)
    fields = ("d_opt", "frame_op_distance", "inverse_distance", "dual_gap", "dual_operator_distance",
              "bound_421", "bound_422_I", "bound_422_II")
    return _emit({f: _num(getattr(r, f)) for f in fields}, r.verdicts)


def cmd_quotient(args):
    doc = load_spec(args.spec)
    r = quotient_equivalence_report(doc.family, _key(doc, args.K), _key(doc, args.U))

    def cond(c):
        return {"holds": bool(c[0]), "value": _num(c[1])}

    return _emit(
        {
            "cond_I": cond(r.cond_I),
            "cond_II": cond(r.cond_II),
            "cond_III": cond(r.cond_III),
            "bridge_lower_bound": _num(r.bridge_lower_bound),
        },
        {"consistent": r.consistent},
    )


def cmd_certify(args):
    run = run_certification(CertificationRun(args.suite, args.seed, tuple(args.dims), args.trials))
    sys.stdout.write(emit_report(run, args.format))
    return EXIT_OK if run.ok else EXIT_FALSE


def cmd_random(args):
    fam = random_family(args.seed, args.dim, args.members, args.max_subspace_dim,
                        args.max_codomain_dim, args.profile)
    text = dump_spec(fam)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gfusion", description=__doc__.splitlines()[0])
    p.add_argument("--tol", type=float, help="relative tolerance (overrides GFUSION_TOL)")
    sub = p.add_subparsers(dest="verb", required=True)

    s = sub.add_parser("bounds", help="optimal frame bounds and class")
    s.add_argument("spec")
    s.set_defaults(func=cmd_bounds)

    s = sub.add_parser("verify", help="check claimed bounds")
    s.add_argument("spec")
    s.add_argument("--A", type=float)
    s.add_argument("--B", type=float, required=True)
    s.add_argument("--K", help="operator key for a K-relative lower bound")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("dual", help="canonical dual")
    s.add_argument("spec")
    s.add_argument("--out")
    s.set_defaults(func=cmd_dual)

    s = sub.add_parser("transform", help="build a transformed family with guaranteed bounds")
    s.add_argument("spec")
    s.add_argument("--theorem", choices=THEOREMS, required=True)
    for key in ("U", "T", "K", "V"):
        s.add_argument(f"--{key}", help=f"operator key for {key}")
    s.add_argument("--A", type=float, help="input lower bound (default: optimal)")
    s.add_argument("--B", type=float, help="input upper bound (default: optimal)")
    s.add_argument("--out")
    s.set_defaults(func=cmd_transform)

    s = sub.add_parser("perturb", help="stability report for two families")
    s.add_argument("lhs")
    s.add_argument("rhs")
    s.set_defaults(func=cmd_perturb)

    s = sub.add_parser("quotient", help="quotient-operator characterization")
    s.add_argument("spec")
    s.add_argument("--K", required=True)
    s.add_argument("--U", required=True)
    s.set_defaults(func=cmd_quotient)

    s = sub.add_parser("certify", help="run seeded certification suites")
    s.add_argument("--suite", choices=SUITES + ("all",), default="all")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--dims", type=int, nargs="+", default=[4, 8])
    s.add_argument("--trials", type=int, default=10)
    s.add_argument("--format", choices=("human", "machine"), default="human")
    s.set_defaults(func=cmd_certify)

    s = sub.add_parser("random", help="write a seeded random family")
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--dim", type=int, required=True)
    s.add_argument("--members", type=int, default=4)
    s.add_argument("--max-subspace-dim", type=int)
    s.add_argument("--max-codomain-dim", type=int)
    s.add_argument("--profile", choices=[p.value for p in Profile], default="well_conditioned")
    s.add_argument("--out")
    s.set_defaults(func=cmd_random)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.tol is not None:
        os.environ["GFUSION_TOL"] = repr(args.tol)
    try:
        return args.func(args)
    except (ParseError, ValidationError, UsageError, OSError) as exc:
        print(f"gfusion: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except GFusionError as exc:
        print(f"gfusion: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FALSE
    except ValueError as exc:
        print(f"gfusion: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
