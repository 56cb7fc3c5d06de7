"""``strongmin`` command line: linearize, verify and analyze JSON problems.

Exit codes: 0 success, 1 malformed input, 2 structure validation failure,
3 flagged numerical-rank diagnostics under ``--strict``, 4 verification
failure, 5 unsupported request (finite eigenvalues of a singular pencil).
"""
import argparse
import logging
import math
import os
import sys

import numpy as np

from . import __version__
from .analyze import (
    check_strong_minimality,
    cluster_eigenvalues,
    degree_audit,
    eig_structure_at_infinity_poly,
    indices_at_infinity,
    pencil_finite_eigenvalues,
    transfer_normal_rank,
    transfer_residual,
)
from .errors import InputError, PreconditionError, SingularPencilError, StrongMinError, StructureError
from .linearize import linearize_rational
from .numkernel import RankTolerance
from .polyrat import PolyMatrix
from .serialize import (
    FORMAT_VERSION,
    ProblemFile,
    ProblemFormatError,
    digest,
    load_json,
    load_problem,
    pencil_from_json,
    pencil_to_json,
    write_json,
)

EXIT_OK, EXIT_INPUT, EXIT_STRUCTURE, EXIT_FLAGGED, EXIT_VERIFY, EXIT_UNSUPPORTED = range(6)
VERIFY_RTOL = 1e-8
VERIFY_POINTS = 20

log = logging.getLogger("strongmin")


def _finite(obj):
    """Replace non-finite floats by None so the output is strict JSON."""
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        return float(obj) if math.isfinite(obj) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def resolve_seed(flag, options):
    if flag is not None:
        return int(flag)
    if options.get("seed") is not None:
        return int(options["seed"])
    env = os.environ.get("STRONGMIN_SEED")
    return int(env) if env else 0


def _tolerance(value):
    return None if value is None else RankTolerance("relative", float(value))


def _pairs(values):
    return [[float(np.real(z)), float(np.imag(z))] for z in values]


def structural_summary(L, problem, seed, tol=None, eigs=True):
    """Dictionary form of the structural report; failures are recorded, not raised."""
    out = {"normal_rank": None, "indices_at_infinity": None, "infinite_eigenvalue_multiplicities": None,
           "finite_eigenvalues": None, "mcmillan_rank_L1": None, "notes": []}
    R = problem.rational()
    audit = degree_audit(L, R, tol, seed)
    out["mcmillan_rank_L1"] = audit["mcmillan_rank_L1"]
    out["degree_audit"] = audit
    try:
        r = transfer_normal_rank(L, tol, seed)
        out["normal_rank"] = r
        out["indices_at_infinity"] = list(indices_at_infinity(L, r, tol, seed).indices)
        if R.sp_part is None:
            out["infinite_eigenvalue_multiplicities"] = list(
                eig_structure_at_infinity_poly(R.poly_part, L, tol, seed, check=False).indices)
    except (PreconditionError, StrongMinError) as exc:
        out["notes"].append(f"infinity structure unavailable: {exc}")
    if eigs:
        L0, L1 = L.pencil()
        if L0.shape[0] != L0.shape[1]:
            out["notes"].append("rectangular pencil: finite eigenvalues not computed")
        else:
            try:
                ev = pencil_finite_eigenvalues(L0, L1, seed)
                out["finite_eigenvalues"] = [
                    {"value": _pairs([c])[0], "multiplicity": k} for c, k in cluster_eigenvalues(ev)]
            except SingularPencilError as exc:
                out["notes"].append(f"finite eigenvalues unsupported: {exc}")
    return out


def cmd_linearize(args):
    problem = load_problem(args.input)
    opts = problem.options
    tag = args.structure or problem.structure
    tolv = args.tol if args.tol is not None else opts.get("tolerance")
    k = args.k if args.k is not None else opts.get("k")
    seed = resolve_seed(args.seed, opts)
    R = problem.rational()
    try:
        L, rep = linearize_rational(R, tag, _tolerance(tolv), k=k, seed=seed)
    except StructureError as exc:
        print(f"structure validation failed: {exc}", file=sys.stderr)
        return EXIT_STRUCTURE
    cert = rep.certificate
    comp = {}
    for name, c in (("polynomial", rep.poly_compression), ("strictly_proper", rep.sp_compression)):
        if c is not None:
            comp[name] = c.diagnostics()
    comp["k_used"] = rep.k_used
    comp["stabilized"] = rep.stabilized
    pdict = problem.to_dict()
    result = {
        "format_version": FORMAT_VERSION,
        "tool": "strongmin",
        "version": __version__,
        "input_digest": digest(pdict),
        "problem": pdict,
        "structure": rep.structure,
        "settings": {"tolerance": tolv, "k": k, "seed": seed},
        "pencil": pencil_to_json(L),
        "compression": comp,
        "symmetry_defect": {"before": rep.symmetry_defect_before, "after": rep.symmetry_defect_after},
        "certificate": cert.to_dict(),
        "structural_report": structural_summary(L, problem, seed, _tolerance(tolv)),
        "warnings": list(rep.warnings),
    }
    write_json(args.output, _finite(result))
    print(f"state_dim={L.p} size={L.shape[0]}x{L.shape[1]} strongly_minimal={cert.strongly_minimal}")
    for w in rep.warnings:
        print(f"warning: {w}", file=sys.stderr)
    if args.strict and (rep.flagged() or not cert.strongly_minimal):
        return EXIT_FLAGGED
    return EXIT_OK


def _load_result(path):
    res = load_json(path)
    if not isinstance(res, dict) or "pencil" not in res:
        raise ProblemFormatError(f"{path}: not a strongmin result file")
    return res, pencil_from_json(res["pencil"])


def cmd_verify(args):
    res, L = _load_result(args.result)
    problem = load_problem(args.problem)
    if digest(problem.to_dict()) != res.get("input_digest"):
        print("warning: problem digest differs from the one recorded in the result", file=sys.stderr)
    seed = resolve_seed(None, problem.options)
    cert = check_strong_minimality(L, seed=seed)
    resid = transfer_residual(L, problem.rational(), seed=seed, points=VERIFY_POINTS)
    ok = cert.strongly_minimal and resid <= VERIFY_RTOL
    print(f"certificate: {'pass' if cert.strongly_minimal else 'FAIL'} "
          f"(inf: {cert.controllable_inf}/{cert.observable_inf}, fin: {cert.controllable_fin}/{cert.observable_fin})")
    print(f"transfer residual: {resid:.3e} (tolerance {VERIFY_RTOL:.0e})")
    print("verified" if ok else "verification FAILED")
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_analyze(args):
    res, L = _load_result(args.result)
    problem = ProblemFile.from_dict(res["problem"]) if "problem" in res else None
    seed = int((res.get("settings") or {}).get("seed") or 0)
    show_all = not (args.infinity or args.eigs or args.audit)
    status = EXIT_OK
    if args.infinity or show_all:
        r = transfer_normal_rank(L, seed=seed)
        print(f"normal rank: {r}")
        try:
            d = indices_at_infinity(L, r, seed=seed)
            print(f"structural indices at infinity: {list(d.indices)}")
            if problem is not None and problem.rational().sp_part is None:
                P = PolyMatrix(problem.poly_coeffs, rows=problem.rows, cols=problem.cols)
                t = eig_structure_at_infinity_poly(P, L, seed=seed, check=False)
                print(f"infinite eigenvalue partial multiplicities (rev_{P.degree} P at 0): {list(t.indices)}")
        except PreconditionError as exc:
            print(f"infinity structure unavailable: {exc}")
    if args.eigs or show_all:
        L0, L1 = L.pencil()
        try:
            if L0.shape[0] != L0.shape[1]:
                raise SingularPencilError("rectangular pencil")
            ev = pencil_finite_eigenvalues(L0, L1, seed)
            clusters = cluster_eigenvalues(ev)
            print(f"finite eigenvalues ({sum(k for _, k in clusters)} with multiplicity):")
            for c, k in clusters:
                print(f"  {c.real:+.12g} {c.imag:+.12g}i  multiplicity {k}")
        except SingularPencilError as exc:
            print(f"unsupported: finite eigenvalues of a singular pencil need a staircase reduction ({exc})")
            status = EXIT_UNSUPPORTED
    if args.audit or show_all:
        src = problem.rational() if problem is not None else None
        a = degree_audit(L, src, seed=seed)
        print(f"McMillan degree (rank L1): {a['mcmillan_rank_L1']}  state dim: {a['state_dim']}")
        if a["polar_degree_infinity"] is not None:
            flag = "consistent" if a["consistent"] else "MISMATCH"
            print(f"polar degree at infinity of the source: {a['polar_degree_infinity']} ({flag})")
    return status


def build_parser():
    ap = argparse.ArgumentParser(prog="strongmin", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"strongmin {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("linearize", help="build a strongly minimal linearization")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--structure", choices=["none", "hermitian", "skew_hermitian", "para_hermitian",
                                           "para_skew_hermitian"])
    p.add_argument("--tol", type=float, help="relative rank tolerance multiplier")
    p.add_argument("--k", type=int, help="number of Hankel block rows for the strictly proper part")
    p.add_argument("--seed", type=int)
    p.add_argument("--strict", action="store_true", help="exit 3 when rank decisions are borderline")
    p.set_defaults(func=cmd_linearize)

    p = sub.add_parser("verify", help="re-certify a result against its problem")
    p.add_argument("-r", "--result", required=True)
    p.add_argument("-p", "--problem", required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("analyze", help="structural report for a result")
    p.add_argument("-r", "--result", required=True)
    p.add_argument("--infinity", action="store_true")
    p.add_argument("--eigs", action="store_true")
    p.add_argument("--audit", action="store_true")
    p.set_defaults(func=cmd_analyze)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ProblemFormatError, InputError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except StructureError as exc:
        print(f"structure validation failed: {exc}", file=sys.stderr)
        return EXIT_STRUCTURE


if __name__ == "__main__":
    sys.exit(main())
