"""Batch front end: parse inputs, dispatch to the library, emit reports.

Exit codes: 0 success, 1 validation error, 2 guard refusal.  Reports are
deterministic: fixed field order, exact rationals as 'p/q' strings, floats
rounded to 12 significant digits.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from .abelian import GuardExceeded, ShapeError
from .cube import cube_system, dump_rows, hk_seminorm
from .filtered import (PremiseViolated, SplitStatus, pure_criterion_cyclic,
                       purity_witness, split_section)
from .gowers import gowers_norm
from .inverse import correlation_search
from .phasepoly import degree, poly_group_basis
from .serialize import (ValidationError, dump_system, jsonable,
                        load_cocycle, load_complex_function, load_embedding,
                        load_group, load_relations, load_system,
                        load_torus_function)
from .systems import CocycleError, coboundary_solve, minimal_reduce
from .towers import facts_report


def _read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ValidationError(path, "file not found")
    except json.JSONDecodeError as exc:
        raise ValidationError(path, f"malformed JSON: {exc}")


def emit_report(result, path=None, fmt="json"):
    """Serialize a report with stable field ordering; '-' or None means
    standard output."""
    if fmt == "json":
        text = json.dumps(jsonable(result), indent=2) + "\n"
    elif fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        for row in result:
            writer.writerow(row)
        text = buf.getvalue()
    else:
        raise ValidationError("format", f"unknown format {fmt!r}")
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _cmd_gowers(args):
    f = load_complex_function(_read_json(args.fn))
    norm = gowers_norm(f, args.d, guard_cells=args.guard_cells)
    return {"command": "gowers", "d": args.d, "norm": norm}


def _cmd_polydeg(args):
    f = load_torus_function(_read_json(args.fn))
    deg = degree(f, args.dmax)
    return {"command": "polydeg", "dmax": args.dmax,
            "degree": deg if deg is not None else "exceeds_bound"}


def _cmd_polyenum(args):
    system = load_system(_read_json(args.system))
    M = args.M if args.M else system.gamma.exponent ** max(args.k, 1)
    basis = poly_group_basis(system, args.k, M, guard_cells=args.guard_cells)
    return {"command": "polyenum", "k": args.k, "M": M,
            "count": len(basis),
            "basis": [[str(v) for v in f.values] for f in basis]}


def _cmd_cocycle(args):
    rho = load_cocycle(_read_json(args.cocycle))
    if args.action == "solve":
        F = coboundary_solve(rho)
        out = {"command": "cocycle", "action": "solve",
               "is_coboundary": F is not None}
        if F is not None:
            out["transfer"] = [str(v) if hasattr(v, "denominator") else list(v.coeffs)
                               for v in F]
        return out
    Uprime, F = minimal_reduce(rho)
    return {"command": "cocycle", "action": "minimal",
            "reduced_order": Uprime.order,
            "reduced_generators": [list(g.coeffs) for g in Uprime.generators],
            "transfer": [list(v.coeffs) for v in F]}


def _cmd_cube(args):
    system = load_system(_read_json(args.system))
    cube = cube_system(system, args.k, guard_cells=args.guard_cells)
    out = {"command": "cube", "k": args.k, "support": len(cube.support),
           "total_weight": cube.total_weight()}
    if args.fn:
        f = load_complex_function(_read_json(args.fn))
        out["seminorm"] = hk_seminorm(list(f.values), cube)
    if args.dump:
        emit_report(dump_rows(cube), args.dump, "csv")
        out["dump"] = args.dump
    return out


def _cmd_example(args):
    if args.model != "hamming":
        raise ValidationError("example", f"unknown example {args.model!r}")
    rep = facts_report(args.k, args.N, samples=args.samples, seed=args.seed,
                       guard_cells=args.guard_cells)
    return {
        "command": "example", "model": "hamming", "k": rep.k, "N": rep.N,
        "cocycle_degrees": rep.rho_degrees,
        "cocycle_degree_bound": rep.rho_degree_bound,
        "cocycle_degrees_ok": rep.rho_degrees_ok,
        "cocycle_degree_equality": rep.rho_degree_equality,
        "binom_degree": rep.binom_degree,
        "binom_degree_bound": rep.binom_degree_bound,
        "binom_minimal_period": rep.binom_minimal_period,
        "cosine_samples": len(rep.cosine_checks),
        "cosine_max_error": rep.cosine_max_error,
        "boundary_exact": rep.boundary_exact,
        "boundary_factored": rep.boundary_factored,
        "boundary_match": rep.boundary_match,
        "degree0_straightenings": (list(rep.straightenings)
                                   if rep.straightenings is not None else "skipped"),
        "straightening_note": rep.straightening_note,
        "model_note": rep.model_note,
    }


def _cmd_filtered(args):
    emb = load_embedding(_read_json(args.embedding))
    if args.action == "split":
        res = split_section(emb)
        out = {"command": "filtered", "action": "split",
               "status": res.status.value,
               "split": res.status == SplitStatus.SPLIT}
        if res.section is not None:
            out["section_images"] = [list(g.coeffs) for g in res.section.hom.images]
            out["quotient_moduli"] = list(res.quotient.ambient.moduli)
        return out
    if args.action == "criterion":
        return {"command": "filtered", "action": "criterion",
                "pure": pure_criterion_cyclic(emb)}
    relations = load_relations(_read_json(args.relations))
    fam_obj = _read_json(args.family)
    fam = [emb.amb.ambient.element(c) for c in fam_obj["coeffs"]]
    try:
        witness = purity_witness(emb, relations, fam)
    except PremiseViolated as exc:
        return {"command": "filtered", "action": "witness",
                "premise_ok": False, "detail": str(exc)}
    return {"command": "filtered", "action": "witness", "premise_ok": True,
            "witness_exists": witness is not None,
            "witness": [list(g.coeffs) for g in witness] if witness else None}


def _cmd_correlate(args):
    f = load_complex_function(_read_json(args.fn))
    rep = correlation_search(f, args.k, strategy=args.strategy,
                             guard=args.guard_cells, seed=args.seed)
    return {"command": "correlate", "k": args.k, "strategy": rep.strategy,
            "norm": rep.norm, "best_abs": rep.best_abs,
            "best_corr": rep.best_corr,
            "best_poly": [str(v) for v in rep.best_poly.values],
            "search_size": rep.search_size,
            "consistent": rep.consistent(),
            "notes": rep.notes}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="phasetower",
        description="Gowers norms, phase polynomials, cocycles and filtered "
                    "group algebra on finite systems")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--threads", type=int, default=1,
                        help="worker cap (computations are deterministic; "
                             "the current implementation runs serially)")
    parser.add_argument("--guard-cells", dest="guard_cells", type=int,
                        default=10**7)
    parser.add_argument("--out", default=None, help="report path (default stdout)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gowers", help="Gowers norm of a complex function")
    p.add_argument("--fn", required=True)
    p.add_argument("--d", type=int, required=True)
    p.set_defaults(func=_cmd_gowers)

    p = sub.add_parser("polydeg", help="polynomial degree of a torus table")
    p.add_argument("--fn", required=True)
    p.add_argument("--dmax", type=int, default=8)
    p.set_defaults(func=_cmd_polydeg)

    p = sub.add_parser("polyenum", help="basis of bounded-degree polynomials")
    p.add_argument("--system", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--M", type=int, default=0)
    p.set_defaults(func=_cmd_polyenum)

    p = sub.add_parser("cocycle", help="coboundary solving and minimal reduction")
    p.add_argument("action", choices=["solve", "minimal"])
    p.add_argument("--cocycle", required=True)
    p.set_defaults(func=_cmd_cocycle)

    p = sub.add_parser("cube", help="cube measures and seminorms")
    p.add_argument("--system", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--fn", default=None)
    p.add_argument("--dump", default=None, help="CSV dump path")
    p.set_defaults(func=_cmd_cube)

    p = sub.add_parser("example", help="worked example reports")
    p.add_argument("model", choices=["hamming"])
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--report", dest="report", default=None)
    p.set_defaults(func=_cmd_example)

    p = sub.add_parser("filtered", help="filtered group splitting and purity")
    p.add_argument("action", choices=["split", "criterion", "witness"])
    p.add_argument("--embedding", required=True)
    p.add_argument("--relations", default=None)
    p.add_argument("--family", default=None)
    p.set_defaults(func=_cmd_filtered)

    p = sub.add_parser("correlate", help="inverse correlation search")
    p.add_argument("--fn", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--strategy", choices=["exhaustive", "greedy"],
                   default="exhaustive")
    p.set_defaults(func=_cmd_correlate)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads < 1 or args.guard_cells < 1:
        print("error: guards and thread caps must be positive", file=sys.stderr)
        return 1
    try:
        result = args.func(args)
    except (ValidationError, ShapeError, CocycleError, PremiseViolated,
            ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except GuardExceeded as exc:
        print(f"guard refusal: {exc}", file=sys.stderr)
        return 2
    out_path = getattr(args, "report", None) or args.out
    emit_report(result, out_path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
