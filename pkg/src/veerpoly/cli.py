"""Command-line interface: compute invariants of one census entry, fill
cusps, or run a batch over a census file.

Exit codes: 0 success, 1 input error, 2 internal assertion failure.
Batch output is JSONL in input order, independent of the worker count.
"""

import argparse
import json
import multiprocessing
import os
import sys
import time

from .census_io import CensusError, parse_taut_sig
from .filling import (filled_homology, parse_slopes, predict_filled_alexander,
                      specialise_under_filling, vertex_links,
                      _vertex_classes)
from .invariants import (Analysis, build_alexander_matrix, build_taut_matrix,
                         compute_polynomials, fitting_gcd, verify_identities)
from .laurent import poly_to_json
from .taut import build_double_cover


def _poly_or_null(p):
    return None if p is None else poly_to_json(p)


def entry_record(sig, with_polynomials=True):
    """The full RunRecord for one census entry (timing excluded so that
    records are byte-stable)."""
    ts = parse_taut_sig(sig)
    analysis = Analysis(ts)
    eo = analysis.eo
    record = {
        "sig": sig,
        "b1": analysis.h1.rank,
        "torsion": list(analysis.h1.torsion),
        "cusps": len(_vertex_classes(ts.table)),
        "edge_orientable": eo.edge_orientable,
        "theta": None,
        "delta": None,
        "delta_hat": None,
        "sigma": list(eo.sigma) if eo.sigma is not None else None,
        "verify": None,
    }
    if not eo.edge_orientable:
        cover, connected = build_double_cover(ts, analysis.coor, eo.beta)
        assert connected
        record["cover_cusps"] = len(_vertex_classes(cover.table))
    if with_polynomials:
        report = compute_polynomials(ts)
        record["theta"] = poly_to_json(report.theta)
        record["delta"] = poly_to_json(report.delta)
        record["delta_hat"] = _poly_or_null(report.delta_hat)
        record["verify"] = verify_identities(report)
    return record


def cmd_compute(args):
    flags = [args.taut, args.alex, args.hat, args.edge_orientability]
    want_all = args.all or not any(flags)
    want_polys = want_all or args.taut or args.alex or args.hat
    t0 = time.perf_counter()
    record = entry_record(args.sig, with_polynomials=want_polys)
    record["runtime_ms"] = round(1000 * (time.perf_counter() - t0), 3)
    if not want_all:
        keep = {"sig", "b1", "edge_orientable", "runtime_ms"}
        if args.taut:
            keep |= {"theta", "verify", "sigma"}
        if args.alex:
            keep |= {"delta", "verify", "sigma"}
        if args.hat:
            keep |= {"delta_hat", "verify", "sigma"}
        if args.edge_orientability:
            keep |= {"edge_orientable", "sigma", "torsion", "cusps",
                     "cover_cusps"}
        record = {k: v for k, v in record.items() if k in keep}
    json.dump(record, sys.stdout, sort_keys=True)
    sys.stdout.write("\n")
    return 0


def cmd_fill(args):
    ts = parse_taut_sig(args.sig)
    analysis = Analysis(ts)
    spec = parse_slopes(args.slopes)
    cusps = vertex_links(ts, analysis.coor, analysis.cycles, analysis.h1)
    fh = filled_homology(analysis.h1, cusps, spec, eo=analysis.eo)
    if fh.s == 0:
        raise CensusError("filling kills all free homology (b_1(N) = 0)")
    theta = fitting_gcd(build_taut_matrix(analysis))
    delta = fitting_gcd(build_alexander_matrix(analysis))
    record = {
        "sig": args.sig,
        "slopes": {("c%d" % j): "%d/%d" % xy
                   for j, xy in spec.slopes.items()},
        "b1": analysis.h1.rank,
        "s": fh.s,
        "filled_homology_torsion": list(fh.n_quot.torsion),
        "boundary_empty": fh.boundary_empty,
        "i_star": fh.i_star,
        "sigma_N": list(fh.sigma_N) if fh.sigma_N is not None else None,
        "i_theta": poly_to_json(specialise_under_filling(theta, fh)),
        "i_delta": poly_to_json(specialise_under_filling(delta, fh)),
        "cores": {("c%d" % j): {"ell_free": list(c["ell_free"]),
                                "nontrivial": c["nontrivial"]}
                  for j, c in fh.cores.items()},
        "case": None,
        "delta_N": None,
        "division_ok": None,
        "equality_expected": None,
    }
    trivial = [j for j in fh.filled if not fh.cores[j]["nontrivial"]]
    record["hypotheses"] = {
        "sigma_N_exists": fh.sigma_N is not None,
        "trivial_cores": [("c%d" % j) for j in trivial],
    }
    if fh.sigma_N is not None and not trivial:
        pred = predict_filled_alexander(theta, fh)
        record["case"] = pred.case
        record["division_ok"] = pred.division_ok
        record["equality_expected"] = pred.equality_expected
        record["delta_N"] = _poly_or_null(pred.candidate)
    json.dump(record, sys.stdout, sort_keys=True)
    sys.stdout.write("\n")
    return 0


def _batch_worker(job):
    sig, verify = job
    try:
        return entry_record(sig, with_polynomials=verify)
    except CensusError as exc:
        return {"sig": sig, "error": str(exc)}


def cmd_batch(args):
    with open(args.census) as fh:
        sigs = [line.strip() for line in fh
                if line.strip() and not line.startswith("#")]
    jobs = args.jobs or int(os.environ.get("VEERPOLY_JOBS", "1"))
    work = [(sig, args.verify) for sig in sigs]
    t0 = time.perf_counter()
    if jobs > 1:
        with multiprocessing.Pool(jobs) as pool:
            records = pool.map(_batch_worker, work, chunksize=16)
    else:
        records = [_batch_worker(job) for job in work]
    out = open(args.out, "w") if args.out else sys.stdout
    try:
        for rec in records:
            json.dump(rec, out, sort_keys=True)
            out.write("\n")
    finally:
        if args.out:
            out.close()
    summary = {
        "total": len(records),
        "errors": sum(1 for r in records if "error" in r),
        "edge_orientable": sum(1 for r in records
                               if r.get("edge_orientable") is True),
        "not_edge_orientable": sum(1 for r in records
                                   if r.get("edge_orientable") is False),
        "cover_same_cusps": sum(
            1 for r in records
            if r.get("edge_orientable") is False
            and r.get("cover_cusps") == r.get("cusps")),
        "cover_double_cusps": sum(
            1 for r in records
            if r.get("edge_orientable") is False
            and r.get("cover_cusps") == 2 * r.get("cusps")),
    }
    if args.verify:
        summary["verify_passed"] = sum(
            1 for r in records if (r.get("verify") or {}).get("passed"))
        summary["verify_failed"] = sum(
            1 for r in records
            if "error" not in r and not (r.get("verify") or {}).get("passed"))
    stream = sys.stderr if not args.out else sys.stdout
    print("batch: %s in %.1fs" % (
        json.dumps(summary, sort_keys=True),
        time.perf_counter() - t0), file=stream)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="veerpoly",
        description="Taut and Alexander polynomials of veering "
                    "triangulations from census signatures.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_compute = sub.add_parser(
        "compute", help="invariants of a single census entry")
    p_compute.add_argument("sig")
    p_compute.add_argument("--taut", action="store_true",
                           help="taut polynomial")
    p_compute.add_argument("--alex", action="store_true",
                           help="Alexander polynomial")
    p_compute.add_argument("--hat", action="store_true",
                           help="double-cover Alexander polynomial")
    p_compute.add_argument("--all", action="store_true",
                           help="everything (default)")
    p_compute.add_argument("--edge-orientability", action="store_true",
                           dest="edge_orientability",
                           help="edge-orientability data only")
    p_compute.set_defaults(func=cmd_compute)

    p_fill = sub.add_parser("fill", help="Dehn-filling specialisations")
    p_fill.add_argument("sig")
    p_fill.add_argument("--slopes", default="",
                        help='e.g. "c0:1/2,c2:-3/1" (empty: no filling)')
    p_fill.set_defaults(func=cmd_fill)

    p_batch = sub.add_parser("batch", help="run over a census file")
    p_batch.add_argument("census", help="file with one signature per line")
    p_batch.add_argument("--jobs", type=int, default=0,
                         help="worker processes (default $VEERPOLY_JOBS or 1)")
    p_batch.add_argument("--out", default=None, help="JSONL output path")
    p_batch.add_argument("--verify", action="store_true",
                         help="also compute polynomials and identities")
    p_batch.set_defaults(func=cmd_batch)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CensusError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1
    except OSError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1
    except AssertionError as exc:
        print("internal error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
