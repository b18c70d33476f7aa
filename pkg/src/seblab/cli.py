"""Command-line surface.

Subcommands:
    solve <file>                 solve the instance, print a JSON report
    jnr <file> sample|member|probe   joint-numerical-range lab
    oracle <file>                brute-force oracles side by side with the solver
    rank <file>                  rank / regime classification only

Exit codes: 0 success, 1 parse/validation error, 2 empty interior,
3 unsupported regime (jnr operations that need the gating condition).
"""

import argparse
import csv
import os
import sys

import numpy as np

from . import io, numrange, sampling
from .errors import SebLabError, UnsupportedRegime, ValidationError
from .geometry import SolveStatus, ball_to_quadratic
from .numrange import QuadraticMap
from .solver import (
    build_certificate,
    check_interior,
    classify,
    identity_residual,
    regime_report,
    solve_seb,
)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_EMPTY = 2
EXIT_UNSUPPORTED = 3


def _configure_threads():
    # optional THREADS override for the numba-backed kernels
    threads = os.environ.get("THREADS")
    if threads:
        try:
            import numba

            numba.set_num_threads(max(1, min(int(threads), os.cpu_count() or 1)))
        except (ImportError, ValueError):
            pass


def _fail(msg, out):
    print(io.emit({"error": msg}), file=out)
    return EXIT_ERROR


def _parse_point(text):
    try:
        return np.array([float(v) for v in text.split(",")], dtype=float)
    except ValueError as exc:
        raise ValidationError(f"invalid --point value {text!r}") from exc


def cmd_solve(args, out):
    instance, _target = io.load_instance(args.file)
    solution = solve_seb(instance, tol_gap=args.tol, max_iter=args.max_iter)
    regime = regime_report(instance, solution)
    certificate = None
    if solution.status in (SolveStatus.CERTIFIED_OPTIMAL,
                           SolveStatus.UPPER_BOUND_ONLY):
        certificate = build_certificate(instance, solution)
    diagnostics = {"seed": args.seed}
    if args.verify and solution.status in (SolveStatus.CERTIFIED_OPTIMAL,
                                           SolveStatus.UPPER_BOUND_ONLY):
        cloud = sampling.sample_intersection(
            instance, args.verify, seed=args.seed, start=solution.center)
        worst = sampling.farthest_distance(cloud, solution.center)
        rng = np.random.default_rng(args.seed)
        xs = rng.standard_normal((min(args.verify, 1000), instance.dimension))
        diagnostics["verify_points"] = args.verify
        diagnostics["max_containment_violation"] = max(
            0.0, worst - solution.radius)
        diagnostics["identity_residual_max"] = max(
            abs(identity_residual(instance, solution, x)) for x in xs)
    report = io.solution_report(instance, solution, regime, certificate,
                                diagnostics)
    print(io.emit(report, compact=args.compact), file=out)
    if solution.status is SolveStatus.EMPTY_INTERIOR:
        return EXIT_EMPTY
    return EXIT_OK


def _target_quadratic(instance, target):
    if target is not None:
        return ball_to_quadratic(target)
    solution = solve_seb(instance)
    if solution.status is SolveStatus.EMPTY_INTERIOR:
        raise ValidationError(
            "no target ball given and the instance has empty interior")
    return solution.target_quadratic()


def cmd_jnr(args, out):
    instance, target = io.load_instance(args.file)
    qmap = QuadraticMap.from_instance(instance,
                                      _target_quadratic(instance, target))
    if args.action == "sample":
        rng = np.random.default_rng(args.seed)
        sigma = numrange._sampling_scale(qmap)
        X = rng.standard_normal((args.count, qmap.dimension)) * sigma
        G = numrange.eval_map_batch(qmap, X) if args.count else np.empty(
            (0, qmap.m + 1))
        dest = open(args.out, "w", newline="") if args.out else out
        try:
            writer = csv.writer(dest)
            writer.writerow([f"g{i}" for i in range(qmap.m + 1)])
            for row in G:
                writer.writerow([repr(float(v)) for v in row])
        finally:
            if args.out:
                dest.close()
        return EXIT_OK
    if args.action == "member":
        if args.point is None:
            raise ValidationError("member needs --point z0,z1,...")
        z = _parse_point(args.point)
        verdict = numrange.in_range(qmap, z)
        report = {
            "point": [float(v) for v in z],
            "in_range": bool(verdict.member),
            "range_margin": float(verdict.margin),
        }
        if verdict.witness is not None:
            report["witness"] = [float(v) for v in verdict.witness]
        try:
            hull = numrange.in_pair_hull(qmap, z)
            report["in_pair_hull"] = bool(hull.member)
            report["hull_margin"] = float(hull.margin)
        except UnsupportedRegime:
            report["in_pair_hull"] = None
            report["note"] = "pair-hull membership unsupported in this regime"
        print(io.emit(report, compact=args.compact), file=out)
        return EXIT_OK
    # probe
    conv = numrange.convexity_probe(qmap, args.count, seed=args.seed)
    sep = numrange.separation_probe(qmap, args.count, seed=args.seed)
    report = {
        "seed": args.seed,
        "samples": args.count,
        "regime": qmap.regime().value,
        "convexity": {
            "counterexamples": len(conv.counterexamples),
            "convex_evidence": conv.convex_evidence,
        },
        "separation": {
            "range_hits": len(sep.range_hits),
            "hull_hits": len(sep.hull_hits),
            "implication_holds": sep.implication_holds,
        },
    }
    print(io.emit(report, compact=args.compact), file=out)
    return EXIT_OK


def cmd_oracle(args, out):
    from .simplex_qp import build_qp, grid_oracle

    instance, _ = io.load_instance(args.file)
    solution = solve_seb(instance)
    report = {
        "solver": {"qp_value": float(solution.qp_value),
                   "radius": float(solution.radius),
                   "status": solution.status.value},
        "warnings": [],
    }
    qp = build_qp(instance)
    try:
        val, mu = grid_oracle(qp, args.grid)
        report["grid_oracle"] = {"k": args.grid, "value": float(val),
                                 "minimizer": [float(v) for v in mu]}
    except SebLabError as exc:
        report["warnings"].append(f"grid_oracle skipped: {exc}")
    if instance.dimension <= 3:
        res = 200 if instance.dimension <= 2 else 60
        val = sampling.grid_min_maxg(instance, res)
        report["grid_min_maxg"] = {
            "resolution": res,
            "value": float(val),
            "minus_qp_value": float(-solution.qp_value),
            "bound": float(sampling.grid_resolution_bound(instance, res)),
        }
    else:
        report["warnings"].append(
            f"grid_min_maxg skipped: dimension {instance.dimension} > 3")
    if args.cloud and solution.status in (SolveStatus.CERTIFIED_OPTIMAL,
                                          SolveStatus.UPPER_BOUND_ONLY):
        cloud = sampling.sample_intersection(instance, args.cloud,
                                             seed=args.seed,
                                             start=solution.center)
        center, radius = sampling.cloud_meb(cloud)
        report["cloud_meb"] = {
            "count": args.cloud,
            "radius": float(radius),
            "center": [float(v) for v in center],
            "farthest_from_solver_center": float(
                sampling.farthest_distance(cloud, solution.center)),
        }
    print(io.emit(report, compact=args.compact), file=out)
    return EXIT_OK


def cmd_rank(args, out):
    instance, _ = io.load_instance(args.file)
    regime = classify(instance)
    report = {
        "dimension": instance.dimension,
        "balls": instance.m,
        "rank_centers": regime.rank_centers,
        "regime": regime.regime.value,
    }
    print(io.emit(report, compact=args.compact), file=out)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="seblab",
        description="Smallest enclosing ball of ball intersections and the "
                    "joint-numerical-range lab.")
    parser.add_argument("--compact", action="store_true",
                        help="machine-oriented single-line JSON output")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve an instance file")
    p.add_argument("file")
    p.add_argument("--tol", type=float, default=None,
                   help="Frank-Wolfe gap tolerance")
    p.add_argument("--max-iter", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--verify", type=int, default=0, metavar="N",
                   help="sample N feasible points and report max violation")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("jnr", help="joint-numerical-range lab")
    p.add_argument("file")
    p.add_argument("action", choices=["sample", "member", "probe"])
    p.add_argument("--count", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--point", type=str, default=None,
                   help="comma-separated value vector for 'member'")
    p.add_argument("--out", type=str, default=None, help="CSV output path")
    p.set_defaults(func=cmd_jnr)

    p = sub.add_parser("oracle", help="brute-force cross-checks")
    p.add_argument("file")
    p.add_argument("--grid", type=int, default=60, metavar="K")
    p.add_argument("--cloud", type=int, default=0, metavar="N")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("rank", help="rank / regime classification")
    p.add_argument("file")
    p.set_defaults(func=cmd_rank)
    return parser


def main(argv=None, out=None):
    out = out if out is not None else sys.stdout
    _configure_threads()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, out)
    except UnsupportedRegime as exc:
        print(io.emit({"error": str(exc)}), file=out)
        return EXIT_UNSUPPORTED
    except (ValidationError, OSError) as exc:
        return _fail(str(exc), out)
    except SebLabError as exc:
        return _fail(str(exc), out)


if __name__ == "__main__":
    sys.exit(main())
