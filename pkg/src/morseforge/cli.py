"""Command-line front end.

Exit codes are a stable contract: 0 pass, 1 verification/convergence
failure, 2 parse error, 3 hypothesis violation, 4 unsupported operation.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from typing import List, Optional

import numpy as np

from . import serialize, synth, verify
from .coord_change import PointSet, PointSetError
from .numeric import compile_map, compile_poly
from .poly import MultiPoly, PolyMap

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_PARSE = 2
EXIT_HYPOTHESIS = 3
EXIT_UNSUPPORTED = 4


def _default_seed() -> int:
    try:
        return int(os.environ.get("MORSEFORGE_SEED", "0"))
    except ValueError:
        return 0


def _load_json(path: str):
    with open(path) as fh:
        return json.load(fh)


def _write_json(path: Optional[str], obj) -> None:
    text = json.dumps(obj, indent=2)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _parse_box(flags: Optional[List[str]], dim: int) -> Optional[verify.BoxSpec]:
    if not flags:
        return None
    if len(flags) != dim:
        raise ValueError(f"--box must be given once per axis ({dim} times)")
    lower, upper = [], []
    for f in flags:
        lo, hi = (float(v) for v in f.split(","))
        lower.append(lo)
        upper.append(hi)
    return verify.BoxSpec(tuple(lower), tuple(upper), derivation="cli override")


def cmd_synthesize(args) -> int:
    try:
        obj = _load_json(args.input)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read point set: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        xs = PointSet.from_obj(obj)
    except PointSetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except (KeyError, TypeError, ValueError) as exc:
        print(f"error: malformed point set: {exc}", file=sys.stderr)
        return EXIT_PARSE
    result = synth.synthesize(xs)
    _write_json(args.output, serialize.bundle_obj(result))
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        bundle = serialize.parse_bundle(_load_json(args.input))
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        print(f"error: malformed bundle: {exc}", file=sys.stderr)
        return EXIT_PARSE
    n = bundle.pointset.dimension

    # nothing from the bundle is trusted: gradient and Hessians are
    # recomputed from the stored polynomial and compared against its claims
    grad = PolyMap([-bundle.p.partial(i) for i in range(n)], n)
    grad_consistent = grad == bundle.grad_field

    seconds = [[bundle.p.partial(i).partial(j) for j in range(n)] for i in range(n)]

    def hess(pt):
        return [[e.eval_rational(pt) for e in row] for row in seconds]

    try:
        box = _parse_box(args.box, n)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    cfg = verify.NewtonConfig(
        residual_tol=args.residual_tol,
        dedup_tol=args.dedup_tol,
        max_iter=args.max_iter,
    )
    report = verify.certify(
        points=bundle.pointset.points,
        grad_map=grad,
        hessian_at=hess,
        box=box,
        seeds_per_axis=args.seeds_per_axis,
        newton_cfg=cfg,
        spurious_tol=args.spurious_tol,
    )
    minors_match = all(
        cert.minors == stored
        for cert, stored in zip(report.per_point, bundle.minors)
    )
    overall = report.overall_pass and minors_match and grad_consistent
    out = report.to_obj()
    out["minors_match_bundle"] = minors_match
    out["grad_field_consistent"] = grad_consistent
    out["overall_pass"] = overall
    out["seed"] = args.seed
    _write_json(args.output, out)
    return EXIT_OK if overall else EXIT_FAIL


def cmd_flow(args) -> int:
    try:
        bundle = serialize.parse_bundle(_load_json(args.input))
        start = [float(v) for v in args.start.split(",")]
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        print(f"error: malformed input: {exc}", file=sys.stderr)
        return EXIT_PARSE
    n = bundle.pointset.dimension
    if len(start) != n:
        print(f"error: --start needs {n} coordinates", file=sys.stderr)
        return EXIT_PARSE
    box = verify.default_box(bundle.pointset.points)
    lo, hi = box.inflated(10.0)
    if not all(l <= s <= h for l, s, h in zip(lo, start, hi)):
        print("error: start point lies outside the 10x inflated box", file=sys.stderr)
        return EXIT_PARSE
    trace = verify.integrate_flow(
        bundle.grad_field,
        start,
        dt=args.dt,
        t_max=args.t_max,
        box=box,
        targets=bundle.pointset.points,
        lyap=bundle.p,
        grad_tol=args.grad_tol,
        point_tol=args.point_tol,
    )
    _write_json(args.output, trace.to_obj())
    return EXIT_OK if trace.classified == "converged_to" else EXIT_FAIL


def cmd_saddle_field(args) -> int:
    try:
        obj = _load_json(args.input)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read point set: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        xs = PointSet.from_obj(obj)
    except PointSetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except (KeyError, TypeError, ValueError) as exc:
        print(f"error: malformed point set: {exc}", file=sys.stderr)
        return EXIT_PARSE
    sf = synth.build_saddle_field(xs)
    _write_json(args.output, serialize.saddle_obj(sf))
    return EXIT_OK


def cmd_export_grid(args) -> int:
    try:
        bundle = serialize.parse_bundle(_load_json(args.input))
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        print(f"error: malformed bundle: {exc}", file=sys.stderr)
        return EXIT_PARSE
    if bundle.pointset.dimension != 2:
        print("error: export-grid supports n = 2 only", file=sys.stderr)
        return EXIT_UNSUPPORTED
    if args.resolution < 8:
        print("error: resolution must be >= 8", file=sys.stderr)
        return EXIT_PARSE
    box = verify.default_box(bundle.pointset.points)
    axes = [
        np.linspace(lo, hi, args.resolution)
        for lo, hi in zip(box.lower, box.upper)
    ]
    nodes = [(x, y) for x in axes[0] for y in axes[1]]
    values = [bundle.p.eval_float(nd) for nd in nodes]
    res = verify.integrate_batch(
        compile_map(bundle.grad_field),
        np.asarray(nodes),
        box,
        bundle.pointset.points,
        verify.FlowConfig(dt=args.dt, t_max=args.t_max),
    )
    labels = np.where(res.status == verify.STATUS_CONVERGED, res.conv_idx, -1)
    out = args.output or "grid.csv"
    with open(out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "y", "P", "basin_label"])
        for (x, y), v, lab in zip(nodes, values, labels):
            w.writerow([repr(float(x)), repr(float(y)), repr(float(v)), int(lab)])
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="morseforge",
        description="Synthesize and verify polynomials with prescribed minima.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, output_required=False):
        sp.add_argument("-i", "--input", required=True)
        sp.add_argument("-o", "--output", required=output_required)
        sp.add_argument("--seed", type=int, default=_default_seed())

    sp = sub.add_parser("synthesize", help="point set file -> audit bundle")
    common(sp)
    sp.set_defaults(func=cmd_synthesize)

    sp = sub.add_parser("verify", help="recheck every claim in a bundle")
    common(sp)
    sp.add_argument("--box", action="append", metavar="LO,HI",
                    help="search box override, one flag per axis")
    sp.add_argument("--seeds-per-axis", type=int, default=None)
    sp.add_argument("--residual-tol", type=float, default=1e-12)
    sp.add_argument("--dedup-tol", type=float, default=1e-8)
    sp.add_argument("--max-iter", type=int, default=100)
    sp.add_argument("--spurious-tol", type=float, default=1e-6)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("flow", help="integrate the descent flow from a point")
    common(sp)
    sp.add_argument("--start", required=True, metavar="X,Y,...")
    sp.add_argument("--dt", type=float, default=1e-3)
    sp.add_argument("--t-max", type=float, default=200.0)
    sp.add_argument("--grad-tol", type=float, default=1e-6)
    sp.add_argument("--point-tol", type=float, default=1e-3)
    sp.set_defaults(func=cmd_flow)

    sp = sub.add_parser("saddle-field", help="point set -> saddle-augmented field")
    common(sp)
    sp.set_defaults(func=cmd_saddle_field)

    sp = sub.add_parser("export-grid", help="CSV raster of P and basin labels (n=2)")
    common(sp)
    sp.add_argument("--resolution", type=int, required=True)
    sp.add_argument("--dt", type=float, default=1e-2)
    sp.add_argument("--t-max", type=float, default=200.0)
    sp.set_defaults(func=cmd_export_grid)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
