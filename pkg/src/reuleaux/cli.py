"""``reuleaux`` command line: area, grad, hess, multipliers, optimize, sweep, certify, render.

Exit status is 0 on success, 1 when a verification fails and 2 for usage or
input errors. Wherever a polygon is expected, ``--input`` takes a JSON path
or a generator spec such as ``regular:7`` or ``random:7:seed=42``.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import acceptance, lagrangian, optimize, verify
from . import io as rio
from .area import area_disk_polygon, sweep_regular_areas
from .errors import ParseError, ReuleauxError, StallError, TriangleImmovable
from .geometry import TAU_CW
from .sensitivity import gradient_field_reuleaux

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

logger = logging.getLogger("reuleaux")


class UsageError(Exception):
    pass


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _polygon(args):
    if not args.input:
        raise UsageError("--input is required")
    tol = args.tol if args.tol is not None else TAU_CW
    return rio.resolve_polygon(args.input, seed=args.seed, tol=tol)


def cmd_area(args) -> int:
    r = _polygon(args)
    br = area_disk_polygon(r)
    _emit(rio.dumps({"n": r.n, "area": br.total, "polygon_part": br.polygon_part,
                     "segment_parts": br.segment_parts}), args.output)
    return EXIT_OK


def cmd_grad(args) -> int:
    r = _polygon(args)
    g = np.zeros((3, 2)) if r.n == 3 else gradient_field_reuleaux(r)
    norms = np.linalg.norm(g, axis=1)
    _emit(rio.dumps({"n": r.n, "gradients": g, "max_norm": float(norms.max()),
                     "classification": optimize.classify_critical(r).value}), args.output)
    return EXIT_OK


def cmd_hess(args) -> int:
    r = _polygon(args)
    if args.variables == "centers":
        h = lagrangian.hessian_lagrangian_centers(r)
    else:
        h = lagrangian.hessian_lagrangian_vertices(r)
    _emit(h.to_csv(), args.output)
    return EXIT_OK


def cmd_multipliers(args) -> int:
    r = _polygon(args)
    if args.variables == "centers":
        m = lagrangian.solve_multipliers_centers(r)
    else:
        m = lagrangian.solve_multipliers_vertices(r)
    _emit(rio.dumps({"n": r.n, "variables": args.variables, **m.to_dict()}), args.output)
    return EXIT_OK


def cmd_optimize(args) -> int:
    r0 = _polygon(args)
    kw = {"mode": args.mode}
    if args.tol is not None:
        kw["grad_tol"] = args.tol
    try:
        r, trace = optimize.run(r0, optimize.OptimizeConfig(**kw))
    except StallError as exc:
        logger.error("optimisation stalled: %s", exc)
        return EXIT_FAIL
    if args.trace:
        Path(args.trace).write_text(trace.to_csv())
    if args.output:
        rio.save_polygon(r, args.output)
    rec = trace.records[-1]
    sys.stdout.write(rio.dumps({
        "mode": args.mode, "n": r.n, "area": rec.area, "grad_norm": rec.grad_norm,
        "iterations": rec.iter, "classification": optimize.classify_critical(r).value,
    }))
    return EXIT_OK


def cmd_sweep(args) -> int:
    n_max = args.n_max
    if n_max < 3 or n_max % 2 == 0:
        raise UsageError(f"n_max must be an odd integer >= 3, got {n_max}")
    rows = sweep_regular_areas(n_max)
    _emit(rio.sweep_csv(rows), args.output)
    values = [a for _, a in rows]
    if any(b <= a for a, b in zip(values, values[1:])):
        logger.error("regular areas are not strictly increasing")
        return EXIT_FAIL
    return EXIT_OK


def cmd_certify(args) -> int:
    oracles = verify.certify()
    report = {
        "oracles": [o.to_dict() for o in oracles],
        "acceptance": [] if args.oracles_only else [c.to_dict() for c in acceptance.run_all()],
        "flags": verify.report_flags(),
    }
    ok = all(o["pass"] for o in report["oracles"]) and all(c["pass"] for c in report["acceptance"])
    report["pass"] = ok
    _emit(rio.dumps(report), args.output)
    for o in oracles:
        logger.info("%s %s", "PASS" if o.passed else "FAIL", o.name)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_render(args) -> int:
    r = _polygon(args)
    if not args.output:
        raise UsageError("render needs --output")
    Path(args.output).write_text(rio.render_svg(r, args.scale, args.show_gradient))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", "-i", help="polygon JSON path or generator spec")
    common.add_argument("--output", "-o", help="write the result here instead of stdout")
    common.add_argument("--seed", type=int, default=0, help="seed for random:N specs without one")
    common.add_argument("--tol", type=float, default=None,
                        help="validation tolerance (optimize: gradient tolerance)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="reuleaux", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="verb", required=True)
    sub.add_parser("area", parents=[common], help="area and its breakdown").set_defaults(fn=cmd_area)
    sub.add_parser("grad", parents=[common], help="per-vertex area gradients").set_defaults(fn=cmd_grad)
    for name, fn, what in (("hess", cmd_hess, "Lagrangian Hessian as CSV"),
                           ("multipliers", cmd_multipliers, "least-squares multipliers")):
        p = sub.add_parser(name, parents=[common], help=what)
        p.add_argument("--variables", choices=("vertices", "centers"), default="vertices")
        p.set_defaults(fn=fn)
    p = sub.add_parser("optimize", parents=[common], help="area ascent or descent")
    p.add_argument("--mode", choices=[m.value for m in optimize.Mode], default="maximize")
    p.add_argument("--trace", help="write the iteration trace CSV here")
    p.set_defaults(fn=cmd_optimize)
    p = sub.add_parser("sweep", parents=[common], help="n,A_n table of regular areas")
    p.add_argument("n_max", type=int)
    p.set_defaults(fn=cmd_sweep)
    p = sub.add_parser("certify", parents=[common], help="run oracle pairings and acceptance checks")
    p.add_argument("--oracles-only", action="store_true")
    p.set_defaults(fn=cmd_certify)
    p = sub.add_parser("render", parents=[common], help="SVG drawing")
    p.add_argument("--scale", type=float, default=rio.DEFAULT_SCALE)
    p.add_argument("--show-gradient", action="store_true")
    p.set_defaults(fn=cmd_render)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.fn(args)
    except UsageError as exc:
        parser.error(str(exc))
    except TriangleImmovable as exc:
        logger.error("%s", exc)
        return EXIT_USAGE
    except (ParseError, ReuleauxError) as exc:
        logger.error("%s", exc)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
