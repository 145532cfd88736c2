"""Command line interface: ``cubicurve <command> [flags]``."""

from __future__ import annotations

import argparse
import logging
import math
import sys
from collections.abc import Callable, Sequence
from fractions import Fraction
from typing import Any

from cubicurve import __version__
from cubicurve.config import Settings, load_settings
from cubicurve.dynamics import enumerate_regions
from cubicurve.errors import SeedRejected, translate_error
from cubicurve.finder import FinderConfig, find_v
from cubicurve.geometry import CurvePoint, render, residue_at_ideal, write_ppm
from cubicurve.grid import (
    MarkedGrid,
    describe_region,
    grid_from_orders,
    multiplicity,
    ord_from_grid,
    render_ascii,
    validate_rules,
    winding_number,
)
from cubicurve.quadratic import centers
from cubicurve.realcurve import component_graph, enumerate_components
from cubicurve.solver import KneadingSequence, all_solutions, primitive_solution, solutions_for_kneading
from cubicurve.tables import TABLES, euler_row, reproduce
from cubicurve.util import parse_complex, parse_signs, parse_size, read_json, write_json

logger = logging.getLogger("cubicurve")

Handler = Callable[[argparse.Namespace, Settings], Any]


def _parse_depth(text: str) -> float | int:
    text = text.strip()
    if text in ("inf", "∞"):
        return math.inf
    return int(text)


def _parse_order(text: str) -> Fraction | float:
    return math.inf if text.strip() in ("inf", "∞") else Fraction(text.strip())


def _regions(args: argparse.Namespace, settings: Settings):
    if args.kneading:
        sols = solutions_for_kneading(args.kneading, settings.trunc)
    else:
        sols = all_solutions(args.period, settings.trunc)
    return [describe_region(s) for s in sols]


def _solve_series(args: argparse.Namespace, settings: Settings) -> Any:
    if args.signs is None:
        return [r.to_json() for r in _regions(args, settings)]
    if not args.kneading:
        raise ValueError("--signs needs --kneading")
    kneading = KneadingSequence.parse(args.kneading)
    if kneading.is_trivial:
        raise ValueError(f"trivial kneading sequence {kneading} has no sign choices (hint: omit --signs)")
    signs = parse_signs(args.signs)
    solution = primitive_solution(kneading, signs, settings.trunc)
    if solution is None:
        raise SeedRejected(f"signs {args.signs} do not lead to a region with kneading {kneading}")
    return [describe_region(solution).to_json()]


def _enumerate_regions(args: argparse.Namespace, settings: Settings) -> Any:
    regions = enumerate_regions(
        args.period,
        radii=(args.r1 or settings.fiber_radius, args.r2),
        steps=args.steps,
        seed=settings.seed,
        threads=settings.threads,
        a_min=settings.a_min,
        budget=settings.escape_iterations,
    )
    return [r.to_json() for r in regions]


def _grid_check(args: argparse.Namespace, settings: Settings) -> Any:
    if args.depths:
        grid = MarkedGrid.from_depths([_parse_depth(x) for x in args.depths.split(",")])
    elif args.orders and args.kneading:
        grid = grid_from_orders([_parse_order(x) for x in args.orders.split(",")], args.kneading)
    else:
        raise ValueError("grid-check needs --depths, or --orders together with --kneading")
    report = validate_rules(grid)
    orders = [ord_from_grid(grid, j) for j in range(1, grid.p)]
    mu = multiplicity(orders) if grid.p > 1 else 1
    return {
        "depths": grid.to_json(),
        "kneading": str(grid.kneading),
        "passed": report.passed,
        "report": str(report),
        "orders": orders,
        "mu": mu,
        "nu": winding_number(grid, mu),
        "ascii": render_ascii(grid, levels=args.levels),
    }


def _centers(args: argparse.Namespace, settings: Settings) -> Any:
    return [
        {"c": c.c, "nickname": c.nickname, "orbit": list(c.orbit), "psi": c.psi()}
        for c in centers(args.r, settings.seed)
    ]


def _euler(args: argparse.Namespace, settings: Settings) -> Any:
    n = None
    if args.enumerate:
        regions = enumerate_regions(
            args.period,
            radii=(settings.fiber_radius, 40.0),
            seed=settings.seed,
            threads=settings.threads,
            a_min=settings.a_min,
            budget=settings.escape_iterations,
        )
        n = len(regions)
    return euler_row(args.period, n, settings.trunc)


def _render(args: argparse.Namespace, settings: Settings) -> Any:
    if args.base_file:
        base = CurvePoint.from_json(read_json(args.base_file))
    elif args.a is not None and args.v is not None:
        base = CurvePoint.project(parse_complex(args.a), parse_complex(args.v), args.period)
    else:
        raise ValueError("render needs --base-file, or --a together with --v")
    if base.p != args.period:
        raise ValueError(f"the base point lies on S_{base.p}, not S_{args.period}")
    if not args.image:
        raise ValueError("render needs --image for the PPM output")
    width, height = parse_size(args.size)
    image = render(
        base,
        width,
        height,
        parse_complex(args.center),
        args.scale,
        budget=settings.escape_iterations,
        threads=settings.threads,
    )
    write_ppm(image, args.image)
    return image.metadata() | {"image": args.image}


def _residue(args: argparse.Namespace, settings: Settings) -> Any:
    rows = []
    for region in _regions(args, settings):
        value = residue_at_ideal(region, R=args.radius, samples=args.samples)
        rows.append({"kneading": str(region.kneading), "mu": region.mu, "residue": value})
    return rows


def _find_v(args: argparse.Namespace, settings: Settings) -> Any:
    kneading = KneadingSequence.parse(args.kneading)
    if args.period is not None and args.period != kneading.p:
        raise ValueError(f"kneading sequence {kneading} has period {kneading.p}, not {args.period}")
    cfg = FinderConfig(parse_complex(args.a), kneading, tol=args.tol, max_sweeps=args.max_sweeps)
    result = find_v(cfg, parse_complex(args.v0))
    _emit(result.to_json(), args)
    result.raise_for_status()
    return None


def _real_components(args: argparse.Namespace, settings: Settings) -> Any:
    models = enumerate_components(args.period, args.orientation, args.mod_involution)
    return {
        "count": len(models),
        "components": [m.to_json() for m in models],
        "graph": [{"vertices": sorted(v), "edges": n} for v, n in component_graph(models)],
    }


def _reproduce_tables(args: argparse.Namespace, settings: Settings) -> Any:
    names = sorted(TABLES) if args.which == "all" else [args.which]
    return {name: reproduce(name, args.max_p, settings.trunc) for name in names}


def _emit(document: Any, args: argparse.Namespace) -> None:
    write_json(document, args.output, args.pretty)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-o", "--output", default=None, help="output path or fsspec URL (default: stdout)")
    common.add_argument("--pretty", action="store_true", help="indent JSON output")
    common.add_argument("--trunc", type=int, default=None, help="series truncation in powers of xi")
    common.add_argument("--seed", type=int, default=None, help="seed for root finder starts")
    common.add_argument("--threads", type=int, default=None, help="worker thread limit")

    parser = argparse.ArgumentParser(prog="cubicurve", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="more log output (repeatable)")
    parser.add_argument("--config", default=None, help="YAML configuration file")
    sub = parser.add_subparsers(dest="command", metavar="command")

    def add(name: str, handler: Handler, help: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, parents=[common], help=help, description=help)
        p.set_defaults(handler=handler)
        return p

    p = add("solve-series", _solve_series, "solve the Puiseux series of every region of a period")
    p.add_argument("-p", "--period", type=int, default=None)
    p.add_argument("--kneading", default=None)
    p.add_argument("--signs", default=None, help="one + or - per interior zero of the kneading sequence")

    p = add("enumerate-regions", _enumerate_regions, "find the regions numerically from fiber roots")
    p.add_argument("-p", "--period", type=int, required=True)
    p.add_argument("--r1", type=float, default=None)
    p.add_argument("--r2", type=float, default=40.0)
    p.add_argument("--steps", type=int, default=1024)

    p = add("grid-check", _grid_check, "check a marked grid against the grid rules")
    p.add_argument("--depths", default=None, help="column depths, e.g. inf,0,1,1")
    p.add_argument("--orders", default=None, help="orders of u_1..u_{p-1}, e.g. 0,1,1")
    p.add_argument("--kneading", default=None)
    p.add_argument("--levels", type=int, default=4)

    p = add("centers", _centers, "list the period r centers of the Mandelbrot set")
    p.add_argument("-r", type=int, required=True)

    p = add("euler", _euler, "degree, Euler characteristic and genus of S_p")
    p.add_argument("-p", "--period", type=int, required=True)
    p.add_argument("--enumerate", action="store_true", help="count ideal points from fiber roots")

    p = add("render", _render, "render the t-plane around a base point as a PPM image")
    p.add_argument("-p", "--period", type=int, required=True)
    p.add_argument("--base-file", default=None)
    p.add_argument("--a", default=None)
    p.add_argument("--v", default=None)
    p.add_argument("--center", default="0,0")
    p.add_argument("--scale", type=float, default=0.002)
    p.add_argument("--size", default="800x800")
    p.add_argument("--image", default=None, help="PPM output path or fsspec URL")

    p = add("residue", _residue, "integrate dt around the ideal point of every region")
    p.add_argument("-p", "--period", type=int, default=None)
    p.add_argument("--kneading", default=None)
    p.add_argument("--radius", type=float, default=40.0)
    p.add_argument("--samples", type=int, default=4096)

    p = add("find-v", _find_v, "locate v for given a and kneading sequence by fixed point sweeps")
    p.add_argument("-p", "--period", type=int, default=None)
    p.add_argument("-a", required=True)
    p.add_argument("--kneading", required=True)
    p.add_argument("--v0", required=True)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--max-sweeps", type=int, default=500)

    p = add("real-components", _real_components, "components of the real and imaginary loci")
    p.add_argument("-p", "--period", type=int, required=True)
    p.add_argument("--orientation", choices=("+", "-", "both"), default="both")
    p.add_argument("--mod-involution", action="store_true")

    p = add("reproduce-tables", _reproduce_tables, "reproduce the reference tables")
    p.add_argument("--which", choices=(*sorted(TABLES), "all"), default="all")
    p.add_argument("--max-p", type=int, default=4)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2

    level = max(logging.DEBUG, logging.WARNING - 10 * args.verbose)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")

    try:
        settings = load_settings(args.config, trunc=args.trunc, seed=args.seed, threads=args.threads)
        if getattr(args, "period", 0) is None and not getattr(args, "kneading", None):
            raise ValueError(f"{args.command} needs -p or --kneading")
        document = args.handler(args, settings)
        if document is not None:
            _emit(document, args)
    except Exception as e:
        code, message = translate_error(e)
        print(f"cubicurve {args.command}: {message}", file=sys.stderr)
        return code
    return 0
