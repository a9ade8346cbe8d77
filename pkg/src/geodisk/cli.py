"""Command-line interface: ``geodisk <command> <polygon.json> [options]``.

Exit status is 0 on success, 1 when ``cover-2 --radius`` finds no cover and
2 on malformed input.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

from .covering import gonzalez_placement, k_pack
from .errors import GeodiskError, InputError, PolygonHasHoles
from .io import RunRecord, file_digest, load_polygon, overlays_from_output, render_svg, to_jsonable
from .oracle import SUITES, property_suites
from .packing import greedy_packing
from .two_cover import min_two_cover, test_two_disk_cover

log = logging.getLogger("geodisk")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(2)


def _positive(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}")
    if not v > 0 or v == float("inf"):
        raise argparse.ArgumentTypeError(f"must be a positive finite number, got {text}")
    return v


def _count(least):
    def parse(text):
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
        if v < least:
            raise argparse.ArgumentTypeError(f"must be at least {least}, got {v}")
        return v

    return parse


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--approx-grid", type=_positive, metavar="H", help="replace exact farthest-point candidates by a lattice of spacing H")
    common.add_argument("--seed", type=int, default=0, help="seed for every randomized step (default 0)")
    common.add_argument("--json", action="store_true", help="print a machine-readable run record")
    common.add_argument("--timings", action="store_true", help="include per-phase timings in the JSON record")
    common.add_argument("--quiet", action="store_true", help="suppress human-readable output")
    common.add_argument("--svg", metavar="OUT", help="write an SVG rendering")
    common.add_argument("-v", "--verbose", action="store_true", help="debug logging")

    parser = _Parser(prog="geodisk", description="Geodesic disk packing and covering in polygons.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("pack-unit", parents=[common], help="greedy packing of unit-radius disks")
    p.add_argument("polygon")
    p = sub.add_parser("pack", parents=[common], help="greedy packing of disks of a given radius")
    p.add_argument("polygon")
    p.add_argument("--radius", type=_positive, required=True)
    p = sub.add_parser("cover-k", parents=[common], help="farthest-first k-cover")
    p.add_argument("polygon")
    p.add_argument("--k", type=_count(1), required=True)
    p = sub.add_parser("pack-k", parents=[common], help="k disks of maximum common radius")
    p.add_argument("polygon")
    p.add_argument("--k", type=_count(2), required=True)
    p = sub.add_parser("cover-2", parents=[common], help="two-disk cover: decide a radius or minimize")
    p.add_argument("polygon")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--radius", type=str, help="decide whether two disks of this radius cover the polygon")
    g.add_argument("--eps", type=_positive, help="bisection tolerance for the minimum radius")
    p = sub.add_parser("verify", parents=[common], help="randomized property checks")
    p.add_argument("polygon")
    p.add_argument("--suite", choices=("all",) + SUITES, default="all")
    p.add_argument("--samples", type=_count(1), default=500, help="sample budget per suite")
    p = sub.add_parser("render", parents=[common], help="render a polygon and an optional result record")
    p.add_argument("polygon")
    p.add_argument("result", nargs="?", help="JSON record written by --json")
    return parser


def _fmt(p) -> str:
    return f"({p[0]:.10g}, {p[1]:.10g})"


def _run(args, P):
    """Execute one command; returns (params, output, exit code, text lines)."""
    cmd = args.command
    if cmd in ("pack-unit", "pack"):
        r = 1.0 if cmd == "pack-unit" else args.radius
        res = greedy_packing(P, r)
        out = {"K": res.K, "radius": r, "centers": res.centers}
        text = [f"K={res.K}"] + [f"center {_fmt(c)}" for c in res.centers]
        return {"radius": r}, out, 0, text
    if cmd == "cover-k":
        res = gonzalez_placement(P, args.k, args.approx_grid)
        out = {
            "k": args.k,
            "centers": res.centers,
            "radius": res.covering_radius,
            "certificate_delta": res.certificate_delta,
            "radii_trace": res.radii_trace,
            "next_point": res.next_point,
        }
        text = [f"center {_fmt(c)}" for c in res.centers]
        text += [f"radius={res.covering_radius:.10g}", f"certificate_delta={res.certificate_delta:.10g}"]
        return {"k": args.k, "approx_grid": args.approx_grid}, out, 0, text
    if cmd == "pack-k":
        centers, s = k_pack(P, args.k, args.approx_grid)
        out = {"k": args.k, "centers": centers, "radius": s}
        text = [f"center {_fmt(c)}" for c in centers] + [f"radius={s:.10g}"]
        return {"k": args.k, "approx_grid": args.approx_grid}, out, 0, text
    if cmd == "cover-2":
        if args.radius is not None:
            try:
                r = _positive(args.radius)
            except argparse.ArgumentTypeError as exc:
                raise InputError("--radius", str(exc)) from exc
            w = test_two_disk_cover(P, r)
            if w is None:
                out = {"feasible": False, "radius": r, "centers": []}
                return {"radius": r}, out, 1, [f"no two-disk cover at r={args.radius}"]
            out = {"feasible": True, "radius": r, "centers": [w.c1, w.c2]}
            return {"radius": r}, out, 0, [f"witness c1={_fmt(w.c1)} c2={_fmt(w.c2)} r={args.radius}"]
        w = min_two_cover(P, args.eps)
        out = {"feasible": True, "radius": w.r, "lower_bound": w.lower, "centers": [w.c1, w.c2]}
        text = [f"witness c1={_fmt(w.c1)} c2={_fmt(w.c2)} r={w.r:.10g}", f"lower_bound={w.lower:.10g}"]
        return {"eps": args.eps}, out, 0, text
    if cmd == "verify":
        rep = property_suites(P, args.samples, args.suite, args.seed)
        out = {
            "passed": rep.passed,
            "properties": [{"name": r.name, "passed": r.passed, "checked": r.checked, "witness": r.witness} for r in rep.results],
        }
        return {"suite": args.suite, "samples": args.samples}, out, 0, rep.lines() + [rep.summary()]
    if cmd == "render":
        out = {}
        if args.result:
            try:
                out = RunRecord.from_json(Path(args.result).read_text()).output
            except (OSError, ValueError, KeyError, TypeError) as exc:
                raise InputError("result", f"cannot read run record {args.result}: {exc}") from exc
        if not args.svg:
            raise InputError("--svg", "render needs an output path")
        return {"result": bool(args.result)}, out, 0, []
    raise InputError("command", f"unknown command {cmd!r}")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    timings = {}
    try:
        t0 = time.perf_counter()
        P = load_polygon(args.polygon)
        digest = file_digest(args.polygon)
        timings["load"] = (time.perf_counter() - t0) * 1e3
        t0 = time.perf_counter()
        params, output, code, text = _run(args, P)
        timings["solve"] = (time.perf_counter() - t0) * 1e3
    except GeodiskError as exc:
        # name the offending field: holes are rejected by the simple-polygon commands
        msg = f"holes: {exc}" if isinstance(exc, PolygonHasHoles) else str(exc)
        print(f"geodisk: error: {msg}", file=sys.stderr)
        return 2
    params = dict(params, seed=args.seed)
    # serialize once and render from the parsed record, so --svg and
    # "render <record>" produce the same bytes
    output = json.loads(json.dumps(to_jsonable(output)))
    if args.svg:
        t0 = time.perf_counter()
        Path(args.svg).write_text(render_svg(P, overlays_from_output(output)))
        timings["render"] = (time.perf_counter() - t0) * 1e3
    record = RunRecord(args.command, params, digest, output, timings)
    if args.json:
        sys.stdout.write(record.to_json(timings=args.timings))
    elif not args.quiet:
        for line in text:
            print(line)
    elif code == 1:
        print(text[0], file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
