"""Command-line front end.

Exit status: 0 on success, 1 on a domain error, 2 on a usage error.  Data go
to stdout (or ``-o``); diagnostics go to stderr as ``error[<tag>]: ...``.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from importlib import resources
from typing import Optional, Sequence

from . import emit as emit_mod
from .errors import ConfigError, WsmRouteError
from .extract import extract_levels, reports_to_csv, reports_to_text
from .fabric import DEFAULT_SEED, build_fabric, dumps_fabric, load_fabric
from .grammar import TileCoord, parse_tile
from .kinds import kind_from_label
from .router import (RouteQuery, build_ros, place_endpoints, ro_fabric_size, route,
                     route_fixed)
from .timing import (calibrate, default_model, dumps_model, estimate, geometries_from_table,
                     load_calibration)

log = logging.getLogger("wsmroute")

DEFAULT_SIZE = (8, 8)


def _seed(args) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    env = os.environ.get("WSM_FABRIC_SEED")
    if env:
        try:
            return int(env)
        except ValueError:
            raise ConfigError(f"WSM_FABRIC_SEED must be an integer, got {env!r}") from None
    return DEFAULT_SEED


def _size(text: str) -> tuple[int, int]:
    try:
        w, h = text.lower().split("x")
        return int(w), int(h)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected WxH, got {text!r}") from None


def _endpoint(text: str) -> tuple[int, int, Optional[str]]:
    """``X,Y`` or ``X,Y:PIN`` or ``INT_R_X1Y2[:PIN]``."""
    loc, _, pin = text.partition(":")
    try:
        if loc.startswith("INT_"):
            t = parse_tile(loc)
            return t.x, t.y, pin or None
        x, y = loc.split(",")
        return int(x), int(y), pin or None
    except (ValueError, WsmRouteError):
        raise argparse.ArgumentTypeError(f"expected X,Y[:PIN], got {text!r}") from None


def _fabric(args, size=None):
    if getattr(args, "fabric", None):
        return load_fabric(args.fabric)
    w, h = size or getattr(args, "size", None) or DEFAULT_SIZE
    return build_fabric(w, h, _seed(args))


def _write(args, text: str) -> None:
    if getattr(args, "output", None):
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _model(args):
    if getattr(args, "calib", None):
        return calibrate(load_calibration(args.calib), args.cell_delay)
    return default_model(args.cell_delay)


def cmd_build(args) -> None:
    _write(args, dumps_fabric(build_fabric(args.width, args.height, _seed(args))))


def cmd_route(args) -> None:
    f = _fabric(args)
    sx, sy, spin = args.source
    dx, dy, dpin = args.dest
    src_cell, dst_cell = place_endpoints(f, TileCoord.at(sx, sy), TileCoord.at(dx, dy))
    kinds = frozenset(kind_from_label(k) for k in args.kinds.split(",")) if args.kinds else None
    q = RouteQuery((src_cell.tile, spin or src_cell.out_pin), (dst_cell.tile, dpin or dst_cell.in_pin),
                   kinds, args.objective, args.name)
    _write(args, emit_mod.dumps_route(route(f, q, default_model(args.cell_delay))))


def _bundled(name: str) -> str:
    return str(resources.files("wsmroute.data").joinpath(name))


def cmd_extract(args) -> None:
    f = _fabric(args)
    spec = emit_mod.read_route_file(args.net or _bundled("neta.route"))
    if spec.start is None:
        raise ConfigError("route file has no 'start <TILE>' line")
    net = route_fixed(f, spec.name or "net", spec.tokens, spec.start)
    reports = extract_levels(f, net, args.levels)
    _write(args, reports_to_csv(reports) if args.format == "csv" else reports_to_text(reports))


def cmd_ro(args) -> None:
    kind = kind_from_label(args.kind)
    model = _model(args)
    targets: list = []
    if args.calib:
        targets = [r.interconnect_count for r in load_calibration(args.calib) if r.kind is kind]
    targets = (targets + [None] * args.count)[:args.count]
    hint = max((t for t in targets if t), default=None)
    if args.fabric:
        f = load_fabric(args.fabric)
        anchor = TileCoord.at(*args.anchor) if args.anchor else ro_fabric_size(kind, hint)[2]
    else:
        w, h, anchor = ro_fabric_size(kind, hint, args.count)
        f = build_fabric(w, h, _seed(args))
        if args.anchor:
            anchor = TileCoord.at(*args.anchor)
    ros = build_ros(f, kind, anchor, args.count, targets, model)
    _write(args, emit_mod.report_ros([(r, estimate(r, model)) for r in ros], args.format))


def cmd_calibrate(args) -> None:
    _write(args, dumps_model(calibrate(load_calibration(args.table), args.cell_delay)))


def cmd_emit(args) -> None:
    spec = emit_mod.read_route_file(args.net)
    name = args.name or spec.name
    if not name:
        raise ConfigError("no net name: pass --name or add a 'net <NAME>' line")
    cfg = emit_mod.EmitterConfig(name, None, args.format)
    if args.fabric:
        if spec.start is None:
            raise ConfigError("validating against a fabric needs a 'start <TILE>' line")
        net = route_fixed(load_fabric(args.fabric), name, spec.tokens, spec.start)
        tokens = net.tokens()
    else:
        tokens = list(spec.tokens)
    _write(args, emit_mod.emit_fixed_route(tokens, cfg))


def cmd_report(args) -> None:
    rows = load_calibration(args.calib)
    model = calibrate(rows, args.cell_delay)
    geoms = geometries_from_table(rows)
    _write(args, emit_mod.report_ros([(g, estimate(g, model)) for g in geoms], args.format))


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error[usage]: {message}\n")
        sys.exit(2)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="wsmroute", description="Wilton switch-matrix fabric routing tools")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def common(sp, fabric=True, out=True):
        if fabric:
            sp.add_argument("--fabric", help="fabric description file")
            sp.add_argument("--size", type=_size, help="default fabric size WxH (default 8x8)")
            sp.add_argument("--seed", type=int, help="generator seed (env WSM_FABRIC_SEED)")
        if out:
            sp.add_argument("-o", "--output", help="write to file instead of stdout")

    sp = sub.add_parser("build", help="generate and save a fabric")
    sp.add_argument("--width", type=int, required=True)
    sp.add_argument("--height", type=int, required=True)
    sp.add_argument("--seed", type=int)
    common(sp, fabric=False)
    sp.set_defaults(func=cmd_build)

    sp = sub.add_parser("route", help="route one net")
    sp.add_argument("--from", dest="source", type=_endpoint, required=True)
    sp.add_argument("--to", dest="dest", type=_endpoint, required=True)
    sp.add_argument("--kinds", help="comma-separated allowed interconnect kinds")
    sp.add_argument("--objective", default="lexicographic",
                    choices=("min_delay", "min_hops", "lexicographic"))
    sp.add_argument("--name", default="net")
    sp.add_argument("--cell-delay", type=float, default=0.0)
    common(sp)
    sp.set_defaults(func=cmd_route)

    sp = sub.add_parser("extract-pips", help="per-level PIP extraction along a net")
    sp.add_argument("--net", help="route file (default: bundled NetA)")
    sp.add_argument("--levels", type=int, default=2)
    sp.add_argument("--format", choices=("text", "csv"), default="text")
    common(sp)
    sp.set_defaults(func=cmd_extract)

    sp = sub.add_parser("ro", help="build and time ring oscillators")
    sp.add_argument("--kind", required=True)
    sp.add_argument("--count", type=int, default=2)
    sp.add_argument("--calib", help="calibration CSV; also sets hop-count targets")
    sp.add_argument("--cell-delay", type=float, default=0.0)
    sp.add_argument("--anchor", type=lambda s: _endpoint(s)[:2])
    sp.add_argument("--format", choices=("csv", "text"), default="csv")
    common(sp)
    sp.set_defaults(func=cmd_ro)

    sp = sub.add_parser("calibrate", help="fit per-kind hop delays")
    sp.add_argument("--table", help="calibration CSV (default: bundled published table)")
    sp.add_argument("--cell-delay", type=float, default=0.0)
    common(sp, fabric=False)
    sp.set_defaults(func=cmd_calibrate)

    sp = sub.add_parser("emit", help="emit a FIXED_ROUTE constraint")
    sp.add_argument("--net", required=True, help="route file")
    sp.add_argument("--name")
    sp.add_argument("--format", choices=("tcl", "xdc"), default="tcl")
    sp.add_argument("--fabric", help="validate the route against this fabric")
    common(sp, fabric=False)
    sp.set_defaults(func=cmd_emit)

    sp = sub.add_parser("report", help="oscillator report for a calibration table")
    sp.add_argument("--calib", help="calibration CSV (default: bundled published table)")
    sp.add_argument("--cell-delay", type=float, default=0.0)
    sp.add_argument("--format", choices=("csv", "text"), default="text")
    common(sp, fabric=False)
    sp.set_defaults(func=cmd_report)
    return p


def run_cli(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv:
        parser.print_usage(sys.stderr)
        sys.stderr.write("error[usage]: a subcommand is required\n")
        return 2
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    if args.command is None:
        parser.print_usage(sys.stderr)
        sys.stderr.write("error[usage]: a subcommand is required\n")
        return 2
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except WsmRouteError as e:
        sys.stderr.write(f"error[{e.tag}]: {e}\n")
        return 1
    except ValueError as e:
        sys.stderr.write(f"error[invalid-argument]: {e}\n")
        return 1
    except OSError as e:
        sys.stderr.write(f"error[io]: {e}\n")
        return 1
    return 0


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
