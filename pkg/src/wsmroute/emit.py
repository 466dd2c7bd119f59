"""FIXED_ROUTE emission, route files and oscillator reports."""
from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import ConfigError, EmptyReportError, ParseError
from .grammar import TileCoord, parse_tile
from .nets import NET_NAME, Net

_FIXED_ROUTE = re.compile(
    r"^\s*set_property\s+FIXED_ROUTE\s+\{(?P<body>[^}]*)\}\s+\[get_nets\s+(?P<net>\S+)\s*\]\s*$"
)


@dataclass(frozen=True)
class EmitterConfig:
    net_name: str
    output_path: Optional[str] = None
    format: str = "tcl"

    def __post_init__(self):
        if not self.net_name or not NET_NAME.match(self.net_name):
            raise ConfigError(f"invalid net name {self.net_name!r}")
        if self.format not in ("tcl", "xdc"):
            raise ConfigError(f"unknown constraint format {self.format!r}")


def format_fixed_route(tokens: Sequence[str], net_name: str) -> str:
    body = " ".join(tokens)
    inner = f" {body} " if body else " "
    return f"set_property FIXED_ROUTE {{{inner}}} [get_nets {net_name}]\n"


def emit_fixed_route(net, cfg: EmitterConfig) -> str:
    """One FIXED_ROUTE statement for ``net`` (a Net or a token list)."""
    tokens = net.tokens() if isinstance(net, Net) else list(net)
    text = format_fixed_route(tokens, cfg.net_name)
    if cfg.output_path:
        with open(cfg.output_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return text


@dataclass(frozen=True)
class RouteSpec:
    name: Optional[str]
    start: Optional[TileCoord]
    tokens: tuple


def read_route(text: str) -> RouteSpec:
    """Parse a route file: optional ``net``/``start`` lines, then node tokens.

    The tokens may also be given as a FIXED_ROUTE statement.
    """
    name = start = None
    tokens: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        head, _, rest = line.partition(" ")
        if head == "net":
            name = rest.strip()
        elif head == "start":
            try:
                start = parse_tile(rest.strip())
            except ParseError as e:
                raise ParseError(str(e), line=lineno) from None
        elif head == "set_property":
            m = _FIXED_ROUTE.match(line)
            if not m:
                raise ParseError("malformed FIXED_ROUTE statement", line=lineno)
            tokens += m["body"].split()
            name = name or m["net"]
        else:
            tokens += line.split()
    return RouteSpec(name, start, tuple(tokens))


def read_route_file(path) -> RouteSpec:
    with open(path, encoding="utf-8") as fh:
        return read_route(fh.read())


def dumps_route(net: Net) -> str:
    lines = [f"net {net.name}"]
    if net.nodes:
        lines.append(f"start {net.nodes[0].tile.name}")
    lines.append(" ".join(net.tokens()))
    return "\n".join(lines) + "\n"


REPORT_COLUMNS = ("ro_type", "frequency_khz", "net_delay_ps", "interconnect_count")


def _row(ro, rep) -> tuple:
    ref = getattr(ro, "reference", None)
    net_delay = ref.net_delay_ps if ref is not None and ref.net_delay_ps is not None \
        else rep.net_delay_ps
    return (ro.label, rep.frequency, net_delay, rep.interconnect_count)


def report_ros(entries, format: str = "csv") -> str:
    """Table of oscillators: type, frequency, net delay, interconnect count.

    ``net_delay_ps`` is the measured value when the oscillator carries a
    reference row, else the model's mean hop delay.
    """
    entries = list(entries)
    if not entries:
        raise EmptyReportError("no oscillators to report")
    rows = [_row(ro, rep) for ro, rep in entries]
    if format == "csv":
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(REPORT_COLUMNS)
        for label, f, d, n in rows:
            w.writerow([label, repr(float(f)), repr(float(d)), n])
        return out.getvalue()
    if format != "text":
        raise ConfigError(f"unknown report format {format!r}")
    cells = [list(REPORT_COLUMNS)] + [[lab, f"{f:.1f}", f"{d:.1f}", str(n)]
                                      for lab, f, d, n in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(4)]
    lines = []
    for r in cells:
        first = r[0].ljust(widths[0])
        rest = [c.rjust(w) for c, w in zip(r[1:], widths[1:])]
        lines.append("  ".join([first] + rest))
    return "\n".join(lines) + "\n"


def parse_report_csv(text: str) -> list[tuple[str, float, float, int]]:
    rdr = csv.DictReader(io.StringIO(text))
    return [(r["ro_type"], float(r["frequency_khz"]), float(r["net_delay_ps"]),
             int(r["interconnect_count"])) for r in rdr]
