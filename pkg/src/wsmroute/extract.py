"""Per-level PIP extraction along a routed net.

Walking a net, every switch matrix it enters is one level.  At each level the
entry node's downhill PIP endpoints are collected; the entry is labelled by
the wire it arrived on (``NN1BEG3``), or by the first switch-matrix node at
level 1 (``LOGIC_OUTS2``).
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from importlib import resources

from .errors import ConsistencyError, UnknownNodeError
from .fabric import Fabric, downhill_nodes
from .grammar import TileCoord, parse_node, wire_offsets
from .nets import Net, Node


@dataclass(frozen=True)
class LevelReport:
    level: int
    pin: str
    pips: frozenset
    tile: TileCoord
    entry: str  # node whose downhill was taken (landing name for wires)


def _check_nodes(f: Fabric, net: Net) -> None:
    for n in net.nodes:
        if not f.in_bounds(n.x, n.y) or n.name not in f.wsm(n.x, n.y).nodes:
            raise ConsistencyError(f"net {net.name}: node {n} missing from fabric")


def traversed_pins(net: Net) -> list[tuple[str, Node]]:
    """``(label, entry node)`` for each switch matrix the net passes through."""
    nodes = net.nodes
    if not nodes:
        return []
    start = 1 if len(nodes) > 1 and parse_node(nodes[0].name).cls == "CLB_PIN" else 0
    out = [(nodes[start].name, nodes[start])]
    for prev, n in zip(nodes[start:], nodes[start + 1:]):
        if (prev.x, prev.y) != (n.x, n.y):
            out.append((_wire_label(prev, n), n))
    return out


def _wire_label(origin: Node, landing: Node) -> str:
    p = parse_node(landing.name)
    if p.cls == "directional":
        return wire_offsets(p)[0][2]
    return origin.name


def extract_levels(f: Fabric, net: Net, max_level: int) -> list[LevelReport]:
    if max_level < 1:
        raise ValueError("max_level must be >= 1")
    _check_nodes(f, net)
    reports = []
    for level, (label, node) in enumerate(traversed_pins(net)[:max_level], start=1):
        try:
            pips = downhill_nodes(f, node.tile, node.name)
        except UnknownNodeError as e:
            raise ConsistencyError(str(e)) from None
        reports.append(LevelReport(level, label, frozenset(pips), node.tile, node.name))
    return reports


def reports_to_csv(reports) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["level", "pin", "pip_endpoint"])
    for r in reports:
        for p in sorted(r.pips):
            w.writerow([r.level, r.pin, p])
    return out.getvalue()


def reports_to_text(reports, per_row: int = 2) -> str:
    """Side-by-side blocks, one per level, endpoints ``per_row`` to a line."""
    columns = []
    for r in reports:
        names = sorted(r.pips)
        body = [" , ".join(names[i:i + per_row]) for i in range(0, len(names), per_row)]
        columns.append([f"PIPs in wsm_level={r.level}:", "node connected to", r.pin, ""] + body)
    if not columns:
        return ""
    widths = [max(len(s) for s in col) for col in columns]
    height = max(len(col) for col in columns)
    lines = []
    for i in range(height):
        cells = [(col[i] if i < len(col) else "").ljust(w) for col, w in zip(columns, widths)]
        lines.append(" | ".join(cells).rstrip())
    return "\n".join(lines) + "\n"


def read_reference_levels(text: str | None = None) -> dict[int, tuple[str, frozenset]]:
    """Published extraction blocks: ``{level: (pin, endpoints)}``."""
    if text is None:
        text = resources.files("wsmroute.data").joinpath("neta_pips.txt").read_text("utf-8")
    out: dict[int, tuple[str, set]] = {}
    level = None
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("["):
            head, pin = line.strip("[]").split()
            level = int(head.split("=")[1])
            out[level] = (pin, set())
        else:
            out[level][1].update(line.split())
    return {k: (p, frozenset(s)) for k, (p, s) in out.items()}
