"""Routing fabric: a grid of Wilton switch matrices joined by wires.

Every interconnect tile exposes the same port interface (the per-kind census).
PIPs are tile-local ``src -> dst`` connections; wires join tiles and are
derived from node names by the displacement rule in :mod:`wsmroute.grammar`.
Wires whose far end would fall outside the grid are dropped.
"""
from __future__ import annotations

import functools
import io
import logging
import random
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Optional

from .errors import ConsistencyError, InvalidDimensionError, ParseError, UnknownNodeError
from .grammar import (PipRef, TileCoord, format_pip, is_wire_origin, parse_node, parse_pip,
                      tile_class_for, wire_offsets)
from .kinds import CENSUS, KINDS, Kind

log = logging.getLogger(__name__)

DEFAULT_SEED = 0

# Planar switch matrix: CLB output pins feed LOGIC_OUTS, IMUX feed input pins.
OUTPUT_PINS: tuple[str, ...] = (
    "CLBLM_M_A", "CLBLM_M_B", "CLBLM_M_C", "CLBLM_M_D",
    "CLBLM_L_A", "CLBLM_L_B", "CLBLM_L_C", "CLBLM_L_D",
)
OUTPUT_PIN_TO_LOGIC_OUTS = {
    "CLBLM_L_A": 0, "CLBLM_L_B": 1, "CLBLM_M_A": 2, "CLBLM_M_B": 3,
    "CLBLM_L_C": 4, "CLBLM_L_D": 5, "CLBLM_M_C": 6, "CLBLM_M_D": 7,
}
# IMUX<i> drives INPUT_PINS[i]; listed in placement preference order.
INPUT_PINS: tuple[str, ...] = tuple(
    f"CLBLM_{s}_{lut}{k}"
    for s, luts in (("M", "DCBA"), ("L", "DCBA"))
    for lut in luts
    for k in range(6, 0, -1)
)[:32]

# Ground truth for two source nodes; overrides the procedural fanout.
# The published listing spells two of these "SW6BE0" and "SS6BG3".
LOGIC_OUTS2_DOWNHILL = frozenset("""
WW4BEG0 NW2BEG0 WW2BEG0 NR1BEG0 WR1BEG1 NN6BEG0 WN1BEG_N3 NN1BEG3 SW6BEG0
NE6BEG0 SW2BEG0 NE2BEG0 SS6BEG0 IMUX_L8 SS2BEG0 IMUX_L40 SR1BEG1 IMUX_L32
SL1BEG0 IMUX_L24 SE6BEG0 IMUX_L16 SE2BEG0 IMUX_L0 NL1BEG_N3 ER1BEG1 BYP_ALT0
EL1BEG_N3 FAN_ALT0 EE4BEG0 NW6BEG0 EE2BEG0
""".split())
NN1BEG3_DOWNHILL = frozenset("""
WW4BEG0 LV_L0 WR1BEG1 WW2BEG0 NL1BEG_N3 WL1BEG2 NW6BEG0 SW6BEG3 NW2BEG0
SW2BEG3 NN6BEG0 SS6BEG3 NN2BEG0 SS2BEG3 NE6BEG0 SR1BEG1 LV_L18 ER1BEG_S0
""".split())
# The second set is the downhill of the wire NN1BEG3 where it lands.
PINNED_DOWNHILL = {"LOGIC_OUTS2": LOGIC_OUTS2_DOWNHILL, "NN1END3": NN1BEG3_DOWNHILL}

# Wire families per kind, with the wires the published examples name.
_FAMILIES = {
    Kind.SINGLE: ("NN", "SS", "EE", "WW", "NE", "NW", "SE", "SW",
                  "NL", "NR", "SL", "SR", "EL", "ER", "WL", "WR", "WN"),
    Kind.DOUBLE: ("NN", "SS", "EE", "WW", "NE", "NW", "SE", "SW"),
    Kind.HQUAD: ("EE", "WW"),
    Kind.VQUAD: ("NN", "SS"),
    Kind.BENTQUAD: ("NE", "NW", "SE", "SW"),
    Kind.BOUNCEACROSS: ("NB", "SB"),
}
_LENGTH = {Kind.SINGLE: 1, Kind.DOUBLE: 2, Kind.HQUAD: 4, Kind.VQUAD: 6,
           Kind.BENTQUAD: 6, Kind.BOUNCEACROSS: 1}
_REQUIRED = {
    Kind.SINGLE: ("NR1_0", "WR1_1", "WN1_N3", "NN1_3", "SR1_1", "SL1_0", "NL1_N3",
                  "ER1_1", "EL1_N3", "WL1_2", "ER1_S0", "NW1_0", "SW1_1", "NN1_1",
                  "EE1_1", "NW1_1"),
    Kind.DOUBLE: ("NW2_0", "WW2_0", "SW2_0", "NE2_0", "SS2_0", "SE2_0", "EE2_0",
                  "SW2_3", "NN2_0", "SS2_3", "SE2_1"),
    Kind.HQUAD: ("WW4_0", "EE4_0"),
    Kind.VQUAD: ("NN6_0", "SS6_0", "SS6_3"),
    Kind.BENTQUAD: ("SW6_0", "NE6_0", "SE6_0", "NW6_0", "SW6_3"),
    Kind.BOUNCEACROSS: (),
}


def _wire_name(spec: str, term: str) -> str:
    head, tail = spec.split("_")
    return f"{head[:2]}{head[2:]}{term}{'_' + tail if not tail.isdigit() else tail}"


def _directional_wires(kind: Kind) -> tuple[list[str], list[str]]:
    """(BEG names, END-only names) giving exactly the census count of ports."""
    count = CENSUS[kind]
    length = _LENGTH[kind]
    specs = list(_REQUIRED[kind])
    seen = set(specs)
    fill = (f"{fam}{length}_{i}" for i in range(100) for fam in _FAMILIES[kind])
    while len(specs) < (count + 1) // 2:
        s = next(fill)
        if s not in seen:
            seen.add(s)
            specs.append(s)
    begs = [_wire_name(s, "BEG") for s in specs]
    ends = [_wire_name(s, "END") for s in specs]
    if count % 2:
        # Odd census: the last wire contributes only its landing port.
        begs.pop()
    return begs, ends


@dataclass(frozen=True)
class PortSet:
    begs: dict  # Kind -> list of BEG names
    ends: dict  # Kind -> list of END names
    taps: list
    logic_outs: list
    outbound_n: list
    outbound_s: list
    imux: list  # planar-mapped pin feeds
    pinfeed_other: list
    bounce_in: list
    pin_bounce: list
    gclk: list
    tie: list

    def all(self) -> list[str]:
        out = []
        for k in self.begs:
            out += self.begs[k] + self.ends[k]
        return (out + self.taps + self.logic_outs + self.outbound_n + self.outbound_s
                + self.imux + self.pinfeed_other + self.bounce_in + self.pin_bounce
                + self.gclk + self.tie)


@functools.lru_cache(maxsize=1)
def port_set() -> PortSet:
    begs, ends = {}, {}
    for k in _FAMILIES:
        begs[k], ends[k] = _directional_wires(k)
    return PortSet(
        begs=begs,
        ends=ends,
        taps=["LV_L0", "LV_L9", "LV_L18", "LV0", "LV12", "LH0", "LH9", "LH18"],
        logic_outs=[f"LOGIC_OUTS{i}" for i in range(20)],
        outbound_n=["LOGIC_OUTS_N0", "LOGIC_OUTS_N1"],
        outbound_s=["LOGIC_OUTS_S0", "LOGIC_OUTS_S1"],
        imux=[f"IMUX{i}" for i in range(32)],
        pinfeed_other=[f"IMUX_L{i}" for i in range(0, 48, 8)]
        + ["BYP_ALT0", "BYP_ALT1", "FAN_ALT0", "FAN_ALT1"],
        bounce_in=[f"BOUNCE_IN{i}" for i in range(9)],
        pin_bounce=[f"BYP_BOUNCE{i}" for i in range(8)] + [f"FAN_BOUNCE{i}" for i in range(8)],
        gclk=[f"GCLK{i}" for i in range(12)],
        tie=["GND_WIRE0", "VCC_WIRE0"],
    )


def _template(seed: int) -> dict[str, frozenset[str]]:
    """Per-tile PIP template: source node -> destination nodes.

    Landing nodes of a wire family connect to one wire of every family of the
    same kind (Wilton-style index rotation) plus a few seeded picks of other
    kinds, so that single-kind routing always exists.
    """
    ports = port_set()
    by_family: dict[Kind, dict[str, list[str]]] = {}
    for k, names in ports.begs.items():
        fams: dict[str, list[str]] = {}
        for n in names:
            fams.setdefault(n[:2], []).append(n)
        by_family[k] = fams
    groups = {k: list(v) for k, v in ports.begs.items()}
    groups["LONG"] = list(ports.taps)
    groups["OUTN"] = list(ports.outbound_n)
    bounces = ports.bounce_in + ports.pin_bounce

    def pick(rng, seq, n=1):
        return rng.sample(seq, n)

    pips: dict[str, set[str]] = {}

    def add(src, dsts):
        pips.setdefault(src, set()).update(d for d in dsts if d != src)

    for k, ends in ports.ends.items():
        for i, end in enumerate(ends):
            rng = random.Random(f"{seed}:{end}")
            dsts = [names[(i + j) % len(names)]
                    for j, names in enumerate(by_family[k].values())]
            other = [g for g in groups if g != k]
            dsts += pick(rng, groups[pick(rng, other)[0]])
            dsts += pick(rng, ports.imux, 2)
            dsts += pick(rng, ports.pinfeed_other) + pick(rng, bounces)
            add(end, dsts)
    for i, tap in enumerate(ports.taps):
        rng = random.Random(f"{seed}:{tap}")
        dsts = [t for t in ports.taps if t[:2] == tap[:2] and t != tap]
        dsts += pick(rng, groups[pick(rng, list(ports.begs))[0]])
        dsts += pick(rng, ports.imux) + pick(rng, bounces)
        add(tap, dsts)
    for src in ports.logic_outs + ports.outbound_s:
        rng = random.Random(f"{seed}:{src}")
        dsts = [pick(rng, g)[0] for g in groups.values()]
        dsts += pick(rng, ports.imux) + pick(rng, ports.pinfeed_other) + pick(rng, bounces)
        add(src, dsts)
    every_dst = sorted({d for g in groups.values() for d in g}
                       | set(ports.imux) | set(ports.pinfeed_other) | set(bounces))
    for src in bounces + ports.gclk + ports.tie:
        rng = random.Random(f"{seed}:{src}")
        add(src, pick(rng, every_dst, 3))
    # Bounce nodes reach every IMUX so border tiles keep their input pins usable.
    for i, imux in enumerate(ports.imux):
        add(bounces[i % len(bounces)], [imux])
    for src, dsts in PINNED_DOWNHILL.items():
        pips[src] = set(dsts)
    # Every port must appear in at least one PIP.
    driven = set().union(*pips.values())
    free_srcs = sorted(set(pips) - set(PINNED_DOWNHILL))
    rng = random.Random(f"{seed}:cover")
    for d in every_dst:
        if d not in driven:
            pips[rng.choice(free_srcs)].add(d)
    # Planar switch matrix.
    for pin, idx in OUTPUT_PIN_TO_LOGIC_OUTS.items():
        pips[pin] = {f"LOGIC_OUTS{idx}"}
    for i, imux in enumerate(ports.imux):
        pips[imux] = {INPUT_PINS[i]}
    return {s: frozenset(d) for s, d in pips.items()}


@functools.lru_cache(maxsize=8)
def _frozen_template(seed: int) -> Mapping[str, frozenset[str]]:
    return _template(seed)


@dataclass(frozen=True)
class Wsm:
    tile: TileCoord
    nodes: frozenset
    downhill: Mapping[str, frozenset]
    uphill: Mapping[str, frozenset]

    def census(self) -> Counter:
        """Attachment count per interconnect kind (CLB pins excluded)."""
        c: Counter = Counter()
        for n in self.nodes:
            k = parse_node(n).kind
            if k is not None:
                c[k] += 1
        return c


@dataclass(frozen=True, eq=False)
class Fabric:
    """Immutable W x H grid of switch matrices.

    ``pips`` maps ``(x, y)`` to that tile's ``src -> {dst}`` adjacency.
    """

    width: int
    height: int
    seed: int
    pips: Mapping[tuple[int, int], Mapping[str, frozenset]]
    kinds: tuple = field(default=KINDS, repr=False)

    def __eq__(self, other):
        if not isinstance(other, Fabric):
            return NotImplemented
        return (self.width, self.height, self.seed) == (other.width, other.height, other.seed) \
            and _normalized(self.pips) == _normalized(other.pips)

    __hash__ = None

    def tile(self, x: int, y: int) -> TileCoord:
        if not self.in_bounds(x, y):
            raise ConsistencyError(f"tile ({x},{y}) outside {self.width}x{self.height} fabric")
        return TileCoord.at(x, y)

    def tiles(self) -> Iterator[TileCoord]:
        for x in range(self.width):
            for y in range(self.height):
                yield TileCoord.at(x, y)

    def in_bounds(self, x: int, y: int) -> bool:
        return 0 <= x < self.width and 0 <= y < self.height

    def is_interior(self, x: int, y: int) -> bool:
        return 0 < x < self.width - 1 and 0 < y < self.height - 1

    def pip_count(self) -> int:
        return sum(len(d) for adj in self.pips.values() for d in adj.values())

    def iter_pips(self) -> Iterator[tuple[int, int, str, str]]:
        for (x, y), adj in self.pips.items():
            for src, dsts in adj.items():
                for dst in dsts:
                    yield x, y, src, dst

    def has_pip(self, x: int, y: int, src: str, dst: str) -> bool:
        return dst in self.pips.get((x, y), {}).get(src, ())

    @functools.cached_property
    def _wsms(self) -> dict:
        return {}

    @functools.cached_property
    def cache(self) -> dict:
        """Scratch space for derived indexes (routing graph)."""
        return {}

    def wsm(self, x: int, y: int) -> Wsm:
        key = (x, y)
        if key not in self._wsms:
            tile = self.tile(x, y)
            adj = self.pips.get(key, {})
            up: dict[str, set] = {}
            nodes = set(adj)
            for src, dsts in adj.items():
                nodes.update(dsts)
                for d in dsts:
                    up.setdefault(d, set()).add(src)
            self._wsms[key] = Wsm(tile, frozenset(nodes), adj,
                                  {k: frozenset(v) for k, v in up.items()})
        return self._wsms[key]

    def wires(self) -> Iterator[tuple[tuple[int, int, str], tuple[int, int, str]]]:
        """Directed inter-tile wire edges whose endpoints all exist."""
        for (x, y) in sorted(self.pips):
            for name in sorted(self.wsm(x, y).nodes):
                n = parse_node(name)
                if not is_wire_origin(n):
                    continue
                members = wire_offsets(n)
                if members[0][:2] != (0, 0):
                    continue  # long wires are emitted from their origin tap
                pts = [(x + dx, y + dy, m) for dx, dy, m in members]
                if not all(self.in_bounds(px, py) and m in self.wsm(px, py).nodes
                           for px, py, m in pts):
                    continue
                if n.kind in (Kind.VLONG, Kind.VLONG12, Kind.HLONG):
                    for a in pts:
                        for b in pts:
                            if a != b:
                                yield a, b
                else:
                    yield pts[0], pts[1]


def _normalized(pips):
    return {t: {s: frozenset(d) for s, d in adj.items() if d} for t, adj in pips.items() if adj}


def build_fabric(width: int, height: int, seed: Optional[int] = None) -> Fabric:
    if not (isinstance(width, int) and isinstance(height, int)) or width < 1 or height < 1:
        raise InvalidDimensionError(f"fabric dimensions must be >= 1, got {width}x{height}")
    seed = DEFAULT_SEED if seed is None else int(seed)
    template = _frozen_template(seed)
    pips = {(x, y): template for x in range(width) for y in range(height)}
    return Fabric(width, height, seed, pips)


def downhill_nodes(f: Fabric, tile: TileCoord, node: str) -> frozenset[str]:
    w = f.wsm(tile.x, tile.y)
    if node not in w.nodes:
        raise UnknownNodeError(f"{node} not present in {tile.name}")
    return w.downhill.get(node, frozenset())


def uphill_nodes(f: Fabric, tile: TileCoord, node: str) -> frozenset[str]:
    w = f.wsm(tile.x, tile.y)
    if node not in w.nodes:
        raise UnknownNodeError(f"{node} not present in {tile.name}")
    return w.uphill.get(node, frozenset())


def census(f: Fabric, x: int, y: int) -> Counter:
    return f.wsm(x, y).census()


def dumps_fabric(f: Fabric) -> str:
    lines = sorted(
        format_pip(PipRef(TileCoord.at(x, y), parse_node(s), parse_node(d)))
        for x, y, s, d in f.iter_pips()
    )
    head = ["# wsmroute fabric description",
            f"fabric width={f.width} height={f.height}", f"seed={f.seed}"]
    return "\n".join(head + lines) + "\n"


def save_fabric(f: Fabric, path) -> None:
    Path(path).write_text(dumps_fabric(f), encoding="utf-8")


def loads_fabric(text: str) -> Fabric:
    width = height = None
    seed = DEFAULT_SEED
    raw: dict[tuple[int, int], dict[str, set]] = {}
    tiles: dict[str, TileCoord] = {}
    for lineno, line in enumerate(io.StringIO(text), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("fabric "):
            try:
                fields = dict(tok.split("=", 1) for tok in line.split()[1:])
                width, height = int(fields["width"]), int(fields["height"])
            except (ValueError, KeyError):
                raise ParseError(f"bad fabric header {line!r}", line=lineno) from None
            continue
        if line.startswith("seed="):
            try:
                seed = int(line[5:])
            except ValueError:
                raise ParseError(f"bad seed {line!r}", line=lineno) from None
            continue
        parts = line.split()
        tile = tiles.get(parts[1]) if len(parts) == 5 and parts[3] == "->" else None
        try:
            if tile is None or parts[0] != "pip":
                p = parse_pip(line)
                tile, src, dst = p.tile, p.src.raw, p.dst.raw
                tiles[parts[1]] = tile
            else:
                src, dst = parts[2], parts[4]
                parse_node(src), parse_node(dst)  # validates; names are canonical
        except ParseError as e:
            raise ParseError(str(e), line=lineno, token=e.token) from None
        if tile.tile_class != tile_class_for(tile.x):
            raise ConsistencyError(f"line {lineno}: {tile.name} has the wrong tile class "
                                   f"for column {tile.x}")
        dsts = raw.setdefault((tile.x, tile.y), {}).setdefault(src, set())
        if dst in dsts:
            raise ConsistencyError(f"line {lineno}: duplicate PIP {line!r}")
        dsts.add(dst)
    if width is None:
        if not raw:
            raise ParseError("no fabric header and no PIPs", line=1)
        width = max(x for x, _ in raw) + 1
        height = max(y for _, y in raw) + 1
    if width < 1 or height < 1:
        raise InvalidDimensionError(f"fabric dimensions must be >= 1, got {width}x{height}")
    for (x, y) in raw:
        if not (0 <= x < width and 0 <= y < height):
            raise ConsistencyError(f"PIP tile ({x},{y}) outside {width}x{height} fabric")
    pips = {t: {s: frozenset(d) for s, d in adj.items()} for t, adj in raw.items()}
    return Fabric(width, height, seed, pips)


def load_fabric(path) -> Fabric:
    return loads_fabric(Path(path).read_text(encoding="utf-8"))


def check_consistency(f: Fabric) -> None:
    """Raise ConsistencyError if downhill/uphill disagree or a PIP leaves the grid."""
    for (x, y) in f.pips:
        if not f.in_bounds(x, y):
            raise ConsistencyError(f"PIP tile ({x},{y}) outside fabric")
        w = f.wsm(x, y)
        for src, dsts in w.downhill.items():
            for d in dsts:
                if src not in w.uphill.get(d, ()):
                    raise ConsistencyError(f"{src}->{d} missing from uphill of {d}")
        for dst, srcs in w.uphill.items():
            for s in srcs:
                if dst not in w.downhill.get(s, ()):
                    raise ConsistencyError(f"{s}->{dst} missing from downhill of {s}")


def iter_node_names(f: Fabric) -> Iterable[str]:
    seen = set()
    for (x, y) in f.pips:
        seen |= f.wsm(x, y).nodes
    return sorted(seen)
