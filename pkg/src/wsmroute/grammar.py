"""Node, tile and PIP name grammar.

Node names follow the vendor convention: a two-letter direction, the wire
length, ``BEG``/``END`` for the wire tail, then an index (optionally preceded
by a ``_N``/``_S`` variant tag), e.g. ``SE2BEG1`` or ``WN1BEG_N3``.  Local
wires use a class tag followed by an index (``IMUX_L40``, ``LOGIC_OUTS2``).
"""
from __future__ import annotations

import functools
import re
from dataclasses import dataclass
from typing import Optional

from .errors import NotInterTileError, ParseError
from .kinds import Kind

COMPASS = {"N": (0, 1), "S": (0, -1), "E": (1, 0), "W": (-1, 0)}

_DIRECTIONAL = re.compile(
    r"^(?P<prefix>[NSEW][NSEWLRB])(?P<length>\d+)(?P<term>BEG|END)"
    r"(?:_(?P<variant>[NS])(?P<vidx>\d+)|(?P<idx>\d+))$"
)
_LONG = re.compile(r"^(?P<cls>LV_L|LV|LH)(?P<idx>\d+)$")
# Longest tags first so IMUX_L wins over IMUX.
_LOCAL_CLASSES = {
    "LOGIC_OUTS": ("LOGIC_OUTS", Kind.OUTBOUND),
    "IMUX_L": ("IMUX_L", Kind.PINFEED),
    "IMUX": ("IMUX", Kind.PINFEED),
    "BYP_ALT": ("BYP_ALT", Kind.PINFEED),
    "FAN_ALT": ("FAN_ALT", Kind.PINFEED),
    "BYP_BOUNCE": ("PINBOUNCE", Kind.PINBOUNCE),
    "FAN_BOUNCE": ("PINBOUNCE", Kind.PINBOUNCE),
    "BOUNCE_IN": ("BOUNCEIN", Kind.BOUNCEIN),
    "GCLK": ("GCLK", Kind.GLOBAL),
    "GND_WIRE": ("GND_VCC", Kind.HVCCGNDOUT),
    "VCC_WIRE": ("GND_VCC", Kind.HVCCGNDOUT),
}
_LOCAL = re.compile(
    r"^(?P<tag>" + "|".join(sorted(_LOCAL_CLASSES, key=len, reverse=True)) + r")"
    r"(?:_(?P<variant>[NS]))?(?P<idx>\d+)$"
)
_CLB_PIN = re.compile(r"^(?P<tag>CLBL[LM]_[LM]_[A-D]Q?)(?P<idx>[1-6])?$")
_TILE = re.compile(r"^(?P<cls>INT_[LR])_X(?P<x>\d+)Y(?P<y>\d+)$")

# Long wires: (kind, axis, tap names by offset along the axis).
LONG_WIRES = {
    "LV_L": (Kind.VLONG, (0, 1), {0: 0, 9: 10, 18: 20}),
    "LV": (Kind.VLONG12, (0, 1), {0: 0, 12: 12}),
    "LH": (Kind.HLONG, (1, 0), {0: 0, 9: 10, 18: 20}),
}

_LENGTH_KIND = {1: Kind.SINGLE, 2: Kind.DOUBLE, 4: Kind.HQUAD}


@dataclass(frozen=True, order=True)
class TileCoord:
    x: int
    y: int
    tile_class: str = "INT_R"

    @classmethod
    def at(cls, x: int, y: int) -> "TileCoord":
        """Tile with the default column-alternating class (INT_R at x=0)."""
        return cls(x, y, tile_class_for(x))

    @property
    def name(self) -> str:
        return f"{self.tile_class}_X{self.x}Y{self.y}"

    def __str__(self):
        return self.name


def tile_class_for(x: int) -> str:
    return "INT_R" if x % 2 == 0 else "INT_L"


def parse_tile(s: str) -> TileCoord:
    m = _TILE.match(s)
    if not m:
        raise ParseError(f"malformed tile token {s!r}", token=s)
    return TileCoord(int(m["x"]), int(m["y"]), m["cls"])


@dataclass(frozen=True)
class NodeName:
    cls: str
    prefix: str
    length: int = 0
    terminal: Optional[str] = None
    variant: Optional[str] = None
    index: Optional[int] = None
    kind: Optional[Kind] = None

    @property
    def raw(self) -> str:
        return format_node(self)

    def __str__(self):
        return format_node(self)

    @property
    def is_wire(self) -> bool:
        """True for nodes that sit on an inter-tile wire."""
        return wire_offsets(self) is not None


def _directional_kind(prefix: str, length: int, s: str) -> Kind:
    first, second = prefix
    if second == "B":
        if first not in "NS" or length != 1:
            raise ParseError(f"invalid bounce wire {s!r}", token=s)
        return Kind.BOUNCEACROSS
    if second in "LR":
        if length != 1:
            raise ParseError(f"{prefix} wires have length 1, got {s!r}", token=s)
        return Kind.SINGLE
    if COMPASS[first][0] == -COMPASS[second][0] and COMPASS[first][1] == -COMPASS[second][1]:
        raise ParseError(f"opposite compass letters in {s!r}", token=s)
    straight = first == second
    if length in (1, 2):
        return _LENGTH_KIND[length]
    if length == 4 and straight and first in "EW":
        return Kind.HQUAD
    if length == 6:
        if not straight:
            return Kind.BENTQUAD
        if first in "NS":
            return Kind.VQUAD
    raise ParseError(f"no interconnect family for {s!r}", token=s)


@functools.lru_cache(maxsize=65536)
def parse_node(s: str) -> NodeName:
    if not s:
        raise ParseError("empty node name", token=s)
    m = _DIRECTIONAL.match(s)
    if m:
        length = int(m["length"])
        if str(length) != m["length"]:
            raise ParseError(f"leading zero in length of {s!r}", token=s)
        kind = _directional_kind(m["prefix"], length, s)
        idx = m["vidx"] if m["variant"] else m["idx"]
        return NodeName("directional", m["prefix"], length, m["term"],
                        m["variant"], _index(idx, s), kind)
    m = _LONG.match(s)
    if m:
        cls = m["cls"]
        kind, _, taps = LONG_WIRES[cls]
        idx = _index(m["idx"], s)
        if idx not in taps:
            raise ParseError(f"no tap {idx} on {cls} wires in {s!r}", token=s)
        return NodeName(cls, cls, index=idx, kind=kind)
    m = _LOCAL.match(s)
    if m:
        cls, kind = _LOCAL_CLASSES[m["tag"]]
        if m["variant"] and m["tag"] != "LOGIC_OUTS":
            raise ParseError(f"unexpected variant in {s!r}", token=s)
        length = 1 if m["variant"] else 0
        return NodeName(cls, m["tag"], length, None, m["variant"], _index(m["idx"], s), kind)
    m = _CLB_PIN.match(s)
    if m:
        idx = int(m["idx"]) if m["idx"] else None
        return NodeName("CLB_PIN", m["tag"], index=idx)
    raise ParseError(f"unrecognized node name {s!r}", token=s)


def _index(text: str, s: str) -> int:
    if len(text) > 1 and text[0] == "0":
        raise ParseError(f"leading zero in index of {s!r}", token=s)
    return int(text)


def format_node(n: NodeName) -> str:
    if n.cls == "directional":
        tail = f"_{n.variant}{n.index}" if n.variant else str(n.index)
        return f"{n.prefix}{n.length}{n.terminal}{tail}"
    if n.cls == "CLB_PIN":
        return n.prefix + ("" if n.index is None else str(n.index))
    if n.variant:
        return f"{n.prefix}_{n.variant}{n.index}"
    return f"{n.prefix}{n.index}"


def displacement(prefix: str, length: int) -> tuple[int, int]:
    """Tile offset travelled by a directional wire from its BEG to its END."""
    first, second = prefix
    fx, fy = COMPASS[first]
    if second in "LRB" or second == first:
        steps = length
        return fx * steps, fy * steps
    sx, sy = COMPASS[second]
    a, b = (length + 1) // 2, length // 2
    return fx * a + sx * b, fy * a + sy * b


def wire_offsets(n: NodeName):
    """Members of the wire ``n`` sits on, as ``(dx, dy, name)`` relative to ``n``.

    Returns ``None`` for tile-local nodes.  The first member is the wire's
    origin.
    """
    if n.cls == "directional":
        dx, dy = displacement(n.prefix, n.length)
        tail = f"_{n.variant}{n.index}" if n.variant else str(n.index)
        beg = f"{n.prefix}{n.length}BEG{tail}"
        end = f"{n.prefix}{n.length}END{tail}"
        if n.terminal == "BEG":
            return [(0, 0, beg), (dx, dy, end)]
        return [(-dx, -dy, beg), (0, 0, end)]
    if n.cls in LONG_WIRES:
        _, (ax, ay), taps = LONG_WIRES[n.cls]
        here = taps[n.index]
        return [(ax * (off - here), ay * (off - here), f"{n.cls}{tap}")
                for tap, off in sorted(taps.items(), key=lambda kv: kv[1])]
    if n.cls == "LOGIC_OUTS" and n.variant:
        src, dst = f"LOGIC_OUTS_N{n.index}", f"LOGIC_OUTS_S{n.index}"
        if n.variant == "N":
            return [(0, 0, src), (0, 1, dst)]
        return [(0, -1, src), (0, 0, dst)]
    return None


def is_wire_origin(n: NodeName) -> bool:
    """True if a signal entering ``n`` through a PIP leaves the tile on its wire."""
    if n.cls == "directional":
        return n.terminal == "BEG"
    if n.cls in LONG_WIRES:
        return True
    return n.cls == "LOGIC_OUTS" and n.variant == "N"


def end_tile(start: TileCoord, n: NodeName | str) -> TileCoord:
    """Tile at the far end of the wire carrying ``n`` when seen from ``start``.

    For a tap of a long wire the far end is the next tap toward the last one
    (the last tap looks back to the origin).
    """
    if isinstance(n, str):
        n = parse_node(n)
    members = wire_offsets(n)
    if members is None:
        raise NotInterTileError(f"{format_node(n)} ({n.kind}) does not leave its tile")
    own = next(i for i, (dx, dy, _) in enumerate(members) if dx == 0 and dy == 0)
    far = members[own + 1] if own + 1 < len(members) else members[0]
    x, y = start.x + far[0], start.y + far[1]
    return TileCoord(x, y, tile_class_for(x) if x >= 0 else start.tile_class)


@dataclass(frozen=True)
class PipRef:
    tile: TileCoord
    src: NodeName
    dst: NodeName

    def __str__(self):
        return format_pip(self)


def format_pip(p: PipRef) -> str:
    return f"pip {p.tile.name} {format_node(p.src)} -> {format_node(p.dst)}"


def parse_pip(s: str) -> PipRef:
    parts = s.split()
    if not parts or parts[0] != "pip":
        raise ParseError("expected 'pip' keyword", position=0, token=s)
    if "->" not in parts:
        raise ParseError("missing '->' separator", position=len(s), token=s)
    if len(parts) != 5 or parts[3] != "->":
        pos = s.find("->")
        raise ParseError("expected 'pip <TILE> <SRC> -> <DST>'", position=pos, token=s)
    try:
        tile = parse_tile(parts[1])
    except ParseError:
        raise ParseError(f"malformed tile token {parts[1]!r}",
                         position=s.find(parts[1]), token=parts[1]) from None
    return PipRef(tile, parse_node(parts[2]), parse_node(parts[4]))
