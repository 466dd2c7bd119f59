"""Single-net routing over the PIP graph, fixed routes, ring oscillators.

Search is uniform-cost over tile-located nodes.  PIP edges cost nothing but
count as a last tie-breaker; wire edges cost the kind's hop delay and one
interconnect.  Remaining ties go to the smaller node key ``(x, y, name)``.
"""
from __future__ import annotations

import heapq
import logging
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .errors import (FixedRouteViolation, KindUnusableError, PlacementError, UnknownNodeError,
                     UnroutableError)
from .fabric import INPUT_PINS, OUTPUT_PINS, Fabric
from .grammar import TileCoord, is_wire_origin, parse_node, wire_offsets
from .kinds import RO_KINDS, Kind, ro_label
from .nets import LogicCell, Net, Node
from .timing import DelayModel, default_model

log = logging.getLogger(__name__)

OBJECTIVES = ("min_delay", "min_hops", "lexicographic")


class RoutingGraph:
    """Integer-indexed adjacency of a fabric: PIP edges plus wire edges."""

    def __init__(self, f: Fabric):
        nodes = set()
        for (x, y), adj in f.pips.items():
            for src, dsts in adj.items():
                nodes.add(Node(x, y, src))
                nodes.update(Node(x, y, d) for d in dsts)
        self.keys: list[Node] = sorted(nodes)
        self.index = {n: i for i, n in enumerate(self.keys)}
        self.adj: list[list] = [[] for _ in self.keys]
        for (x, y), adj in f.pips.items():
            for src, dsts in adj.items():
                u = self.index[Node(x, y, src)]
                self.adj[u].extend((self.index[Node(x, y, d)], None) for d in dsts)
        for a, b in f.wires():
            kind = parse_node(a[2]).kind
            self.adj[self.index[Node(*a)]].append((self.index[Node(*b)], kind))
        for lst in self.adj:
            lst.sort(key=lambda e: e[0])

    def id(self, node: Node) -> int:
        try:
            return self.index[node]
        except KeyError:
            raise UnknownNodeError(f"{node} not present in fabric") from None


def routing_graph(f: Fabric) -> RoutingGraph:
    g = f.cache.get("graph")
    if g is None:
        g = f.cache["graph"] = RoutingGraph(f)
    return g


def _search(g: RoutingGraph, sources: Iterable[int], targets, model: DelayModel,
            objective: str = "min_delay", allowed=None, avoid=frozenset()) -> Optional[list]:
    hop_first = objective == "min_hops"
    delays = model.hop_delay
    best: dict[int, tuple] = {}
    prev: dict[int, int] = {}
    heap: list = []
    for s in sorted(set(sources)):
        best[s] = (0.0, 0, 0) if not hop_first else (0, 0.0, 0)
        prev[s] = -1
        heap.append((best[s], s))
    heapq.heapify(heap)
    adj = g.adj
    while heap:
        key, u = heapq.heappop(heap)
        if key > best[u]:
            continue
        if u in targets:
            path = [u]
            while prev[path[-1]] != -1:
                path.append(prev[path[-1]])
            return path[::-1]
        a, b, c = key
        for v, kind in adj[u]:
            if v in avoid:
                continue
            if kind is None:
                nk = (a, b, c + 1)
            else:
                if allowed is not None and kind not in allowed:
                    continue
                d = delays.get(kind)
                if d is None:
                    continue
                nk = (a + 1, b + d, c) if hop_first else (a + d, b + 1, c)
            old = best.get(v)
            if old is None or nk < old:
                best[v] = nk
                prev[v] = u
                heapq.heappush(heap, (nk, v))
    return None


@dataclass(frozen=True)
class RouteQuery:
    source: tuple  # (TileCoord, pin)
    dest: tuple  # (TileCoord, pin)
    allowed_kinds: Optional[frozenset] = None
    objective: str = "lexicographic"
    name: str = "net"

    def __post_init__(self):
        if self.allowed_kinds is not None:
            object.__setattr__(self, "allowed_kinds", frozenset(self.allowed_kinds))
            if not self.allowed_kinds:
                raise ValueError("allowed_kinds must be non-empty when given")
        if self.objective not in OBJECTIVES:
            raise ValueError(f"objective must be one of {OBJECTIVES}")


def _node(end) -> Node:
    tile, pin = end
    return Node(tile.x, tile.y, pin)


def _net(g: RoutingGraph, name: str, path: Sequence[int]) -> Net:
    nodes = tuple(g.keys[i] for i in path)
    return Net(name, nodes, _pin_or_none(nodes[0]), _pin_or_none(nodes[-1]))


def _pin_or_none(n: Node) -> Optional[str]:
    return n.name if parse_node(n.name).cls == "CLB_PIN" else None


def route(f: Fabric, q: RouteQuery, model: Optional[DelayModel] = None, avoid=()) -> Net:
    g = routing_graph(f)
    src, dst = g.id(_node(q.source)), g.id(_node(q.dest))
    if src == dst:
        return _net(g, q.name, [src])
    model = model or default_model()
    path = _search(g, [src], {dst}, model, q.objective, q.allowed_kinds,
                   frozenset(g.id(n) for n in avoid))
    if path is None:
        allowed = "any" if q.allowed_kinds is None else \
            ",".join(sorted(k.value for k in q.allowed_kinds))
        raise UnroutableError(f"no path {g.keys[src]} -> {g.keys[dst]} "
                              f"with allowed_kinds={allowed}")
    return _net(g, q.name, path)


def net_cost(net: Net, model: Optional[DelayModel] = None) -> tuple[float, int]:
    """(total wire delay in ps, interconnect count)."""
    model = model or default_model()
    hops = net.wire_hops()
    return sum(model.delay(k) for _, k in hops), len(hops)


def _steps(f: Fabric, cur: Node, tok: str) -> list:
    """Ways to reach ``tok`` from ``cur``: along cur's wire first, then a local PIP."""
    out = []
    parsed = parse_node(cur.name)
    if is_wire_origin(parsed):
        for dx, dy, m in wire_offsets(parsed):
            land = Node(cur.x + dx, cur.y + dy, m)
            if (dx, dy) == (0, 0) or not f.in_bounds(land.x, land.y):
                continue
            if f.has_pip(land.x, land.y, m, tok):
                out.append([land, Node(land.x, land.y, tok)])
    if f.has_pip(cur.x, cur.y, cur.name, tok):
        out.append([Node(cur.x, cur.y, tok)])
    return out


def route_fixed(f: Fabric, name: str, tokens: Sequence[str], start: TileCoord) -> Net:
    """Rebuild a net from a FIXED_ROUTE node list starting at ``start``.

    A token naming a wire origin is followed along its wire; the landing node
    is implied.  A token repeating its predecessor is read as the other end of
    the same wire unless it is a valid hop of its own.  Where a long-wire tap
    could either ride its wire or switch locally, the wire is tried first and
    the local PIP on backtrack.
    """
    tokens = list(tokens)
    if not tokens:
        raise FixedRouteViolation("empty node list")
    if not f.in_bounds(start.x, start.y):
        raise FixedRouteViolation(f"start tile {start.name} outside fabric")
    first = Node(start.x, start.y, tokens[0])
    if first.name not in f.wsm(first.x, first.y).nodes:
        raise FixedRouteViolation(f"{first} does not exist")
    # Depth-first over (token index, node list, aliased flag).
    stack = [(1, [first], False)]
    deepest = (0, first, tokens[0])
    while stack:
        i, nodes, aliased = stack.pop()
        cur = nodes[-1]
        if i == len(tokens):
            return Net(name, tuple(nodes), _pin_or_none(nodes[0]), _pin_or_none(nodes[-1]))
        tok = tokens[i]
        steps = _steps(f, cur, tok)
        if not steps and tok == cur.name and not aliased:
            stack.append((i + 1, nodes, True))
            continue
        if not steps and i >= deepest[0]:
            deepest = (i, cur, tok)
        for step in reversed(steps):
            stack.append((i + 1, nodes + step, False))
    _, cur, tok = deepest
    raise FixedRouteViolation(f"{cur.name} -> {tok}: not connected from {cur.tile.name}")


def optimize_route(f: Fabric, baseline: Net, objective: str = "lexicographic",
                   model: Optional[DelayModel] = None) -> Net:
    """Re-route ``baseline``'s endpoints; never worse in delay or interconnect count."""
    model = model or default_model()
    if len(baseline.nodes) < 2:
        return baseline
    g = routing_graph(f)
    src, dst = g.id(baseline.nodes[0]), g.id(baseline.nodes[-1])
    base_delay, base_hops = net_cost(baseline, model)
    order = ["min_hops", "min_delay"] if objective == "min_hops" else ["min_delay", "min_hops"]
    for obj in order:
        path = _search(g, [src], {dst}, model, obj)
        if path is None:
            continue
        cand = _net(g, baseline.name, path)
        delay, hops = net_cost(cand, model)
        if delay <= base_delay + 1e-9 and hops <= base_hops:
            if (delay, hops) == (base_delay, base_hops) and len(cand.nodes) >= len(baseline.nodes):
                return baseline
            return cand
    return baseline


@dataclass(frozen=True)
class RingOscillator:
    kind: Kind
    legs: tuple  # (Net, Net): cell A -> cell B, cell B -> cell A
    logic_cells: tuple  # (LogicCell, LogicCell)
    anchor: TileCoord = field(default=None)

    @property
    def label(self) -> str:
        return ro_label(self.kind)

    @property
    def loop(self) -> tuple:
        return self.legs[0].nodes + self.legs[1].nodes

    @property
    def interconnect_count(self) -> int:
        return sum(leg.hops for leg in self.legs)

    def wire_hops(self) -> list:
        return self.legs[0].wire_hops() + self.legs[1].wire_hops()

    def pips(self) -> list[tuple[TileCoord, str, str]]:
        out = []
        for leg in self.legs:
            for a, b in zip(leg.nodes, leg.nodes[1:]):
                if (a.x, a.y) == (b.x, b.y):
                    out.append((a.tile, a.name, b.name))
        return out

    def is_closed(self) -> bool:
        a, b = self.logic_cells
        l1, l2 = self.legs
        return (l1.nodes[0] == a.out_node and l1.nodes[-1] == b.in_node
                and l2.nodes[0] == b.out_node and l2.nodes[-1] == a.in_node)

    def inversions(self) -> int:
        return sum(c.inverting for c in self.logic_cells)


# Unit displacement of cell B from cell A: one wire of the kind.
_RO_UNIT = {
    Kind.SINGLE: (1, 0), Kind.DOUBLE: (2, 0), Kind.HQUAD: (4, 0), Kind.VQUAD: (0, 6),
    Kind.BENTQUAD: (3, 3), Kind.BOUNCEACROSS: (0, 1), Kind.VLONG: (0, 10),
}


def _ro_plan(kind: Kind, target_hops: Optional[int]) -> tuple[tuple[int, int], int]:
    """Offset unit of cell B and its multiplier for a hop target."""
    if kind not in _RO_UNIT:
        raise KindUnusableError(f"{kind} does not span a switch matrix; cannot build an oscillator")
    m = 1 if not target_hops else max(1, target_hops // 2)
    if kind is Kind.VLONG:
        m = 1  # each long hop is 10 tiles; stretching would need a huge die
    if kind is Kind.BENTQUAD and m > 1:
        # Alternating NE/SE hops return to the anchor row only after an even count.
        return (3, 0), m + m % 2
    return _RO_UNIT[kind], m


def ro_fabric_size(kind: Kind, target_hops: Optional[int] = None, count: int = 1):
    """Smallest ``(width, height, anchor)`` that fits ``count`` oscillators."""
    (dx, dy), m = _ro_plan(kind, target_hops)
    ay = 0
    if kind is Kind.VLONG:
        ay = 10
    elif kind is Kind.BENTQUAD and dy == 0:
        ay = 3
    width = dx * m + count
    height = max(ay + dy * m + 1, 2)
    if kind is Kind.VLONG:
        height = max(height, ay + 21)
    elif ay == 3:
        height = 7
    return width, height, TileCoord.at(0, ay)


def build_ro(f: Fabric, kind: Kind, anchor: TileCoord, target_hops: Optional[int] = None,
             model: Optional[DelayModel] = None) -> RingOscillator:
    """Two-cell ring oscillator whose inter-tile hops all use ``kind``.

    Cell A (inverting) sits at ``anchor``; cell B (buffer) one wire of the
    kind away, or about ``target_hops / 2`` wires away when a target is given.
    """
    if kind not in RO_KINDS:
        raise KindUnusableError(f"{kind} does not span a switch matrix; cannot build an oscillator")
    if not f.in_bounds(anchor.x, anchor.y):
        raise PlacementError(f"anchor {anchor.name} outside fabric")
    model = model or default_model()
    g = routing_graph(f)
    (ux, uy), m = _ro_plan(kind, target_hops)
    offsets = []
    for sx, sy in ((1, 1), (-1, 1), (1, -1), (-1, -1)):
        o = (sx * ux * m, sy * uy * m)
        if o not in offsets:
            offsets.append(o)
    allowed = frozenset({kind})
    tried = []
    for dx, dy in offsets:
        bx, by = anchor.x + dx, anchor.y + dy
        if not f.in_bounds(bx, by):
            continue
        tried.append((bx, by))
        ro = _try_loop(f, g, kind, anchor, TileCoord.at(bx, by), allowed, model)
        if ro is not None:
            return ro
    raise UnroutableError(f"no closed {kind} loop at {anchor.name} "
                          f"(second cell tried at {tried or 'no in-bounds tile'})")


def _pins(g: RoutingGraph, tile: TileCoord, pins: Sequence[str]) -> list[int]:
    return [g.index[n] for p in pins if (n := Node(tile.x, tile.y, p)) in g.index]


def _try_loop(f, g, kind, a_tile, b_tile, allowed, model) -> Optional[RingOscillator]:
    leg1 = _search(g, _pins(g, a_tile, OUTPUT_PINS), set(_pins(g, b_tile, INPUT_PINS)),
                   model, "min_delay", allowed)
    if leg1 is None:
        return None
    used = frozenset(leg1)
    leg2 = _search(g, _pins(g, b_tile, OUTPUT_PINS), set(_pins(g, a_tile, INPUT_PINS)),
                   model, "min_delay", allowed, used)
    if leg2 is None:
        return None
    n1, n2 = _net(g, "ro_ab", leg1), _net(g, "ro_ba", leg2)
    cell_a = LogicCell(a_tile, n1.nodes[0].name, n2.nodes[-1].name, inverting=True)
    cell_b = LogicCell(b_tile, n2.nodes[0].name, n1.nodes[-1].name, inverting=False)
    return RingOscillator(kind, (n1, n2), (cell_a, cell_b), a_tile)


def build_ros(f: Fabric, kind: Kind, anchor: TileCoord, count: int = 2,
              target_hops: Sequence[Optional[int]] = (), model=None) -> list[RingOscillator]:
    """``count`` oscillators, each anchored one column right of the previous."""
    out = []
    for i in range(count):
        t = target_hops[i] if i < len(target_hops) else None
        out.append(build_ro(f, kind, TileCoord.at(anchor.x + i, anchor.y), t, model))
    return out


def place_endpoints(f: Fabric, src_tile: TileCoord, dst_tile: TileCoord,
                    used: Optional[set] = None) -> tuple[LogicCell, LogicCell]:
    """Bind a source and a destination cell to the first free CLB pins."""
    used = set() if used is None else used
    cells = []
    for t in (src_tile, dst_tile):
        if not f.in_bounds(t.x, t.y):
            raise PlacementError(f"tile ({t.x},{t.y}) outside {f.width}x{f.height} fabric")
        tile = TileCoord.at(t.x, t.y)
        out_pin = next((p for p in OUTPUT_PINS if (t.x, t.y, p) not in used), None)
        in_pin = next((p for p in INPUT_PINS if (t.x, t.y, p) not in used), None)
        if out_pin is None or in_pin is None:
            raise PlacementError(f"no free CLB pins left at {tile.name}")
        used.update({(t.x, t.y, out_pin), (t.x, t.y, in_pin)})
        cells.append(LogicCell(tile, out_pin, in_pin))
    return cells[0], cells[1]
