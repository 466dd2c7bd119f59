"""Nets as ordered, tile-located node sequences."""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import NamedTuple, Optional

from .grammar import TileCoord, parse_node

NET_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


class Node(NamedTuple):
    x: int
    y: int
    name: str

    @property
    def tile(self) -> TileCoord:
        return TileCoord.at(self.x, self.y)

    def __str__(self):
        return f"{self.tile.name}/{self.name}"


@dataclass(frozen=True)
class LogicCell:
    """A slice element bound to one output and one input CLB pin."""

    tile: TileCoord
    out_pin: str
    in_pin: str
    inverting: bool = False

    @property
    def out_node(self) -> Node:
        return Node(self.tile.x, self.tile.y, self.out_pin)

    @property
    def in_node(self) -> Node:
        return Node(self.tile.x, self.tile.y, self.in_pin)


@dataclass(frozen=True)
class Net:
    name: str
    nodes: tuple  # of Node
    source_pin: Optional[str] = None
    dest_pin: Optional[str] = None

    @property
    def hops(self) -> int:
        """Inter-tile wire traversals."""
        return sum(1 for a, b in zip(self.nodes, self.nodes[1:]) if (a.x, a.y) != (b.x, b.y))

    def wire_hops(self) -> list:
        """``(origin node name, kind)`` for every wire traversal, in order."""
        out = []
        for a, b in zip(self.nodes, self.nodes[1:]):
            if (a.x, a.y) != (b.x, b.y):
                out.append((str(a), parse_node(a.name).kind))
        return out

    def tokens(self) -> list[str]:
        """Node names as a FIXED_ROUTE list: wire landing nodes are implied."""
        out = []
        for i, n in enumerate(self.nodes):
            if i and (n.x, n.y) != (self.nodes[i - 1].x, self.nodes[i - 1].y):
                continue
            out.append(n.name)
        return out

    @property
    def source(self) -> Optional[Node]:
        return self.nodes[0] if self.nodes else None

    @property
    def dest(self) -> Optional[Node]:
        return self.nodes[-1] if self.nodes else None
