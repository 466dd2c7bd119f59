"""The fifteen interconnect families and their per-switch-matrix census."""
from __future__ import annotations

import enum
from dataclasses import dataclass


class Kind(str, enum.Enum):
    SINGLE = "SINGLE"
    DOUBLE = "DOUBLE"
    HQUAD = "HQUAD"
    VQUAD = "VQUAD"
    BOUNCEACROSS = "BOUNCEACROSS"
    VLONG = "VLONG"
    VLONG12 = "VLONG12"
    HLONG = "HLONG"
    GLOBAL = "GLOBAL"
    BENTQUAD = "BENTQUAD"
    PINFEED = "PINFEED"
    OUTBOUND = "OUTBOUND"
    BOUNCEIN = "BOUNCEIN"
    PINBOUNCE = "PINBOUNCE"
    HVCCGNDOUT = "HVCCGNDOUT"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class InterconnectKind:
    kind: Kind
    span_clbs: int
    orientation: str  # horizontal | vertical | bent | local
    directionality: str  # unidirectional | bidirectional
    count_per_wsm: int

    @property
    def name(self) -> str:
        return self.kind.value


# Ordered as in the published census table.
KINDS: tuple[InterconnectKind, ...] = (
    InterconnectKind(Kind.DOUBLE, 2, "bent", "unidirectional", 70),
    InterconnectKind(Kind.SINGLE, 1, "bent", "unidirectional", 68),
    InterconnectKind(Kind.BOUNCEACROSS, 1, "vertical", "unidirectional", 17),
    InterconnectKind(Kind.VLONG, 20, "vertical", "bidirectional", 3),
    InterconnectKind(Kind.HLONG, 20, "horizontal", "bidirectional", 3),
    InterconnectKind(Kind.PINFEED, 0, "local", "unidirectional", 42),
    InterconnectKind(Kind.OUTBOUND, 1, "local", "unidirectional", 24),
    InterconnectKind(Kind.BOUNCEIN, 0, "local", "unidirectional", 9),
    InterconnectKind(Kind.PINBOUNCE, 0, "local", "unidirectional", 16),
    InterconnectKind(Kind.GLOBAL, 20, "vertical", "unidirectional", 12),
    InterconnectKind(Kind.HQUAD, 4, "horizontal", "unidirectional", 17),
    InterconnectKind(Kind.BENTQUAD, 6, "bent", "unidirectional", 34),
    InterconnectKind(Kind.VQUAD, 6, "vertical", "unidirectional", 18),
    InterconnectKind(Kind.VLONG12, 12, "vertical", "bidirectional", 2),
    InterconnectKind(Kind.HVCCGNDOUT, 0, "local", "unidirectional", 2),
)

KIND_INFO: dict[Kind, InterconnectKind] = {k.kind: k for k in KINDS}

CENSUS: dict[Kind, int] = {k.kind: k.count_per_wsm for k in KINDS}
CENSUS_TOTAL = sum(CENSUS.values())

# Families usable for a ring oscillator: they span at least one switch matrix.
RO_KINDS: tuple[Kind, ...] = (
    Kind.SINGLE, Kind.DOUBLE, Kind.HQUAD, Kind.VLONG,
    Kind.BENTQUAD, Kind.BOUNCEACROSS, Kind.VQUAD,
)

# Short labels used in oscillator reports, and their families.
RO_LABELS: dict[str, Kind] = {
    "1L": Kind.SINGLE,
    "2L": Kind.DOUBLE,
    "4L": Kind.HQUAD,
    "LONG": Kind.VLONG,
    "BENTQUAD": Kind.BENTQUAD,
    "BOUNCEACROSS": Kind.BOUNCEACROSS,
    "VQUAD": Kind.VQUAD,
}
LABEL_OF: dict[Kind, str] = {v: k for k, v in RO_LABELS.items()}


def kind_from_label(label: str) -> Kind:
    """Accept a report label (``1L``, ``LONG``) or a family name (``SINGLE``)."""
    key = label.strip().upper()
    if key in RO_LABELS:
        return RO_LABELS[key]
    try:
        return Kind(key)
    except ValueError:
        raise ValueError(f"unknown interconnect kind {label!r}") from None


def ro_label(kind: Kind) -> str:
    return LABEL_OF.get(kind, kind.value)
