"""Per-kind hop delays, calibration from oscillator measurements, loop timing.

A ring oscillator with one effective inversion toggles every loop traversal,
so its frequency is ``1 / (2 * T_loop)``.  Delays are in picoseconds and
frequencies in kHz; ``f_kHz = 5e8 / T_ps``.
"""
from __future__ import annotations

import csv
import functools
import io
from dataclasses import dataclass, field
from importlib import resources
from types import MappingProxyType
from typing import Iterable, Mapping, Optional, Sequence

from .errors import CalibrationError, InfeasibleCellDelayError, ModelIncompleteError
from .kinds import RO_KINDS, Kind, kind_from_label, ro_label

PS_KHZ = 5e8  # 1 / (2 * 1 ps) expressed in kHz


def loop_frequency_khz(total_ps: float) -> float:
    return PS_KHZ / total_ps


@dataclass(frozen=True)
class DelayModel:
    hop_delay: Mapping[Kind, float]
    cell_delay: float = 0.0
    extrapolated: frozenset = field(default=frozenset(), compare=False)

    def __post_init__(self):
        object.__setattr__(self, "hop_delay", MappingProxyType(dict(self.hop_delay)))
        if self.cell_delay < 0:
            raise CalibrationError(f"cell delay must be >= 0, got {self.cell_delay}")
        for k, d in self.hop_delay.items():
            if d < 0:
                raise CalibrationError(f"negative hop delay for {k}: {d}")

    def delay(self, kind: Kind) -> float:
        try:
            return self.hop_delay[kind]
        except KeyError:
            raise ModelIncompleteError(f"no hop delay for {kind}") from None

    def scaled(self, c: float) -> "DelayModel":
        return DelayModel({k: v * c for k, v in self.hop_delay.items()},
                          self.cell_delay * c, self.extrapolated)


@dataclass(frozen=True)
class CalibrationRow:
    ro_type: str
    frequency_khz: float
    net_delay_ps: Optional[float]
    interconnect_count: int

    @property
    def kind(self) -> Kind:
        return kind_from_label(self.ro_type)


def read_calibration_csv(text: str) -> list[CalibrationRow]:
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    rows = []
    for rec in csv.DictReader(lines):
        try:
            nd = rec.get("net_delay_ps")
            rows.append(CalibrationRow(
                rec["ro_type"].strip(),
                float(rec["frequency_khz"]),
                float(nd) if nd not in (None, "") else None,
                int(rec["interconnect_count"]),
            ))
        except (KeyError, ValueError) as e:
            raise CalibrationError(f"bad calibration row {rec}: {e}") from None
    return rows


def load_calibration(path=None) -> list[CalibrationRow]:
    """Read a calibration CSV; the bundled published table when ``path`` is None."""
    if path is None:
        text = resources.files("wsmroute.data").joinpath("ro_measurements.csv").read_text("utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    return read_calibration_csv(text)


def calibrate(table: Iterable, cell_delay: float = 0.0) -> DelayModel:
    """Fit one hop delay per kind, averaged over that kind's rows.

    Rows are ``CalibrationRow`` or ``(kind, frequency_khz, interconnect_count)``.
    """
    per_kind: dict[Kind, list[float]] = {}
    for row in table:
        if isinstance(row, CalibrationRow):
            kind, f, n = row.kind, row.frequency_khz, row.interconnect_count
        else:
            kind, f, n = row
            kind = kind if isinstance(kind, Kind) else kind_from_label(kind)
        if f <= 0 or n <= 0:
            raise CalibrationError(f"{kind}: frequency and count must be positive (f={f}, N={n})")
        hop = (PS_KHZ / f - 2 * cell_delay) / n
        if hop < 0:
            raise InfeasibleCellDelayError(
                f"{kind}: cell delay {cell_delay} ps exceeds half the loop delay")
        per_kind.setdefault(kind, []).append(hop)
    if not per_kind:
        raise CalibrationError("empty calibration table")
    return DelayModel({k: sum(v) / len(v) for k, v in per_kind.items()}, cell_delay)


@functools.lru_cache(maxsize=16)
def default_model(cell_delay: float = 0.0) -> DelayModel:
    """Published-table calibration, extended to the families it does not cover."""
    m = calibrate(load_calibration(), cell_delay)
    hop = dict(m.hop_delay)
    extra = {
        Kind.VLONG12: hop[Kind.VLONG] * 12 / 20,
        Kind.HLONG: hop[Kind.VLONG],
        Kind.OUTBOUND: hop[Kind.SINGLE],
    }
    for k, v in extra.items():
        hop.setdefault(k, v)
    return DelayModel(hop, cell_delay, frozenset(extra))


@dataclass(frozen=True)
class TimingReport:
    total_loop_delay: float  # ps
    frequency: float  # kHz
    per_hop: tuple  # (node, kind, ps)
    interconnect_count: int

    @property
    def net_delay_ps(self) -> float:
        """Mean delay of one inter-tile hop."""
        if not self.per_hop:
            return 0.0
        return sum(p for _, _, p in self.per_hop) / len(self.per_hop)


@dataclass(frozen=True)
class LoopGeometry:
    """Model-level oscillator: ``count`` hops of one kind and two cells."""

    kind: Kind
    count: int
    reference: Optional[CalibrationRow] = None

    @property
    def interconnect_count(self) -> int:
        return self.count

    def wire_hops(self) -> list:
        return [(f"{self.kind.value}#{i}", self.kind) for i in range(self.count)]

    @property
    def label(self) -> str:
        return self.reference.ro_type if self.reference else ro_label(self.kind)


def geometries_from_table(rows: Sequence[CalibrationRow]) -> list[LoopGeometry]:
    return [LoopGeometry(r.kind, r.interconnect_count, r) for r in rows]


def estimate(ro, m: DelayModel) -> TimingReport:
    """Loop delay and frequency for anything exposing ``wire_hops()``."""
    per_hop = tuple((node, kind, m.delay(kind)) for node, kind in ro.wire_hops())
    total = sum(p for _, _, p in per_hop) + 2 * m.cell_delay
    if total <= 0:
        raise ModelIncompleteError("loop has zero delay; frequency undefined")
    return TimingReport(total, loop_frequency_khz(total), per_hop, len(per_hop))


def dumps_model(m: DelayModel) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["kind", "hop_delay_ps", "source"])
    for k in sorted(m.hop_delay, key=lambda k: k.value):
        w.writerow([k.value, repr(m.hop_delay[k]),
                    "extrapolated" if k in m.extrapolated else "calibrated"])
    w.writerow(["CELL", repr(m.cell_delay), "configured"])
    return out.getvalue()


__all__ = [
    "CalibrationRow", "DelayModel", "LoopGeometry", "TimingReport", "RO_KINDS",
    "calibrate", "default_model", "estimate", "geometries_from_table",
    "load_calibration", "loop_frequency_khz", "read_calibration_csv", "dumps_model",
]
