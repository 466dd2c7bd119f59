"""Acceptance gate: one test per primary criterion, each printing PASS/FAIL.

Run alone with ``pytest tests/test_acceptance.py -v -s`` or ``python3 tests/test_acceptance.py``.
"""
import random
import subprocess
import sys
import time
from importlib import resources

import networkx as nx
import pytest

from wsmroute.cli import run_cli
from wsmroute.errors import KindUnusableError
from wsmroute.fabric import build_fabric, census, load_fabric
from wsmroute.grammar import PipRef, TileCoord, format_node, format_pip, parse_node, parse_pip
from wsmroute.kinds import RO_KINDS, Kind
from wsmroute.router import (RouteQuery, build_ro, net_cost, optimize_route, place_endpoints,
                             ro_fabric_size, route)
from wsmroute.timing import (DelayModel, calibrate, default_model, estimate, geometries_from_table,
                             load_calibration)

# Published per-switch-matrix census, typed by hand.
CENSUS_PUBLISHED = {
    "DOUBLE": 70, "SINGLE": 68, "BOUNCEACROSS": 17, "VLONG": 3, "HLONG": 3, "PINFEED": 42,
    "OUTBOUND": 24, "BOUNCEIN": 9, "PINBOUNCE": 16, "GLOBAL": 12, "HQUAD": 17, "BENTQUAD": 34,
    "VQUAD": 18, "VLONG12": 2, "HVCCGNDOUT": 2,
}
# Published extraction listing for the example net (SW6BE0 / SS6BG3 read as BEG names).
LEVEL1 = set("""
WW4BEG0 NW2BEG0 WW2BEG0 NR1BEG0 WR1BEG1 NN6BEG0 WN1BEG_N3 NN1BEG3 SW6BEG0 NE6BEG0
SW2BEG0 NE2BEG0 SS6BEG0 IMUX_L8 SS2BEG0 IMUX_L40 SR1BEG1 IMUX_L32 SL1BEG0 IMUX_L24
SE6BEG0 IMUX_L16 SE2BEG0 IMUX_L0 NL1BEG_N3 ER1BEG1 BYP_ALT0 EL1BEG_N3 FAN_ALT0 EE4BEG0
NW6BEG0 EE2BEG0""".split())
LEVEL2 = set("""
WW4BEG0 LV_L0 WR1BEG1 WW2BEG0 NL1BEG_N3 WL1BEG2 NW6BEG0 SW6BEG3 NW2BEG0 SW2BEG3
NN6BEG0 SS6BEG3 NN2BEG0 SS2BEG3 NE6BEG0 SR1BEG1 LV_L18 ER1BEG_S0""".split())
FIG_TOKENS = ("CLBLM_M_A LOGIC_OUTS2 SW1BEG1 SW1BEG1 NN1BEG1 NN1BEG1 EE1BEG1 EE1BEG1 IMUX7 "
              "IMUX7 SW1BEG1 SW1BEG1 NW1BEG1 SW1BEG1 LOGIC_OUTS2 CLBLM_M_D6").split()
# Frequencies as published, kHz.
PUBLISHED_KHZ = [48912, 48909, 22541, 22541, 6399, 6398, 16119, 16121, 23551, 23548,
                 29852, 29851, 29790, 29789]


@pytest.fixture
def verdict(capsys):
    def emit(name, ok, detail, elapsed, limit):
        in_time = limit is None or elapsed < limit
        status = "PASS" if ok and in_time else "FAIL"
        budget = "" if limit is None else f" / {limit:g}s"
        with capsys.disabled():
            print(f"\n[{status}] {name}: {detail} ({elapsed:.2f}s{budget})")
        assert ok, detail
        assert in_time, f"{name} took {elapsed:.2f}s, limit {limit}s"
    return emit


def test_census(tmp_path, verdict):
    t0 = time.perf_counter()
    path = tmp_path / "fabric.txt"
    assert run_cli(["build", "--width", "6", "--height", "6", "-o", str(path)]) == 0
    f = load_fabric(path)
    bad = []
    for t in f.tiles():
        got = {k.value: n for k, n in census(f, t.x, t.y).items()}
        if got != CENSUS_PUBLISHED or sum(got.values()) != 337:
            bad.append(t.name)
    interior = sum(f.is_interior(t.x, t.y) for t in f.tiles())
    dt = time.perf_counter() - t0
    verdict("census", not bad and interior == 16,
            f"{36 - len(bad)}/36 tiles ({interior} interior) carry all 15 counts, 337 total",
            dt, 1.0)


def test_extraction(capsys, verdict):
    t0 = time.perf_counter()
    code = run_cli(["extract-pips", "--format", "csv"])
    out = capsys.readouterr().out
    dt = time.perf_counter() - t0
    levels: dict = {}
    for line in out.splitlines()[1:]:
        lvl, pin, ep = line.split(",")
        levels.setdefault((int(lvl), pin), set()).add(ep)
    got1, got2 = levels.get((1, "LOGIC_OUTS2")), levels.get((2, "NN1BEG3"))
    ok = code == 0 and got1 == LEVEL1 and got2 == LEVEL2
    verdict("extraction", ok,
            f"level 1 {len(got1 or ())}/32 exact, level 2 {len(got2 or ())}/{len(LEVEL2)} exact",
            dt, 1.0)


def test_calibration_self_consistency(verdict):
    t0 = time.perf_counter()
    rows = load_calibration()
    model = calibrate(rows, 0.0)
    errs = []
    for g, pub in zip(geometries_from_table(rows), PUBLISHED_KHZ):
        f = estimate(g, model).frequency
        errs.append((g.label, g.count, pub, f, abs(f - pub) / pub))
    dt = time.perf_counter() - t0
    worst = max(errs, key=lambda e: e[4])
    n_ok = sum(e[4] <= 5e-4 for e in errs)
    detail = (f"{n_ok}/14 rows within 0.05%; worst {worst[0]} N={worst[1]}: "
              f"{worst[3]:.0f} vs {worst[2]} kHz ({100 * worst[4]:.3f}%)")
    verdict("calibration self-consistency", n_ok == 14, detail, dt, 1.0)


def _oracle(f, model):
    g = nx.DiGraph()
    for x, y, s, d in f.iter_pips():
        g.add_edge((x, y, s), (x, y, d), w=0.0)
    for a, b in f.wires():
        k = parse_node(a[2]).kind
        g.add_edge(tuple(a), tuple(b), w=model.delay(k))
    return g


def _query(f, s, d, **kw):
    a, b = place_endpoints(f, TileCoord.at(*s), TileCoord.at(*d))
    return RouteQuery((a.tile, a.out_pin), (b.tile, b.in_pin), **kw)


def test_optimize_route(verdict):
    t0 = time.perf_counter()
    model = default_model()
    worse, count = 0, 0
    for size in (3, 4, 5, 6):
        rng = random.Random(1000 + size)
        f = build_fabric(size, size)
        for _ in range(250):
            s = (rng.randrange(size), rng.randrange(size))
            d = (rng.randrange(size), rng.randrange(size))
            skew = DelayModel({k: rng.uniform(1.0, 3000.0) for k in model.hop_delay})
            base = route(f, _query(f, s, d, objective=rng.choice(["min_delay", "min_hops"])), skew)
            bd, bh = net_cost(base, model)
            od, oh = net_cost(optimize_route(f, base, "lexicographic", model), model)
            worse += od > bd + 1e-9 or oh > bh
            count += 1
    f = build_fabric(4, 4)
    g = _oracle(f, model)
    tiles = [(x, y) for x in range(4) for y in range(4)]
    mismatch = 0
    for s in tiles:
        best = nx.single_source_dijkstra_path_length(g, (s[0], s[1], "CLBLM_M_A"), weight="w")
        for d in tiles:
            q = _query(f, s, d)
            opt = optimize_route(f, route(f, q, model), "lexicographic", model)
            if abs(net_cost(opt, model)[0] - best[(d[0], d[1], q.dest[1])]) > 1e-6:
                mismatch += 1
    dt = time.perf_counter() - t0
    verdict("optimize_route", worse == 0 and mismatch == 0 and count >= 1000,
            f"{count} random baselines, {worse} worsened; 4x4 all pairs: "
            f"{len(tiles) ** 2 - mismatch}/{len(tiles) ** 2} match exhaustive minimum", dt, 60.0)


def test_grammar_roundtrip(verdict):
    t0 = time.perf_counter()
    f = build_fabric(6, 6)
    names, total, bad = set(), 0, 0
    for x, y, s, d in f.iter_pips():
        names.update((s, d))
        line = f"pip {TileCoord.at(x, y).name} {s} -> {d}"
        p = parse_pip(line)
        bad += format_pip(p) != line or parse_pip(format_pip(p)) != p
        total += 1
    names.update(FIG_TOKENS, LEVEL1, LEVEL2, {"LOGIC_OUTS2", "NN1BEG3"})
    for n in names:
        p = parse_node(n)
        bad += format_node(p) != n or parse_node(format_node(p)) != p
        total += 1
    ex = PipRef(TileCoord(5, 15, "INT_R"), parse_node("NW1BEG0"), parse_node("SE2BEG1"))
    bad += format_pip(ex) != "pip INT_R_X5Y15 NW1BEG0 -> SE2BEG1"
    dt = time.perf_counter() - t0
    verdict("grammar round-trip", bad == 0, f"{total - bad}/{total} strings identical", dt, 5.0)


def test_ro_invariants(verdict):
    t0 = time.perf_counter()
    problems = []
    for kind in RO_KINDS:
        w, h, anchor = ro_fabric_size(kind)
        f = build_fabric(w + 1, h)
        wires = set(f.wires())
        ro = build_ro(f, kind, anchor)
        a, b = ro.logic_cells
        l1, l2 = ro.legs
        closed = (l1.nodes[0], l1.nodes[-1], l2.nodes[0], l2.nodes[-1]) == \
            (a.out_node, b.in_node, b.out_node, a.in_node)
        pure = all(parse_node(p.name).kind is kind and (tuple(p), tuple(q)) in wires
                   for leg in ro.legs for p, q in zip(leg.nodes, leg.nodes[1:])
                   if (p.x, p.y) != (q.x, q.y))
        if not (closed and len(ro.logic_cells) == 2 and pure and ro.inversions() % 2 == 1):
            problems.append(kind.value)
    try:
        build_ro(build_fabric(3, 3), Kind.PINFEED, TileCoord.at(0, 0))
        problems.append("PINFEED accepted")
    except KindUnusableError:
        pass
    dt = time.perf_counter() - t0
    verdict("ring oscillator invariants", not problems,
            f"{len(RO_KINDS) - len([p for p in problems if p != 'PINFEED accepted'])}/7 kinds "
            f"valid; PINFEED {'accepted' if 'PINFEED accepted' in problems else 'rejected'}",
            dt, 5.0)


def test_determinism(tmp_path, verdict):
    t0 = time.perf_counter()
    net = str(resources.files("wsmroute.data").joinpath("neta_published.route"))
    jobs = {
        "build": ["build", "--width", "4", "--height", "4", "--seed", "11"],
        "ro": ["ro", "--kind", "VQUAD", "--seed", "11"],
        "emit": ["emit", "--net", net, "--name", "NetA"],
    }
    same = []
    for name, argv in jobs.items():
        outs = []
        for i in range(2):
            o = tmp_path / f"{name}{i}"
            subprocess.run([sys.executable, "-m", "wsmroute", *argv, "-o", str(o)], check=True)
            outs.append(o.read_bytes())
        if outs[0] == outs[1] and outs[0]:
            same.append(name)
    dt = time.perf_counter() - t0
    verdict("determinism", len(same) == 3, f"byte-identical: {', '.join(same) or 'none'}",
            dt, None)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v", "-s"]))
