import pytest

from wsmroute.errors import ConsistencyError, InvalidDimensionError, ParseError, UnknownNodeError
from wsmroute.fabric import (LOGIC_OUTS2_DOWNHILL, build_fabric, census, check_consistency,
                             downhill_nodes, dumps_fabric, load_fabric, loads_fabric, save_fabric,
                             uphill_nodes)
from wsmroute.grammar import TileCoord, end_tile, parse_node
from wsmroute.kinds import Kind

# Per-switch-matrix counts as published, typed in by hand.
PUBLISHED = {
    "DOUBLE": 70, "SINGLE": 68, "BOUNCEACROSS": 17, "VLONG": 3, "HLONG": 3, "PINFEED": 42,
    "OUTBOUND": 24, "BOUNCEIN": 9, "PINBOUNCE": 16, "GLOBAL": 12, "HQUAD": 17, "BENTQUAD": 34,
    "VQUAD": 18, "VLONG12": 2, "HVCCGNDOUT": 2,
}


@pytest.fixture(scope="module")
def fab():
    return build_fabric(6, 6)


def test_census_every_tile(fab):
    assert sum(PUBLISHED.values()) == 337
    for t in fab.tiles():
        got = {k.value: n for k, n in census(fab, t.x, t.y).items()}
        assert got == PUBLISHED, t.name


def test_dimensions():
    for w, h in [(0, 3), (3, 0), (-1, 2)]:
        with pytest.raises(InvalidDimensionError):
            build_fabric(w, h)
    f = build_fabric(1, 1)
    assert f.pip_count() > 0 and list(f.wires()) == []


def test_downhill_uphill_are_inverse(fab):
    t = TileCoord.at(2, 3)
    assert downhill_nodes(fab, t, "LOGIC_OUTS2") == LOGIC_OUTS2_DOWNHILL
    assert len(LOGIC_OUTS2_DOWNHILL) == 32
    for src in ("LOGIC_OUTS2", "NN1END3", "EE2END0"):
        for dst in downhill_nodes(fab, t, src):
            assert src in uphill_nodes(fab, t, dst)
    with pytest.raises(UnknownNodeError):
        downhill_nodes(fab, t, "NOPE0")


def test_wires_follow_names(fab):
    seen = 0
    for (x0, y0, a), (x1, y1, b) in fab.wires():
        assert fab.in_bounds(x0, y0) and fab.in_bounds(x1, y1)
        pa = parse_node(a)
        if pa.cls == "directional":
            assert pa.terminal == "BEG"
            assert end_tile(TileCoord.at(x0, y0), pa) == TileCoord.at(x1, y1)
            assert b == a.replace("BEG", "END")
            seen += 1
    assert seen > 0


def test_no_wire_leaves_grid():
    f = build_fabric(2, 2)
    for a, b in f.wires():
        assert f.in_bounds(a[0], a[1]) and f.in_bounds(b[0], b[1])
    assert not any(parse_node(a[2]).kind is Kind.VLONG for a, _ in f.wires())


def test_determinism_and_seed():
    assert build_fabric(3, 3, 7) == build_fabric(3, 3, 7)
    assert dumps_fabric(build_fabric(3, 3, 7)) == dumps_fabric(build_fabric(3, 3, 7))
    assert build_fabric(3, 3, 7) != build_fabric(3, 3, 8)


def test_save_load_roundtrip(tmp_path):
    f = build_fabric(3, 2, 5)
    p = tmp_path / "f.txt"
    save_fabric(f, p)
    g = load_fabric(p)
    assert g == f and (g.width, g.height, g.seed) == (3, 2, 5)
    check_consistency(g)


def test_load_errors():
    text = dumps_fabric(build_fabric(2, 2))
    lines = text.splitlines()
    i = next(k for k, l in enumerate(lines) if l.startswith("pip"))
    bad = lines[:]
    bad[i] = "pip INT_R_X0Y0 NN1BEG0 NN1BEG1"
    with pytest.raises(ParseError) as e:
        loads_fabric("\n".join(bad))
    assert e.value.line == i + 1
    dup = lines + [lines[i]]
    with pytest.raises(ConsistencyError):
        loads_fabric("\n".join(dup))
    wrong = lines[:]
    swap = {"INT_R": "INT_L", "INT_L": "INT_R"}
    wrong[i] = "pip " + swap[wrong[i][4:9]] + wrong[i][9:]
    with pytest.raises(ConsistencyError):
        loads_fabric("\n".join(wrong))
    out = lines + ["pip INT_R_X4Y0 NN1END0 -> NN1BEG0"]
    with pytest.raises(ConsistencyError):
        loads_fabric("\n".join(out))


def test_bundled_census_file_matches():
    import csv
    from importlib import resources
    text = resources.files("wsmroute.data").joinpath("census.csv").read_text("utf-8")
    rows = csv.DictReader(l for l in text.splitlines() if not l.startswith("#"))
    assert {r["kind"]: int(r["count_per_wsm"]) for r in rows} == PUBLISHED
