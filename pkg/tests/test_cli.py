import subprocess
import sys

import pytest

from wsmroute.cli import run_cli
from wsmroute.fabric import load_fabric


def run(capsys, *argv):
    code = run_cli(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_usage_errors(capsys):
    code, _, err = run(capsys)
    assert code == 2 and "usage" in err
    code, _, err = run(capsys, "build", "--width", "x", "--height", "2")
    assert code == 2 and "error[usage]" in err
    code, _, _ = run(capsys, "nonsense")
    assert code == 2


def test_build_and_seed_env(capsys, tmp_path, monkeypatch):
    p = tmp_path / "f.txt"
    assert run(capsys, "build", "--width", "2", "--height", "3", "-o", str(p))[0] == 0
    f = load_fabric(p)
    assert (f.width, f.height, f.seed) == (2, 3, 0)
    monkeypatch.setenv("WSM_FABRIC_SEED", "9")
    assert run(capsys, "build", "--width", "2", "--height", "2", "-o", str(p))[0] == 0
    assert load_fabric(p).seed == 9
    code, _, err = run(capsys, "build", "--width", "0", "--height", "2")
    assert code == 1 and err.startswith("error[invalid-dimension]")


def test_route_and_emit(capsys, tmp_path):
    code, out, _ = run(capsys, "route", "--from", "0,0", "--to", "3,2", "--name", "n1")
    assert code == 0 and out.startswith("net n1\nstart INT_R_X0Y0\nCLBLM_M_A ")
    r = tmp_path / "n1.route"
    r.write_text(out)
    f = tmp_path / "f.txt"
    run(capsys, "build", "--width", "8", "--height", "8", "-o", str(f))
    code, out, _ = run(capsys, "emit", "--net", str(r), "--fabric", str(f))
    assert code == 0 and out.startswith("set_property FIXED_ROUTE { CLBLM_M_A ")
    assert out.endswith("[get_nets n1]\n")
    code, _, err = run(capsys, "route", "--from", "0,0", "--to", "0,1", "--kinds", "VQUAD")
    assert code == 1 and "error[unroutable]" in err
    code, _, err = run(capsys, "route", "--from", "0,0", "--to", "20,1")
    assert code == 1 and "error[placement-error]" in err


def test_extract_csv(capsys):
    code, out, _ = run(capsys, "extract-pips", "--format", "csv")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "level,pin,pip_endpoint" and len(lines) == 51


def test_calibrate_and_report(capsys):
    code, out, _ = run(capsys, "calibrate")
    assert code == 0 and out.startswith("kind,hop_delay_ps,source\n")
    code, out, err = run(capsys, "calibrate", "--cell-delay", "9000")
    assert code == 1 and "error[infeasible-cell-delay]" in err
    code, out, _ = run(capsys, "report", "--format", "csv")
    assert code == 0 and len(out.splitlines()) == 15


def test_ro(capsys):
    code, out, _ = run(capsys, "ro", "--kind", "2L")
    assert code == 0 and out.splitlines()[1].startswith("2L,")
    code, _, err = run(capsys, "ro", "--kind", "PINFEED")
    assert code == 1 and "error[kind-unusable]" in err


def test_emit_errors(capsys, tmp_path):
    p = tmp_path / "r.route"
    p.write_text("NN1BEG0\n")
    code, _, err = run(capsys, "emit", "--net", str(p))
    assert code == 1 and "error[config-error]" in err
    code, _, err = run(capsys, "emit", "--net", str(p), "--name", "bad name")
    assert code == 1 and "error[config-error]" in err
    code, _, err = run(capsys, "emit", "--net", str(tmp_path / "missing"))
    assert code == 1 and "error[io]" in err


@pytest.mark.parametrize("argv", [
    ["build", "--width", "3", "--height", "3", "--seed", "4"],
    ["ro", "--kind", "BENTQUAD", "--seed", "4"],
    ["emit", "--net", "NETFILE", "--name", "NetA"],
])
def test_byte_identical_outputs(tmp_path, argv):
    from importlib import resources
    net = str(resources.files("wsmroute.data").joinpath("neta_published.route"))
    outs = []
    for i in range(2):
        o = tmp_path / f"out{i}"
        args = [a.replace("NETFILE", net) for a in argv] + ["-o", str(o)]
        subprocess.run([sys.executable, "-m", "wsmroute", *args], check=True)
        outs.append(o.read_bytes())
    assert outs[0] == outs[1] and outs[0]
