import csv
import json
import xml.etree.ElementTree as ET

import pytest

from gravicaustic.cli import main, parse_formats, parse_k_range
from gravicaustic.errors import ConfigError

PARABOLA_L2 = ["--mirror", "parabola:fm=1", "--L", "2", "--H", "5", "--k0", "0.7"]


def run(tmp_path, *args):
    return main([*args, "--out", str(tmp_path)])


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_simulate_parabola_l2(tmp_path):
    assert run(tmp_path, "simulate", *PARABOLA_L2, "--bounces", "50", "--format", "csv,json,svg") == 0
    rows = read_csv(tmp_path / "trajectory.csv")
    assert rows[0] == ["bounce_index", "t_flight", "x", "y", "vx", "vy", "focus_x", "focus_y", "alpha"]
    assert len(rows) == 51 and rows[1][0] == "1"
    s = json.loads((tmp_path / "summary.json").read_text())
    assert s["termination"] == "max_bounces" and s["L_source"] == "given"
    assert s["H"] == pytest.approx(5.0)
    assert s["residuals"]["foci_on_curve"]["passed"]
    svg = ET.parse(tmp_path / "trajectory.svg").getroot()
    assert svg.get("viewBox") and len(svg.findall("{http://www.w3.org/2000/svg}path")) >= 3


def test_simulate_csv_is_byte_stable(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert run(d, "simulate", *PARABOLA_L2, "--bounces", "20") == 0
    assert (a / "trajectory.csv").read_bytes() == (b / "trajectory.csv").read_bytes()
    first = read_csv(a / "trajectory.csv")[1]
    # 17 significant digits round-trip exactly
    assert all(float(c) == float(format(float(c), ".17g")) for c in first)


def test_simulate_zero_bounces_header_only(tmp_path):
    assert run(tmp_path, "simulate", "--mirror", "0", "--x0", "0", "--y0", "1", "--vx", "1", "--vy", "0",
               "--bounces", "0") == 0
    assert (tmp_path / "trajectory.csv").read_text() == "bounce_index,t_flight,x,y,vx,vy,focus_x,focus_y,alpha\n"


def test_simulate_matched_L(tmp_path):
    assert run(tmp_path, "simulate", "--mirror", "0.25*x^2", "--x0", "0", "--y0", "3", "--vx", "1",
               "--vy", "0", "--bounces", "10") == 0
    s = json.loads((tmp_path / "summary.json").read_text())
    # focus (0, 2.5) lies on the foci circle about (0, 1) of radius 1.5;
    # L = 0.5 and L = -2.5 both describe it
    assert s["L_source"] == "matched" and abs(1.0 + s["L"]) == pytest.approx(1.5, abs=1e-9)


def test_wedge_reports_stuck(tmp_path):
    code = run(tmp_path, "simulate", "--mirror", "abs(x)", "--x0", "0", "--y0", "1", "--vx", "0", "--vy", "0",
               "--bounces", "20")
    assert code == 2
    s = json.loads((tmp_path / "summary.json").read_text())
    assert s["termination"] == "stuck"


def test_foci_command(tmp_path):
    assert run(tmp_path, "foci", "--mirror", "parabola:fm=1", "--L", "2", "--k-range", "-5:5:11",
               "--format", "csv,json,svg") == 0
    rows = read_csv(tmp_path / "foci.csv")
    assert rows[0] == ["k", "x", "y"] and len(rows) == 12
    for k, x, y in rows[1:]:
        assert float(x) ** 2 + (float(y) - 1) ** 2 == pytest.approx(9.0)
    assert (tmp_path / "foci.svg").exists()


def test_envelope_command_blank_cells(tmp_path):
    assert run(tmp_path, "envelope", "--mirror", "parabola:fm=1", "--L", "2", "--H", "5",
               "--k-range", "-1:1:3") == 0
    rows = read_csv(tmp_path / "envelope.csv")
    assert rows[0] == ["k", "x_plus", "y_plus", "x_minus", "y_minus"]
    mid = rows[2]
    assert float(mid[0]) == 0.0 and mid[1] == mid[2] == ""
    assert float(mid[4]) == pytest.approx(1.5)


def test_verify_command(tmp_path):
    good = tmp_path / "good.json"
    good.write_text(json.dumps({"mirror": "parabola:fm=1", "L": 2, "H": 5, "k0": 0.7, "bounces": 30,
                                "checks": ["directrix", "foci_circle", "foci_slope", "foci_on_curve"]}))
    assert main(["verify", str(good), "--out", str(tmp_path / "g")]) == 0
    rep = json.loads((tmp_path / "g" / "report.json").read_text())
    assert rep["passed"]
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"mirror": "0", "x0": 0, "y0": 1, "vx": 1, "vy": 0, "bounces": 5,
                               "checks": ["directrix"], "tolerances": {"directrix": -1}}))
    assert main(["verify", str(bad), "--out", str(tmp_path / "b")]) == 3


def test_sweep_command(tmp_path):
    code = main(["sweep", "--mirror", "hyperbola", "--H", "5", "--k-range", "-3:3:7", "--param", "L",
                 "--values", "0.5,4", "--command", "foci", "--out", str(tmp_path)])
    assert code == 0
    idx = json.loads((tmp_path / "index.json").read_text())
    assert [r["value"] for r in idx["runs"]] == ["0.5", "4"]
    for r in idx["runs"]:
        assert (tmp_path / r["dir"] / "foci.csv").exists()


@pytest.mark.parametrize(
    "args",
    [
        ["simulate", "--mirror", "x +", "--x0", "0", "--y0", "1", "--vx", "0", "--vy", "0"],
        ["simulate", "--mirror", "0", "--x0", "zero", "--y0", "1", "--vx", "0", "--vy", "0"],
        ["simulate", "--mirror", "0", "--x0", "0", "--y0", "-1", "--vx", "0", "--vy", "0"],
        ["foci", "--mirror", "0", "--L", "1", "--k-range", "1:2:1"],
        ["foci", "--mirror", "0", "--L", "1", "--format", "pdf"],
        ["verify"],
    ],
)
def test_config_errors_exit_1(tmp_path, args, capsys):
    assert run(tmp_path, *args) == 1
    assert "error:" in capsys.readouterr().err


def test_config_file_diagnostics(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text('{\n  "mirror": "0",\n  "bounces": "many"\n}\n')
    assert run(tmp_path, "simulate", "--config", str(cfg)) == 1
    err = capsys.readouterr().err
    assert "bounces" in err and ":3" in err
    cfg.write_text('{\n  "mirror": "0",\n  oops\n}\n')
    assert run(tmp_path, "simulate", "--config", str(cfg)) == 1
    assert "c.json:3:" in capsys.readouterr().err


def test_flags_override_config(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"mirror": "0", "x0": 0, "y0": 1, "vx": 1, "vy": 0, "bounces": 7}))
    assert run(tmp_path, "simulate", "--config", str(cfg), "--bounces", "3") == 0
    assert len(read_csv(tmp_path / "trajectory.csv")) == 4


def test_parsers():
    assert parse_k_range("-5:5:11") == (-5.0, 5.0, 11)
    assert parse_k_range([0, 1, 2]) == (0.0, 1.0, 2)
    with pytest.raises(ConfigError):
        parse_k_range("1:2")
    assert parse_formats("svg, csv") == ("svg", "csv")
    with pytest.raises(ConfigError):
        parse_formats("")
