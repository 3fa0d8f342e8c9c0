import json
import math

import pytest

from haptickit.cli import run_cli
from haptickit.config import ENV_GEOMETRY


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    monkeypatch.delenv(ENV_GEOMETRY, raising=False)
    monkeypatch.delenv("HAPTICKIT_WORKERS", raising=False)


def values(line: str, key: str):
    head, _, tail = line.partition(" = ")
    assert head == key
    return [float(v) for v in tail.split()]


def write_geom(path, L):
    doc = {"leg_length": L, "stroke": [0.05, 5.0], "parallelogram_half_cone_deg": 60,
           "wrist_pitch_yaw_limit_deg": 45, "variant": "3T2R1R"}
    path.write_text(json.dumps(doc), encoding="utf-8")
    return str(path)


def test_ik_isotropic_point(capsys):
    assert run_cli(["ik", "0", "0", "0"]) == 0
    assert capsys.readouterr().out.strip() == "rho = 1 1 1"


def test_ik_outside_cylinder(capsys):
    assert run_cli(["ik", "0", "1.1", "0"]) == 1
    err = capsys.readouterr().err
    assert "OutsideCylinder" in err


def test_fk_inverts_ik(capsys):
    assert run_cli(["fk", "1", "1", "1"]) == 0
    p = values(capsys.readouterr().out.strip(), "p")
    assert max(abs(v) for v in p) < 1e-12


def test_wrist_commands(capsys):
    assert run_cli(["wrist-fk", "0", "0", "0"]) == 0
    assert values(capsys.readouterr().out.strip(), "q") == [1.0, 0.0, 0.0, 0.0]
    assert run_cli(["wrist-ik", "1", "0", "0", "0"]) == 0
    assert values(capsys.readouterr().out.strip(), "theta") == pytest.approx([0.0, 0.0, 0.0], abs=1e-12)


def test_wrist_ik_round_trip(capsys):
    assert run_cli(["wrist-fk", "10", "-20", "30"]) == 0
    q = capsys.readouterr().out.split(" = ")[1].split()
    assert run_cli(["wrist-ik", *q]) == 0
    theta = values(capsys.readouterr().out.strip(), "theta")
    assert theta == pytest.approx([10.0, -20.0, 30.0], abs=1e-6)


def test_jacobian_at_isotropic_point(capsys):
    assert run_cli(["jacobian", "0", "0", "0"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[:3] == ["1 0 0", "0 1 0", "0 0 1"]
    assert values(lines[3], "sigma") == pytest.approx([1.0, 1.0, 1.0], abs=1e-12)
    assert values(lines[4], "kappa") == pytest.approx([1.0], abs=1e-12)


def test_transmission_is_homokinetic(capsys):
    assert run_cli(["transmission", "0.1", "0.2", "-0.1", "--leg", "2", "--samples", "4"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("beta = ")
    assert lines[1] == "phi_motor phi_after_u1 phi_after_u2"
    for line in lines[2:]:
        motor, _, out = (float(v) for v in line.split())
        assert out == pytest.approx(motor, abs=1e-6)
    assert len(lines) == 6


def test_cube_unconstrained(capsys):
    assert run_cli(["cube", "--tol", "1e-4", "--unconstrained"]) == 0
    lines = capsys.readouterr().out.splitlines()
    edge = values(lines[1], "edge")[0]
    assert abs(edge - math.sqrt(2.0)) <= 1e-4


def test_map_writes_file_deterministically(tmp_path, capsys):
    args = ["map", "--bounds", "-1", "1", "-1", "1", "-1", "1", "--res", "5"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run_cli(args + ["--out", str(a)]) == 0
    assert run_cli(args + ["--out", str(b)]) == 0
    assert f"wrote {a}" in capsys.readouterr().out
    text = a.read_text(encoding="utf-8")
    assert text == b.read_text(encoding="utf-8")
    lines = text.splitlines()
    assert lines[0] == "x,y,z,feasible,sigma_min,sigma_max,kappa,reason"
    assert len(lines) == 1 + 5 ** 3


def test_map_xyz_to_stdout(capsys):
    assert run_cli(["map", "--bounds", "-0.1", "0.1", "-0.1", "0.1", "-0.1", "0.1",
                    "--res", "2", "--format", "xyz"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert len(out) == 8


def test_optimize_writes_pdf(tmp_path, capsys):
    pdf = tmp_path / "sizing.pdf"
    assert run_cli(["optimize", "--edge", "0.5", "--psi", "1.5", "--pdf", str(pdf)]) == 0
    out = capsys.readouterr().out
    assert out.startswith("# Haptic Device Sizing Report")
    assert f"wrote {pdf}" in out
    assert pdf.read_bytes().startswith(b"%PDF")


def test_optimize_psi_one(capsys):
    assert run_cli(["optimize", "--edge", "1", "--psi", "1"]) == 1
    assert "Unachievable" in capsys.readouterr().err


def test_sweep_json(tmp_path):
    out = tmp_path / "sweep.json"
    assert run_cli(["sweep", "--lengths", "1", "2", "--edge", "0.5", "--psi", "2",
                    "--format", "json", "--out", str(out)]) == 0
    rows = json.loads(out.read_text(encoding="utf-8"))
    assert [r["L"] for r in rows] == [1.0, 2.0]
    assert rows[0]["achieved_edge"] <= rows[1]["achieved_edge"]


@pytest.mark.parametrize("argv", [
    [],
    ["ik", "0", "0"],
    ["ik", "a", "0", "0"],
    ["wrist-ik", "0", "0", "0", "0"],
    ["transmission", "0", "0", "0", "--samples", "0"],
    ["map", "--bounds", "0", "1", "--res", "3"],
])
def test_usage_errors(argv, capsys):
    assert run_cli(argv) == 2


@pytest.mark.parametrize("argv", [
    ["ik", "0"],
    ["fk", "1", "1"],
    ["wrist-fk", "0", "0"],
    ["jacobian"],
    ["transmission", "0", "0"],
])
def test_missing_positionals_exit_2(argv, capsys):
    assert run_cli(argv) == 2
    assert "required" in capsys.readouterr().err


def test_non_utf8_geometry_is_parse_error(tmp_path, capsys):
    path = tmp_path / "g.json"
    path.write_bytes(b"\xff\xfe")
    assert run_cli(["ik", "0", "0", "0", "--geom", str(path)]) == 1
    assert "ParseError" in capsys.readouterr().err


def test_unwritable_output_exits_1(tmp_path, capsys):
    out = tmp_path / "missing-dir" / "grid.csv"
    assert run_cli(["map", "--bounds", "0", "0.1", "0", "0.1", "0", "0.1", "--res", "2", "--out", str(out)]) == 1
    assert "I/O error" in capsys.readouterr().err


def test_missing_geometry_file_is_parse_error(capsys):
    assert run_cli(["ik", "0", "0", "0", "--geom", "/nonexistent/geometry.json"]) == 1
    assert "ParseError" in capsys.readouterr().err


def test_bad_resolution(capsys):
    assert run_cli(["map", "--bounds", "0", "1", "0", "1", "0", "1", "--res", "1"]) == 1
    assert "BadResolution" in capsys.readouterr().err


def test_help_exits_zero(capsys):
    assert run_cli(["--help"]) == 0
    out = capsys.readouterr().out
    assert "haptickit" in out
    assert "OutsideCylinder" in out


def test_geom_flag_beats_environment(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv(ENV_GEOMETRY, write_geom(tmp_path / "env.json", 3.0))
    flag = write_geom(tmp_path / "flag.json", 2.0)

    assert run_cli(["ik", "0", "0", "0"]) == 0
    assert capsys.readouterr().out.strip() == "rho = 3 3 3"
    assert run_cli(["ik", "0", "0", "0", "--geom", flag]) == 0
    assert capsys.readouterr().out.strip() == "rho = 2 2 2"
    assert run_cli(["ik", "0", "0", "0", "--geom", flag, "--leg-length", "1.5"]) == 0
    assert capsys.readouterr().out.strip() == "rho = 1.5 1.5 1.5"
