import csv
import json

import numpy as np
import pytest

from nccavity import reference as ref
from nccavity.bench import RunConfig, _row, check_dof, compare, profile_table
from nccavity.cli import main, read_config_file
from nccavity.diagnostics import DiagnosticsReport, VortexRecord
from nccavity.io import read_pressure_csv, read_velocity_csv, write_pressure_csv, write_velocity_csv
from nccavity.mesh import build_mesh
from nccavity.spaces import PressureField, VelocityField


def test_check_dof_output(capsys, tmp_path):
    assert main(["--check-dof", "--n", "16", "--out", str(tmp_path)]) == 0
    assert "N=16: 450/254 PASS" in capsys.readouterr().out


def test_check_dof_reports_misprinted_count(capsys, tmp_path):
    # the published velocity count for N=128 is 32256, two less than 2 (N-1)^2
    assert main(["--check-dof", "--n", "128", "--out", str(tmp_path)]) == 1
    assert "N=128: 32258/16382 FAIL" in capsys.readouterr().out
    rows = check_dof(128)
    assert [r.status for r in rows] == ["FAIL", "PASS"]
    assert [r.status for r in check_dof(48)] == ["N/A", "N/A"]


def test_run_file_contract(tmp_path, capsys):
    out = tmp_path / "res"
    assert main(["--re", "100", "--n", "8", "--out", str(out), "--contours", "--indicators"]) == 0
    names = {p.name for p in out.iterdir()}
    for f in ("solution_Re100_N8.csv", "pressure_Re100_N8.csv", "diagnostics_Re100_N8.json",
              "summary.csv", "psi_Re100_N8.csv", "omega_Re100_N8.csv", "contour_levels.json"):
        assert f in names
    diag = json.loads((out / "diagnostics_Re100_N8.json").read_text())
    assert diag["solve"]["converged"]
    with open(out / "summary.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert all(r["quantity"] and r["table"] for r in rows)
    assert all(r["status"] in ("PASS", "N/A") for r in rows if r["gating"] == "True")
    levels = json.loads((out / "contour_levels.json").read_text())
    assert levels["omega"] == list(ref.OMEGA_CONTOUR_LEVELS)
    # rerunning reproduces the summary exactly
    first = (out / "summary.csv").read_text()
    assert main(["--re", "100", "--n", "8", "--out", str(out), "--contours", "--indicators"]) == 0
    assert (out / "summary.csv").read_text() == first


def test_json_format_and_profiles(tmp_path):
    assert main(["--re", "50", "--n", "4", "--out", str(tmp_path), "--format", "json", "--profiles"]) == 0
    rows = json.loads((tmp_path / "summary.json").read_text())
    assert any(r["quantity"].startswith("u at") for r in rows)
    prof = json.loads((tmp_path / "profiles_Re50_N4.json").read_text())
    assert len(prof) == 30 and prof[0]["botella"] is None


def test_solver_failure_gives_nonzero_exit(tmp_path, capsys):
    assert main(["--re", "1000", "--n", "8", "--max-iters", "1", "--out", str(tmp_path)]) == 1
    assert "solver failed" in capsys.readouterr().out
    assert (tmp_path / "summary.csv").exists()


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# cavity\nre = 100, 400\nn = 8\nmax-iters = 50\ncontinuation = off\n")
    values = read_config_file(cfg)
    assert values == {"re": [100.0, 400.0], "n": [8], "max_iters": 50, "continuation": False}
    out = tmp_path / "o"
    assert main(["--config", str(cfg), "--re", "20", "--out", str(out)]) == 0
    assert {p.name for p in out.glob("solution_*")} == {"solution_Re20_N8.csv"}
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = red\n")
    with pytest.raises(ValueError):
        read_config_file(bad)


def test_invalid_config(capsys):
    assert main(["--n", "7"]) == 2
    assert "even" in capsys.readouterr().err
    with pytest.raises(ValueError):
        RunConfig(re=[-1.0])


def _report(Re, psi=-0.10350, profiles=None):
    v = VortexRecord("primary", psi, -3.2, 0.6172, 0.7344)
    return DiagnosticsReport(Re, 64, 0.0, 0.0, -1.0, 0.0, 64.0**-3, 0.0, True,
                             vortices={"primary": v}, profiles=profiles or {})


def test_compare_rows():
    rows = {r.quantity: r for r in compare(_report(100.0))}
    r = rows["primary psi_min"]
    assert r.error == pytest.approx(3.0e-4, rel=0.01)
    assert r.status == "PASS" and r.table == ref.PRIMARY_VORTEX_TABLE
    assert rows["primary omega"].status == "PASS"
    same = _row(100.0, 64, "q", "t", 0.25, 0.25, 0.01)
    assert same.error == 0.0 and same.status == "PASS"
    assert _row(100.0, 64, "q", "t", 0.25, None, 0.01).status == "N/A"
    rows = compare(_report(123.0))
    assert rows[0].status == "N/A"


def test_profile_table_columns():
    prof = {"u_vertical_centerline": [(0.5, -0.0622)], "v_horizontal_centerline": [(0.5, 0.0257)]}
    table = profile_table(_report(1000.0, profiles=prof))
    v = [r for r in table if r["line"] == "v(x,0.5)"][0]
    assert v["nc256"] == 0.0256839 and v["botella"] == 0.0257995
    u = [r for r in table if r["line"] == "u(0.5,y)"][0]
    assert u["botella"] == -0.0620561 and u["bruneau"] == -0.06205
    # a printed "NA" cell stays empty
    prof = {"u_vertical_centerline": [(0.9766, 0.65)], "v_horizontal_centerline": []}
    assert profile_table(_report(1000.0, profiles=prof))[0]["bruneau"] is None
    rows = {r.quantity: r for r in compare(_report(1000.0, profiles=prof), profiles=True)}
    assert rows["u at 0.9766"].gating and rows["u at 0.9766"].status == "FAIL"


def test_reference_tables_are_immutable():
    with pytest.raises(TypeError):
        ref.DOF_COUNTS[16] = (0, 0)
    assert set(ref.u_profile_reference()) == set(ref.V_PROFILE_RE1000)


def test_csv_roundtrip(tmp_path):
    m = build_mesh(6)
    rng = np.random.default_rng(0)
    u = VelocityField.from_vector(m, rng.standard_normal(50))
    p = PressureField(m, rng.standard_normal(36))
    write_velocity_csv(u, tmp_path / "u.csv")
    write_pressure_csv(p, tmp_path / "p.csv")
    np.testing.assert_array_equal(read_velocity_csv(m, tmp_path / "u.csv").vector, u.vector)
    np.testing.assert_array_equal(read_pressure_csv(m, tmp_path / "p.csv").gamma, p.gamma)
