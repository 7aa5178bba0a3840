import json
import math

import pytest

from dualwave.cli import main
from dualwave.io import FIELD_COLUMNS, read_csv


def run(*argv):
    return main([str(a) for a in argv])


def test_construct_annular(tmp_path):
    code = run("construct", "--family", "monomial", "--n", -1, "--grid", "annular:0.5,2,64,128",
               "--out", tmp_path)
    assert code == 0
    meta = json.loads((tmp_path / "metadata.json").read_text())
    assert set(meta) == {"psi_u", "psi_v"}
    rows = read_csv(tmp_path / "psi_u.csv")
    assert len(rows) == 64 * 128
    assert list(rows[0]) == list(FIELD_COLUMNS)
    # 17 significant digits
    mantissa = rows[5]["x"].lstrip("-").split("e")[0].replace(".", "").lstrip("0")
    assert len(mantissa) <= 17
    assert (tmp_path / "psi_v.csv").read_bytes().count(b"\r") == 0


def test_construct_log_dispatch_and_multivalued(tmp_path):
    assert run("construct", "--n", -2, "--out", tmp_path) == 0
    meta = json.loads((tmp_path / "metadata.json").read_text())
    assert meta["psi_v"]["multivalued"] is True
    assert meta["psi_u"]["multivalued"] is False
    assert meta["psi_u"]["dispatch"] == "logarithmic"


def test_verify_canonical_passes(tmp_path, capsys):
    assert run("verify", "--n", 2, "--out", tmp_path) == 0
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert len(summary["identities"]) == 8 and all(summary["identities"].values())
    for name in summary["identities"]:
        doc = json.loads((tmp_path / f"{name}.json").read_text())
        assert doc["pass"] and set(doc["duals"]) == {"u", "v"}
    assert "FAIL" not in capsys.readouterr().out


def test_verify_negative_control_fails(tmp_path):
    assert run("verify", "--n", 2, "--negative-control", "alpha:5", "--out", tmp_path) == 1
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["identities"]["schrodinger"] is False
    # reports are still written
    assert (tmp_path / "schrodinger.json").exists()


def test_verify_tiny_grid(tmp_path, capsys):
    assert run("verify", "--n", 0, "--grid", "cartesian:1,2,1,2,4,4", "--out", tmp_path) == 2
    assert "StencilOutOfDomain" in capsys.readouterr().err


def test_config_errors_name_parameter(tmp_path, capsys):
    assert run("construct", "--alpha", -1, "--out", tmp_path) == 2
    assert "--alpha" in capsys.readouterr().err
    assert run("construct", "--grid", "hex:1", "--out", tmp_path) == 2
    assert "--grid" in capsys.readouterr().err
    assert run("verify", "--negative-control", "mass:5", "--out", tmp_path) == 2


def test_trace_eaton(tmp_path):
    assert run("trace", "--family", "eaton-exact", "--a", 1, "--impact", "0.5,1.2",
               "--out", tmp_path) == 0
    rows = read_csv(tmp_path / "deflection.csv")
    assert abs(float(rows[0]["deflection_rad"]) - math.pi) <= 1e-3
    assert rows[1]["termination"] == "OutOfDomain"
    ray = read_csv(tmp_path / "ray_000.csv")
    assert list(ray[0]) == ["s", "x", "y", "dx", "dy", "n_idx"]
    assert not (tmp_path / "ray_001.csv").exists()


def test_trace_constant_index(tmp_path):
    assert run("trace", "--n", 0, "--impact", "0.2,0.0", "--step", 0.01, "--out", tmp_path) == 0
    for row in read_csv(tmp_path / "deflection.csv"):
        assert abs(float(row["deflection_rad"])) <= 1e-9


def test_trace_all_rays_fail(tmp_path):
    assert run("trace", "--family", "eaton-exact", "--impact", "1.5", "--out", tmp_path) == 3


def test_verify_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert run("verify", "--n", -1, "--out", out) == 0
    names = sorted(p.name for p in a.iterdir() if p.name != "run.json")
    assert names == sorted(p.name for p in b.iterdir() if p.name != "run.json")
    for name in names:
        assert (a / name).read_bytes() == (b / name).read_bytes(), name


def test_config_file_precedence(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"family": "monomial", "n": 2, "alpha": 3.0, "which": "u"}))
    out = tmp_path / "o"
    assert run("construct", "--config", cfg, "--alpha", 0.5, "--out", out) == 0
    meta = json.loads((out / "metadata.json").read_text())
    assert set(meta) == {"psi_u"}
    spec = meta["psi_u"]["spec"]
    assert spec["n"] == 2 and spec["alpha"] == 0.5
    run_meta = json.loads((out / "run.json").read_text())
    assert "timestamp" in run_meta
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"colour": 1}))
    assert run("construct", "--config", bad, "--out", out) == 2


def test_report(tmp_path, capsys):
    assert run("report", "--out", tmp_path) == 2
    run("verify", "--n", 0, "--out", tmp_path)
    run("trace", "--family", "eaton-exact", "--impact", "0.5", "--step", 1e-3, "--out", tmp_path)
    capsys.readouterr()
    assert run("report", "--out", tmp_path) == 0
    text = (tmp_path / "report.txt").read_text()
    assert "overall: PASS" in text and "ExitedDomain" in text


def test_version(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
