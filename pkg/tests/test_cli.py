import json

import numpy as np
import pytest

from angqudit.cli import main
from angqudit.interference import read_fringe_csv
from angqudit.scenario import PRESETS


def run(*args):
    return main([str(a) for a in args])


def test_simulate_fig6a(tmp_path, capsys):
    assert run("simulate", "--preset", "fig6a", "--out", tmp_path) == 0
    meta, data = read_fringe_csv((tmp_path / "fig6a.csv").read_text())
    assert data[np.argmax(data[:, 2]), 0] == -2
    assert meta["version"] and meta["N"] == 2 and meta["V"] == 0.875
    summary = json.loads((tmp_path / "fig6a_summary.json").read_text())
    row = summary["runs"][0]["rows"][0]
    assert row["peak_l_s"] == -2
    assert row["V_est"] == pytest.approx(0.875, abs=0.01)
    assert row["period"] == pytest.approx(8, abs=0.5)
    assert "V_est=0.8750" in capsys.readouterr().out


def test_simulate_fig7_writes_four_grids(tmp_path):
    assert run("simulate", "--preset", "fig7", "--out", tmp_path) == 0
    summary = json.loads((tmp_path / "fig7_summary.json").read_text())
    assert len(summary["runs"]) == 4
    for r in summary["runs"]:
        row = r["rows"][0]
        assert abs(row["frequency"] - row["expected_frequency"]) <= row["frequency_bin"]
        assert (tmp_path / r["file"]).exists()


def test_simulate_fig8_json(tmp_path):
    assert run("simulate", "--preset", "fig8", "--out", tmp_path, "--format", "json") == 0
    doc = json.loads((tmp_path / "fig8_beta_pi_4.json").read_text())
    assert doc["metadata"]["M"] == 3
    assert max(max(r) for r in doc["rates"]) == pytest.approx(1.0)


def test_rerun_is_byte_identical(tmp_path):
    for sub in ("a", "b"):
        assert run("simulate", "--preset", "fig6", "--out", tmp_path / sub) == 0
    for f in (tmp_path / "a").iterdir():
        assert f.read_bytes() == (tmp_path / "b" / f.name).read_bytes()


def test_scenario_file(tmp_path):
    doc = dict(PRESETS["fig6a"], name="custom")
    path = tmp_path / "s.json"
    path.write_text(json.dumps(doc))
    assert run("simulate", "--scenario", path, "--out", tmp_path) == 0
    assert (tmp_path / "custom.csv").exists()


def test_validation_exit_code(tmp_path, capsys):
    doc = dict(PRESETS["fig6a"])
    doc["state"] = {"V": 2}
    path = tmp_path / "s.json"
    path.write_text(json.dumps(doc))
    assert run("simulate", "--scenario", path, "--out", tmp_path) == 2
    assert "state.V" in capsys.readouterr().err
    assert not (tmp_path / "fig6a.csv").exists()
    path.write_text("{not json")
    assert run("simulate", "--scenario", path) == 2
    assert run("simulate", "--preset", "fig6a", "--scenario", path) == 2
    assert run("simulate", "--preset", "fig2", "--out", tmp_path) == 2


def test_export_density(tmp_path):
    assert run("export-density", "--preset", "fig2", "--out", tmp_path) == 0
    re_ = json.loads((tmp_path / "fig2_real.json").read_text())["entries"]
    im = json.loads((tmp_path / "fig2_imag.json").read_text())["entries"]
    assert np.allclose(re_, 0.5) and np.allclose(im, 0)
    assert run("export-density", "--preset", "fig5", "--out", tmp_path) == 0
    im = np.array(json.loads((tmp_path / "fig5_imag.json").read_text())["entries"])
    for n in range(9):
        assert im[n, n + 1] == pytest.approx(np.sin(np.pi / 4) / 10)
        assert im[n + 1, n] == pytest.approx(-np.sin(np.pi / 4) / 10)


def test_export_dephased(tmp_path):
    doc = dict(PRESETS["fig2"], name="flat")
    doc["state"] = {"V": 0}
    path = tmp_path / "s.json"
    path.write_text(json.dumps(doc))
    assert run("export-density", "--scenario", path, "--out", tmp_path) == 0
    re_ = np.array(json.loads((tmp_path / "flat_real.json").read_text())["entries"])
    assert np.array_equal(re_, np.diag(np.diag(re_)))


def test_witness_complete(tmp_path):
    assert run("witness", "--preset", "witness-bell-complete", "--out", tmp_path) == 0
    summary = json.loads((tmp_path / "witness-bell-complete_witness_summary.json").read_text())
    assert summary["bound"] == pytest.approx(1.0, abs=1e-4)
    assert summary["verified"]
    cert = tmp_path / "witness-bell-complete_certificate.json"
    assert run("verify-certificate", cert) == 0


def test_witness_diagonal_warns(tmp_path, caplog):
    assert run("witness", "--preset", "witness-bell-diagonal", "--out", tmp_path) == 0
    summary = json.loads((tmp_path / "witness-bell-diagonal_witness_summary.json").read_text())
    assert summary["bound"] == 0.0
    assert "diagonal-only" in caplog.text


def test_witness_dephased_state(tmp_path):
    doc = dict(PRESETS["witness-bell-complete"], name="deph")
    doc["state"] = {"V": 0}
    path = tmp_path / "s.json"
    path.write_text(json.dumps(doc))
    assert run("witness", "--scenario", path, "--out", tmp_path) == 0
    summary = json.loads((tmp_path / "deph_witness_summary.json").read_text())
    assert summary["bound"] == pytest.approx(0.0, abs=1e-6)


def test_witness_in_oam_basis(tmp_path):
    doc = dict(PRESETS["witness-bell-superposition"], name="oam")
    doc["mask"] = {"N": 2, "alpha": "pi/2", "beta": "pi/2", "strict": True}
    doc["spectrum"] = {"kind": "uniform", "L": 0}
    doc["witness"] = {"measurements": "complete", "basis": "oam", "L_out": 2}
    path = tmp_path / "s.json"
    path.write_text(json.dumps(doc))
    assert run("witness", "--scenario", path, "--out", tmp_path) == 0
    summary = json.loads((tmp_path / "oam_witness_summary.json").read_text())
    assert summary["dims"] == [5, 5]
    assert summary["bound"] == pytest.approx(summary["exact_log_negativity"], abs=1e-4)
    assert summary["bound"] > 0.1


def test_verify_certificate_failure(tmp_path):
    assert run("witness", "--preset", "witness-bell-complete", "--out", tmp_path) == 0
    cert = tmp_path / "witness-bell-complete_certificate.json"
    doc = json.loads(cert.read_text())
    doc["nu"] = [2 * x for x in doc["nu"]]
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc))
    assert run("verify-certificate", bad) == 4
    assert run("verify-certificate", tmp_path / "missing.json") == 2


def test_slm_capacity(tmp_path, capsys):
    assert run("slm-capacity", "--out", tmp_path) == 0
    doc = json.loads((tmp_path / "slm_capacity.json").read_text())
    assert doc["d_max"] == doc["n_max"] ** 2
    assert abs(doc["n_max"] / 2000 - 1) < 0.05
    assert run("slm-capacity", "--pixels", "-3") == 2


def test_numerical_inconsistency_exit_code(monkeypatch, tmp_path):
    from angqudit import cli
    from angqudit.errors import NumericalInconsistencyError

    def boom(*a, **k):
        raise NumericalInconsistencyError("negative rate")

    monkeypatch.setattr(cli, "fringe_scan", boom)
    assert run("simulate", "--preset", "fig6a", "--out", tmp_path) == 3
