from __future__ import annotations

import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from photonmol.analysis.brightness import synthesize_power_series
from photonmol.analysis.jsi import supersample_jsi, synthetic_measured_jsi
from photonmol.cli import main
from photonmol.io import write_json, write_jsi, write_power_series

SMALL_JSA = {"jsa": {"points": 48, "pump_points": 257}}


def _cfg(tmp_path, data, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


@pytest.fixture(scope="module")
def inputs(tmp_path_factory):
    d = tmp_path_factory.mktemp("inputs")
    ps = synthesize_power_series(np.linspace(0.02, 0.3, 12), noise=0.01,
                                 rng=np.random.default_rng(0))
    j = supersample_jsi(synthetic_measured_jsi(), 1.0)
    return {"ps": str(write_power_series(d / "ps.csv", ps)),
            "jsi": str(write_jsi(d / "jsi.csv", j))}


def test_version_and_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "photonmol", "--version"], capture_output=True,
                       text=True, check=False)
    assert r.returncode == 0 and "photonmol" in r.stdout


def test_bad_arguments_exit_two(tmp_path, capsys):
    assert main(["nonsense"]) == 2
    assert main(["jsa", "--threads", "0", "--out", str(tmp_path)]) == 2
    assert main(["jsa", "--config", str(tmp_path / "missing.json")]) == 2


def test_bad_config_key_exits_two(tmp_path, capsys):
    cfg = _cfg(tmp_path, {"device": {"kapa2_sq": 0.1}})
    assert main(["jsa", "--config", cfg, "--out", str(tmp_path)]) == 2
    assert "kapa2_sq" in capsys.readouterr().err


def test_spectrum_outputs(tmp_path):
    cfg = _cfg(tmp_path, {"spectrum": {"start_nm": 1548.0, "stop_nm": 1552.0, "points": 8001}})
    assert main(["spectrum", "--config", cfg, "--out", str(tmp_path)]) == 0
    with (tmp_path / "spectrum.csv").open() as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["wavelength_nm", "transmission"] and len(rows) == 8002
    res = json.loads((tmp_path / "resonances.json").read_text())["resonances"]
    assert len(res) >= 2


def test_jsa_outputs(tmp_path):
    assert main(["jsa", "--config", _cfg(tmp_path, SMALL_JSA), "--out", str(tmp_path)]) == 0
    rep = json.loads((tmp_path / "jsa.json").read_text())
    assert 0.98 < rep["purity"] <= 1.0
    assert rep["norm"] == pytest.approx(1.0)
    assert len(rep["schmidt_probs"]) == 10


def test_single_cell_sweep_matches_jsa(tmp_path):
    jsa_dir, sweep_dir = tmp_path / "jsa", tmp_path / "sweep"
    cfg = _cfg(tmp_path, dict(SMALL_JSA, sweep={
        "kappa2_sq_min": 0.2, "kappa2_sq_max": 0.2, "kappa2_sq_points": 1,
        "kappa_mzi_sq_min": 0.1, "kappa_mzi_sq_max": 0.1, "kappa_mzi_sq_points": 1},
        device={"kappa2_sq": 0.2, "kappa_mzi_sq": 0.1}))
    assert main(["jsa", "--config", cfg, "--out", str(jsa_dir)]) == 0
    assert main(["sweep", "--config", cfg, "--out", str(sweep_dir)]) == 0
    with (sweep_dir / "sweep.csv").open() as fh:
        (row,) = list(csv.DictReader(fh))
    rep = json.loads((jsa_dir / "jsa.json").read_text())
    assert float(row["purity"]) == rep["purity"]
    assert float(row["relative_brightness"]) == rep["relative_brightness"]
    sel = json.loads((sweep_dir / "selection.json").read_text())
    assert sel["metadata"]["pump_bandwidth_fixed"] is True


def test_single_ring_override_has_unit_brightness(tmp_path):
    cfg = _cfg(tmp_path, dict(SMALL_JSA, device={"kappa2_sq": 0.0}))
    assert main(["jsa", "--config", cfg, "--out", str(tmp_path)]) == 0
    rep = json.loads((tmp_path / "jsa.json").read_text())
    assert rep["relative_brightness"] == 1.0
    assert rep["purity"] < 0.95


def test_sweep_with_no_qualifying_cell_selects_none(tmp_path):
    cfg = _cfg(tmp_path, dict(SMALL_JSA, sweep={
        "kappa2_sq_min": 0.01, "kappa2_sq_max": 0.01, "kappa2_sq_points": 1,
        "kappa_mzi_sq_min": 0.01, "kappa_mzi_sq_max": 0.01, "kappa_mzi_sq_points": 1,
        "min_purity": 0.9999}))
    assert main(["sweep", "--config", cfg, "--out", str(tmp_path)]) == 0
    assert json.loads((tmp_path / "selection.json").read_text())["selected"] is None


def test_coupler_scan_outputs(tmp_path):
    cfg = _cfg(tmp_path, {"coupler_scan": {"L_s_points": 21, "theta_points": 16}})
    assert main(["coupler-scan", "--config", cfg, "--out", str(tmp_path)]) == 0
    tol = json.loads((tmp_path / "tolerant_points.json").read_text())["tolerant"]
    assert tol and all({"target", "L_s_um", "theta_rad", "gap_sensitivity"} <= set(t) for t in tol)


def test_analyze_requires_input(tmp_path, capsys):
    assert main(["analyze", "--out", str(tmp_path)]) == 2
    assert "--power-series" in capsys.readouterr().err


def test_analyze_missing_column_named(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("P_mW,Cs_Hz,Ci_Hz\n1,2,3\n")
    assert main(["analyze", "--power-series", str(bad), "--out", str(tmp_path)]) == 2
    assert "Ccc_Hz" in capsys.readouterr().err


def test_analyze_full_report(tmp_path, inputs):
    budgets = write_json(tmp_path / "b.json", {"signal": [{"label": "x", "loss_dB": 3.0}],
                                              "idler": [{"label": "y", "loss_dB": 3.0}]})
    args = ["analyze", "--power-series", inputs["ps"], "--jsi", inputs["jsi"],
            "--budgets", str(budgets), "--out", str(tmp_path)]
    assert main(args) == 0
    rep = json.loads((tmp_path / "analysis.json").read_text())
    assert rep["brightness_fit"]["gamma_eff"] == pytest.approx(4.4e6, rel=0.05)
    assert rep["intrinsic_heralding"]["eta_s_src"] == pytest.approx(0.072 * 10**0.3, rel=0.05)
    assert rep["jsi"]["noise_sigma"] < 0.01
    assert (tmp_path / "car.csv").exists()


def test_analyze_is_thread_independent(tmp_path, inputs):
    outs = []
    for threads in ("1", "3"):
        d = tmp_path / threads
        assert main(["analyze", "--jsi", inputs["jsi"], "--threads", threads,
                     "--out", str(d)]) == 0
        outs.append((d / "analysis.json").read_bytes())
    assert outs[0] == outs[1]


def test_unfittable_data_exits_three(tmp_path):
    P = np.linspace(1.0, 1.0 + 4e-7, 6)
    ps = write_power_series(tmp_path / "ps.csv",
                            synthesize_power_series(P, beta_s=10.0, beta_i=10.0, dark=5.0))
    assert main(["analyze", "--power-series", str(ps), "--out", str(tmp_path)]) == 3
