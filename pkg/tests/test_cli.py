"""End-to-end checks of the ``jpa-forge`` command line.

Most tests drive ``main()`` in process (fast, captures stderr); one
subprocess test confirms the installed console script is wired up.
Artifacts land in per-test tmp directories.
"""

import csv
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from jpaforge import GainCurve, gain_metrics, noise_forward, to_angular
from jpaforge.cli import main

GHZ = 1e9

SQUID_BLOCK = """\
[squid]
l_j_ph = 50.0
c_shunt_pf = 7.036

[operating_point]
phi_dc_over_phi0 = 0.3333333333333333
phi_ac_over_phi0 = %(phi_ac)s
f_pump_ghz = 12.0

[environment]
source_impedance_ohm = 50.0

[environment.transformer]
z_odd_ohm = 10.0
z_even_ohm = 7140.0
length_mm = 0.8
odd_mode_velocity_m_per_s = 1.0e8

[[environment.elements]]
kind = "series_tuned_reactance"
slope_nh = %(slope)s
f_center_ghz = 6.0
"""

SWEEP_BLOCK = """\
[sweep]
f_min_ghz = %(fmin)s
f_max_ghz = %(fmax)s
points = %(points)d
%(level)s
band_f_min_ghz = 5.8
band_f_max_ghz = 6.2
"""


def write_config(tmp_path, phi_ac=0.106, slope=1.45, fmin=4.0, fmax=8.0,
                 points=801, level=19.0, extra=""):
    level_line = "" if level is None else "level_db = %s" % level
    text = (SQUID_BLOCK % {"phi_ac": phi_ac, "slope": slope}
            + "\n"
            + SWEEP_BLOCK % {"fmin": fmin, "fmax": fmax, "points": points,
                             "level": level_line}
            + "\n" + extra)
    path = tmp_path / "run.toml"
    path.write_text(text)
    return str(path)


def read_csv(path):
    with open(path, newline="") as handle:
        rows = list(csv.reader(handle))
    return rows[0], rows[1:]


def read_json(path):
    with open(path) as handle:
        return json.load(handle)


def run(args, tmp_path, sub="out"):
    out = tmp_path / sub
    code = main(["--out-dir", str(out)] + args)
    return code, out


def synth_noise_csv(tmp_path, f_ghz, gain, t_sys, name="cal.csv"):
    temps = [0.05, 0.1, 0.3, 0.7, 1.3, 2.4, 4.2]
    omega = to_angular(f_ghz * GHZ)
    path = tmp_path / name
    lines = ["temperature_K,psd_K"]
    for t in temps:
        lines.append("%r,%r" % (t, noise_forward(omega, t, gain, t_sys)))
    path.write_text("\n".join(lines) + "\n")
    return str(path)


# ----------------------------------------------------------- plumbing

def test_console_script_help():
    proc = subprocess.run(["jpa-forge", "--help"], capture_output=True,
                          text=True)
    assert proc.returncode == 0
    for sub in ("transformer", "gain", "noise-fit", "optimize", "sweep"):
        assert sub in proc.stdout


def test_module_entry_point(tmp_path):
    cfg = write_config(tmp_path)
    proc = subprocess.run(
        [sys.executable, "-m", "jpaforge.cli", "--config", cfg,
         "--out-dir", str(tmp_path / "o"), "transformer", "--points", "5"],
        capture_output=True, text=True)
    assert proc.returncode == 0


def test_config_flag_is_required(capsys):
    assert main(["gain"]) == 2
    assert "--config" in capsys.readouterr().err


def test_missing_config_file(tmp_path, capsys):
    code, _ = run(["--config", str(tmp_path / "nope.toml"), "gain"],
                  tmp_path)
    assert code == 2
    assert "error:" in capsys.readouterr().err


def test_missing_key_is_named(tmp_path, capsys):
    text = (SQUID_BLOCK % {"phi_ac": 0.106, "slope": 1.45}).replace(
        "phi_ac_over_phi0 = 0.106\n", "")
    path = tmp_path / "broken.toml"
    path.write_text(text + "\n" + SWEEP_BLOCK
                    % {"fmin": 4.0, "fmax": 8.0, "points": 101,
                       "level": "level_db = 19.0"})
    code, _ = run(["--config", str(path), "gain"], tmp_path)
    assert code == 2
    assert "phi_ac_over_phi0" in capsys.readouterr().err


def test_bad_jobs_value(tmp_path, capsys):
    cfg = write_config(tmp_path)
    code = main(["--config", cfg, "--jobs", "0",
                 "--out-dir", str(tmp_path / "o"), "gain"])
    assert code == 2
    assert "--jobs" in capsys.readouterr().err


# -------------------------------------------------------- transformer

def test_transformer_artifacts(tmp_path):
    cfg = write_config(tmp_path)
    code, out = run(["--config", cfg, "transformer", "--points", "11"],
                    tmp_path)
    assert code == 0
    header, rows = read_csv(out / "transformer.csv")
    assert header == ["freq_hz", "re_zext_ohm", "im_zext_ohm",
                      "ratio_mag", "ratio_re"]
    assert len(rows) == 11
    doc = read_json(out / "transformer.json")
    t = doc["transformer"]
    assert t["cutoff_hz"] == pytest.approx(62.5e9, rel=1e-12)
    assert t["low_frequency_ratio"] == pytest.approx(4.0, abs=1e-3)
    assert t["pole_rows"] == 0
    assert doc["schema"] == 1
    assert doc["command"] == "transformer"


def test_transformer_pole_row_flagged(tmp_path):
    cfg = write_config(tmp_path)
    code, out = run(["--config", cfg, "transformer",
                     "--fmin", "62.5", "--fmax", "62.5", "--points", "1"],
                    tmp_path)
    assert code == 0
    _, rows = read_csv(out / "transformer.csv")
    assert rows[0][1:] == ["", "", "", ""]
    doc = read_json(out / "transformer.json")
    assert doc["transformer"]["pole_rows"] == 1
    assert any("pole" in w for w in doc["warnings"])


# --------------------------------------------------------------- gain

def test_gain_artifacts_and_metrics(tmp_path):
    cfg = write_config(tmp_path)
    code, out = run(["--config", cfg, "gain"], tmp_path)
    assert code == 0
    header, rows = read_csv(out / "gain.csv")
    assert header == ["freq_hz", "gain_db", "re_g", "im_g"]
    assert len(rows) == 801
    doc = read_json(out / "gain.json")
    m = doc["metrics"]
    assert m["peak_gain_db"] == pytest.approx(22.14, abs=0.1)
    assert m["profile_class"] == "flattened"
    assert m["bandwidth_at_level_hz"] > 0.4e9
    assert doc["valid_points"] == 801
    assert doc["fault_points"] == 0
    assert doc["level_db"] == 19.0


def test_gain_csv_roundtrip_matches_json(tmp_path):
    """Metrics recomputed from CSV cells agree with the JSON report to
    1e-9 relative: the shortest-round-trip format loses nothing."""
    cfg = write_config(tmp_path)
    _, out = run(["--config", cfg, "gain"], tmp_path)
    _, rows = read_csv(out / "gain.csv")
    omegas = to_angular(np.array([float(r[0]) for r in rows]))
    g = np.array([complex(float(r[2]), float(r[3])) for r in rows])
    curve = GainCurve.from_arrays(omegas, g)
    m = gain_metrics(curve, 19.0,
                     band=(to_angular(5.8e9), to_angular(6.2e9)))
    ref = read_json(out / "gain.json")["metrics"]
    assert m.peak_gain_db == pytest.approx(ref["peak_gain_db"], rel=1e-9)
    assert m.bandwidth_at_level_hz == pytest.approx(
        ref["bandwidth_at_level_hz"], rel=1e-9)
    assert m.gbw_product_hz == pytest.approx(ref["gbw_product_hz"],
                                             rel=1e-9)
    assert m.ripple_db == pytest.approx(ref["ripple_db"], rel=1e-9,
                                        abs=1e-12)


def test_pump_off_gain_is_unit_reflection(tmp_path):
    cfg = write_config(tmp_path, phi_ac=1e-6, points=201, level=None)
    code, out = run(["--config", cfg, "gain"], tmp_path)
    assert code == 0
    _, rows = read_csv(out / "gain.csv")
    worst = max(abs(float(r[1])) for r in rows)
    assert worst <= 1e-3


def test_gain_runs_identical(tmp_path):
    cfg = write_config(tmp_path, points=401)
    _, out_a = run(["--config", cfg, "gain"], tmp_path, sub="a")
    _, out_b = run(["--config", cfg, "gain"], tmp_path, sub="b")
    assert (out_a / "gain.csv").read_bytes() == \
        (out_b / "gain.csv").read_bytes()
    doc_a = read_json(out_a / "gain.json")
    doc_b = read_json(out_b / "gain.json")
    doc_a.pop("duration_s")
    doc_b.pop("duration_s")
    assert doc_a == doc_b


def test_gain_jobs_invariant(tmp_path):
    cfg = write_config(tmp_path, points=401)
    _, out_a = run(["--config", cfg, "--jobs", "1", "gain"], tmp_path,
                   sub="j1")
    _, out_b = run(["--config", cfg, "--jobs", "4", "gain"], tmp_path,
                   sub="j4")
    assert (out_a / "gain.csv").read_bytes() == \
        (out_b / "gain.csv").read_bytes()


def test_format_flag_filters_artifacts(tmp_path):
    cfg = write_config(tmp_path, points=201)
    _, out_c = run(["--config", cfg, "--format", "csv", "gain"], tmp_path,
                   sub="c")
    assert (out_c / "gain.csv").exists()
    assert not (out_c / "gain.json").exists()
    _, out_j = run(["--config", cfg, "--format", "json", "gain"], tmp_path,
                   sub="j")
    assert (out_j / "gain.json").exists()
    assert not (out_j / "gain.csv").exists()


def test_gain_grid_past_pump_is_numeric_error(tmp_path, capsys):
    # every grid point sits above the pump: no idler anywhere
    cfg = write_config(tmp_path, fmin=13.0, fmax=14.0, points=16)
    code, _ = run(["--config", cfg, "gain"], tmp_path)
    assert code == 3
    assert "error:" in capsys.readouterr().err


# ---------------------------------------------------------- noise-fit

def test_noise_fit_recovers_truth(tmp_path):
    data = synth_noise_csv(tmp_path, 6.0, gain=50.0, t_sys=0.5)
    code, out = run(["noise-fit", data, "--freq-ghz", "6.0"], tmp_path)
    assert code == 0
    fit = read_json(out / "noise_fit.json")["fit"]
    assert fit["gain"] == pytest.approx(50.0, rel=1e-9)
    assert fit["t_sys_K"] == pytest.approx(0.5, abs=1e-6)
    assert fit["gain_db"] == pytest.approx(10 * math.log10(50.0), rel=1e-9)
    assert fit["clamped"] is False
    assert fit["samples"] == 7
    assert fit["residual_rms_K"] < 1e-9


def test_noise_fit_added_photon_example(tmp_path):
    data = synth_noise_csv(tmp_path, 6.35, gain=100.0, t_sys=0.38)
    code, out = run(["noise-fit", data, "--freq-ghz", "6.35"], tmp_path)
    assert code == 0
    fit = read_json(out / "noise_fit.json")["fit"]
    assert fit["n_add"] == pytest.approx(1.25, rel=0.01)
    assert fit["t_sql_K"] == pytest.approx(0.1524, rel=1e-3)


def test_noise_fit_frequency_from_config(tmp_path):
    data = synth_noise_csv(tmp_path, 6.0, gain=80.0, t_sys=0.4)
    cfg = write_config(tmp_path, extra="[noise]\nf_signal_ghz = 6.0\n")
    code, out = run(["--config", cfg, "noise-fit", data], tmp_path)
    assert code == 0
    fit = read_json(out / "noise_fit.json")["fit"]
    assert fit["f_signal_hz"] == pytest.approx(6.0e9)
    assert fit["gain"] == pytest.approx(80.0, rel=1e-9)


def test_noise_fit_bad_header(tmp_path, capsys):
    path = tmp_path / "bad.csv"
    path.write_text("temp,psd\n1.0,2.0\n2.0,3.0\n")
    code, _ = run(["noise-fit", str(path), "--freq-ghz", "6.0"], tmp_path)
    assert code == 2
    assert "temperature_K" in capsys.readouterr().err


def test_noise_fit_degenerate_exit_code(tmp_path, capsys):
    path = tmp_path / "flat.csv"
    path.write_text("temperature_K,psd_K\n0.3,80.0\n0.3,80.1\n0.3,79.9\n")
    code, _ = run(["noise-fit", str(path), "--freq-ghz", "6.0"], tmp_path)
    assert code == 4
    assert "error:" in capsys.readouterr().err


def test_noise_fit_json_survives_csv_format(tmp_path):
    # scalar reports have no CSV form, so --format csv still writes them
    data = synth_noise_csv(tmp_path, 6.0, gain=50.0, t_sys=0.5)
    code, out = run(["--format", "csv", "noise-fit", data,
                     "--freq-ghz", "6.0"], tmp_path)
    assert code == 0
    assert (out / "noise_fit.json").exists()


# -------------------------------------------------------------- sweep

SLOPE_GRID = "[sweep.grid]\nreactance_slope_nh = [0.0, 0.7, 1.45, 2.2]\n"


def test_sweep_profile_sequence(tmp_path):
    cfg = write_config(tmp_path, extra=SLOPE_GRID)
    code, out = run(["--config", cfg, "sweep"], tmp_path)
    assert code == 0
    header, rows = read_csv(out / "sweep.csv")
    assert header[0] == "value"
    assert [r[6] for r in rows] == [
        "lorentzian", "lorentzian", "flattened", "double_peaked"]
    assert all(r[7] == "" for r in rows)
    doc = read_json(out / "sweep.json")
    assert doc["sweep"]["parameter"] == "reactance_slope"
    assert len(doc["sweep"]["rows"]) == 4


def test_sweep_single_value(tmp_path):
    cfg = write_config(
        tmp_path, extra="[sweep.grid]\nreactance_slope_nh = [1.45]\n")
    code, out = run(["--config", cfg, "sweep"], tmp_path)
    assert code == 0
    _, rows = read_csv(out / "sweep.csv")
    assert len(rows) == 1
    assert float(rows[0][0]) == pytest.approx(1.45e-9)


def test_sweep_needs_grid_section(tmp_path, capsys):
    cfg = write_config(tmp_path)
    code, _ = run(["--config", cfg, "sweep"], tmp_path)
    assert code == 2
    assert "sweep.grid" in capsys.readouterr().err


# ----------------------------------------------------------- optimize

OPT_BLOCK = """\
[optimize]
target_gain_db = 20.0
ripple_limit_db = 1.0
budget = 60

[optimize.space]
reactance_slope_nh = [0.0, 2.4]
"""


def test_optimize_feasible_run(tmp_path):
    cfg = write_config(tmp_path, slope=0.0, points=401, extra=OPT_BLOCK)
    code, out = run(["--config", cfg, "--seed", "42", "optimize"],
                    tmp_path)
    assert code == 0
    doc = read_json(out / "optimize.json")["optimize"]
    assert doc["feasible"] is True
    assert doc["metrics"]["peak_gain_db"] >= 20.0
    assert doc["metrics"]["ripple_db"] <= 1.0
    assert 0.0 <= doc["best_parameters"]["reactance_slope"] <= 2.4e-9
    assert doc["optimizer_seed"] == 42
    header, rows = read_csv(out / "optimize_trace.csv")
    assert header[:2] == ["index", "reactance_slope"]
    assert len(rows) == doc["evaluations"]
    assert doc["evaluations"] <= 60


def test_optimize_seed_reproducible(tmp_path):
    cfg = write_config(tmp_path, slope=0.0, points=401, extra=OPT_BLOCK)
    _, out_a = run(["--config", cfg, "--seed", "7", "optimize"], tmp_path,
                   sub="a")
    _, out_b = run(["--config", cfg, "--seed", "7", "optimize"], tmp_path,
                   sub="b")
    assert (out_a / "optimize_trace.csv").read_bytes() == \
        (out_b / "optimize_trace.csv").read_bytes()
    doc_a = read_json(out_a / "optimize.json")
    doc_b = read_json(out_b / "optimize.json")
    doc_a.pop("duration_s")
    doc_b.pop("duration_s")
    assert doc_a == doc_b


def test_optimize_infeasible_exit_code(tmp_path):
    hard = OPT_BLOCK.replace("target_gain_db = 20.0",
                             "target_gain_db = 60.0")
    hard = hard.replace("budget = 60", "budget = 12")
    cfg = write_config(tmp_path, slope=0.0, phi_ac=0.03, points=201,
                       extra=hard)
    code, out = run(["--config", cfg, "optimize"], tmp_path)
    assert code == 5
    doc = read_json(out / "optimize.json")["optimize"]
    assert doc["feasible"] is False
    assert doc["violation"] > 0.0
