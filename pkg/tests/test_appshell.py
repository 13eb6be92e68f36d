import json
import math
import os

import numpy as np
import pytest

from quasiwork import model
from quasiwork.cli import main
from quasiwork.config import ConfigError, default_config, load_config
from quasiwork.emitters import emit_figure, figure_times, z_stderr_prediction
from quasiwork.explore import time_window
from quasiwork.schemes import scheme_tables


def _write(tmp_path, text):
    path = tmp_path / "config.yaml"
    path.write_text(text)
    return path


def test_default_config_matches_reference():
    cfg = default_config()
    ref = model.reference_params()
    assert cfg.params.omega1 == pytest.approx(ref.omega1, rel=1e-12)
    assert cfg.params.phi1 == pytest.approx(ref.phi1, rel=1e-6)
    assert tuple(cfg.state.weights) == model.REFERENCE_STATE_WEIGHTS
    assert cfg.grid_points == 400
    assert cfg.shots is None


def test_unit_conversions(tmp_path):
    base = """
drive:
  unit: {unit}
  omega1: 2.0
  omega2: 3.0
  phi1: 1.0
  phi2: -1.0
"""
    cfg = load_config(_write(tmp_path, base.format(unit="MHz_times_2pi")))
    assert cfg.params.omega1 == pytest.approx(2.0 * 2 * math.pi)
    cfg = load_config(_write(tmp_path, base.format(unit="angular_rad_per_us")))
    assert cfg.params.omega1 == pytest.approx(2.0)
    cfg = load_config(_write(tmp_path, base.format(unit="MHz_plain")))
    assert cfg.params.omega1 == pytest.approx(2.0)


def test_config_round_trip(tmp_path):
    path = _write(
        tmp_path,
        """
drive: {unit: angular_rad_per_us, omega1: 10.0, omega2: 12.0, phi1: 3.0, phi2: 4.0}
state: {weights: [0.5, 0.25, 0.25], phases: [0.0, 1.0, 2.0]}
grid: {start: 0.0, end: 0.5, points: 11}
shots: 500
seed: 7
out_dir: somewhere
sweep: {n_sets: 9, n_time: 33}
""",
    )
    cfg = load_config(path)
    assert cfg.params.omega2 == 12.0
    assert cfg.grid_end == 0.5
    assert cfg.grid_points == 11
    assert cfg.shots == 500
    assert cfg.seed == 7
    assert cfg.sweep.n_sets == 9
    assert cfg.sweep.n_time == 33
    assert cfg.sweep.seed == 7
    assert str(cfg.out_dir) == "somewhere"


def test_config_overrides(tmp_path):
    path = _write(tmp_path, "seed: 1\n")
    cfg = load_config(path, seed=42, shots=100, out_dir="elsewhere", grid_points=23)
    assert cfg.seed == 42
    assert cfg.shots == 100
    assert str(cfg.out_dir) == "elsewhere"
    assert cfg.grid_points == 23
    assert cfg.sweep.n_time == 23


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("drive: {omega1: -1.0}", "drive"),
        ("drive: {unit: fortnights}", "drive.unit"),
        ("drive: {omega1: [1]}", "drive.omega1"),
        ("state: {weights: [0.5, 0.5]}", "state.weights"),
        ("state: {weights: [-0.1, 0.6, 0.5]}", "state"),
        ("grid: {points: 1}", "grid.points"),
        ("grid: {start: 1.0, end: 0.5}", "grid.end"),
        ("shots: 0", "shots"),
        ("sweep: {n_sets: 0}", "sweep"),
        ("sweep: {wibble: 3}", "sweep"),
        ("unknown_block: {}", "top level"),
        ("grid: [1, 2]", "grid"),
    ],
)
def test_config_errors(tmp_path, text, fragment):
    with pytest.raises(ConfigError) as err:
        load_config(_write(tmp_path, text))
    assert fragment in str(err.value)


def test_config_invalid_yaml(tmp_path):
    with pytest.raises(ConfigError):
        load_config(_write(tmp_path, "drive: {unit: 'a"))
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.yaml")


def test_figure_times_default_window():
    cfg = default_config()
    times = figure_times(cfg)
    assert times[0] == 0.0
    assert times[-1] == pytest.approx(2.0 * time_window(cfg.params))
    assert len(times) == cfg.grid_points


def test_fig3_t0_rows(tmp_path):
    cfg = default_config(out_dir=tmp_path, grid_points=5)
    emit_figure(cfg, "fig3")
    lines = (tmp_path / "fig3_series.csv").read_text().splitlines()
    header = lines[0].split(",")
    assert header == ["t_us", "series", "value", "stderr"]
    t0 = [l.split(",") for l in lines[1:] if l.startswith("0.0,")]
    values = {row[1]: float(row[2]) for row in t0}
    p = cfg.state.normalized_weights
    for i, li in enumerate(model.ENERGY_LABELS):
        for f, lf in enumerate(model.ENERGY_LABELS):
            expected = p[i] if i == f else 0.0
            assert values[f"z:i={li}:f={lf}"] == pytest.approx(expected, abs=1e-10)
    assert values["negativity"] == pytest.approx(0.0, abs=1e-10)
    assert values["ref:bound"] == pytest.approx(math.sqrt(3.0) - 1.0)


def test_fig3_has_negative_transition_cell(tmp_path):
    cfg = default_config(out_dir=tmp_path, grid_points=80)
    emit_figure(cfg, "fig3")
    neg = [
        float(l.split(",")[2])
        for l in (tmp_path / "fig3_series.csv").read_text().splitlines()[1:]
        if l.split(",")[1] == "z:i=-:f=+"
    ]
    assert min(neg) < -0.05


def test_fig4_series_differ_at_peak(tmp_path):
    cfg = default_config(out_dir=tmp_path, grid_points=80)
    emit_figure(cfg, "fig4")
    rows = [l.split(",") for l in (tmp_path / "fig4_series.csv").read_text().splitlines()[1:]]
    w = {}
    for r in rows:
        w.setdefault(r[1], []).append(float(r[2]))
    diff = np.abs(np.array(w["w_mhq"]) - np.array(w["w_tpm"]))
    assert diff.max() > 1.0
    om = math.sqrt(0.5 * (cfg.params.omega1**2 + cfg.params.omega2**2))
    assert np.allclose(np.array(w["w_mhq_over_omega"]) * om, w["w_mhq"], atol=1e-9)


def test_fig2_tomography(tmp_path):
    cfg = default_config(out_dir=tmp_path, grid_points=4)
    emit_figure(cfg, "fig2")
    rows = [l.split(",") for l in (tmp_path / "fig2_tomography.csv").read_text().splitlines()[1:]]
    assert len(rows) == 9
    p = cfg.state.normalized_weights
    diag = {r[0]: float(r[2]) for r in rows if r[0] == r[1]}
    assert diag["+"] == pytest.approx(p[0], abs=1e-10)
    assert diag["-"] == pytest.approx(p[2], abs=1e-10)
    offdiag = {(r[0], r[1]): float(r[4]) for r in rows}
    assert offdiag[("+", "-")] == pytest.approx(math.sqrt(p[0] * p[2]), abs=1e-10)


def test_emitters_byte_stable(tmp_path):
    cfg_a = default_config(out_dir=tmp_path / "a", grid_points=12, shots=5000)
    cfg_b = default_config(out_dir=tmp_path / "b", grid_points=12, shots=5000)
    for target in ("fig2", "fig3", "fig4"):
        emit_figure(cfg_a, target)
        emit_figure(cfg_b, target)
        for name in (f"{target}_series.csv", f"{target}_meta.json"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_noisy_emission_fills_stderr(tmp_path):
    cfg = default_config(out_dir=tmp_path, grid_points=6, shots=10**6, seed=5)
    emit_figure(cfg, "fig3")
    rows = [l.split(",") for l in (tmp_path / "fig3_series.csv").read_text().splitlines()[1:]]
    z_rows = [r for r in rows if r[1].startswith("z:")]
    assert all(r[3] != "" for r in z_rows)
    assert any(float(r[3]) > 0 for r in z_rows)


def test_z_stderr_prediction_shape(ref_rho, ref_params):
    tab = scheme_tables(ref_rho, 0.1, ref_params)
    se = z_stderr_prediction(tab, 10**6)
    assert se.shape == (3, 3)
    assert np.all(se >= 0.0)
    assert np.all(se <= 1e-3)


def test_cli_selftest_exit_code():
    assert main(["selftest"]) == 0


def test_cli_config_error(tmp_path, capsys):
    bad = tmp_path / "bad.yaml"
    bad.write_text("drive: {omega1: -3}")
    code = main(["reproduce-fig3", "--config", str(bad), "--out", str(tmp_path)])
    assert code == 1
    assert "config error" in capsys.readouterr().err


def test_cli_reproduce_and_sweep(tmp_path, capsys):
    out = tmp_path / "run"
    assert main(["reproduce-fig3", "--out", str(out), "--steps", "8"]) == 0
    assert (out / "fig3_series.csv").exists()
    assert (out / "fig3_meta.json").exists()

    cfg = tmp_path / "sweep.yaml"
    cfg.write_text("sweep: {n_sets: 12, n_time: 40}\nseed: 3\n")
    assert main(["sweep", "--config", str(cfg), "--out", str(out)]) == 0
    assert (out / "sweep_records.csv").exists()
    summary = json.loads((out / "sweep_summary.json").read_text())
    assert summary["n_sets"] == 12
    assert summary["bound_violations"] == 0
    rec_lines = (out / "sweep_records.csv").read_text().splitlines()
    assert len(rec_lines) == 1 + 12 * 3  # header + three variants per set


def test_cli_sweep_archive_reproducible(tmp_path):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("sweep: {n_sets: 6, n_time: 30}\nseed: 11\n")
    outs = []
    for name, threads in (("x", None), ("y", None), ("z", "3")):
        out = tmp_path / name
        old = os.environ.get("QUASIWORK_THREADS")
        if threads is not None:
            os.environ["QUASIWORK_THREADS"] = threads
        try:
            assert main(["sweep", "--config", str(cfg), "--out", str(out)]) == 0
        finally:
            if threads is not None:
                if old is None:
                    os.environ.pop("QUASIWORK_THREADS", None)
                else:
                    os.environ["QUASIWORK_THREADS"] = old
        outs.append((out / "sweep_records.csv").read_bytes())
    assert outs[0] == outs[1] == outs[2]


def test_cli_shots_and_seed_flags(tmp_path):
    out1 = tmp_path / "s1"
    out2 = tmp_path / "s2"
    args = ["reproduce-fig2", "--steps", "5", "--shots", "1000"]
    assert main(args + ["--out", str(out1), "--seed", "1"]) == 0
    assert main(args + ["--out", str(out2), "--seed", "2"]) == 0
    assert (out1 / "fig2_series.csv").read_bytes() != (out2 / "fig2_series.csv").read_bytes()
