"""Command-line front end: config handling, exports, exit codes."""

import json
import shutil
import subprocess
import sys

import pytest
from conftest import GAMMA_SP_REFERENCE

import cavityprop.diagrammatics
from cavityprop.cli import RunConfig, _parse_kappa_in, _resolve_config, build_parser, main
from cavityprop.quasimode_propagators import ModelParams


def _resolve(argv):
    return _resolve_config(build_parser().parse_args(argv))


def test_config_roundtrip_through_json():
    cfg = RunConfig(
        lam=0.07,
        kappa_in=0.23,
        window=2.0,
        points=101,
        subset="unlinked",
        omega_line=(-1.0, 3.0, 17),
        strict=True,
    )
    again = RunConfig.from_dict(json.loads(json.dumps(cfg.to_dict())))
    assert again == cfg


def test_config_validation():
    with pytest.raises(ValueError):
        RunConfig(points=8)
    with pytest.raises(ValueError):
        RunConfig(subset="linked")
    with pytest.raises(ValueError):
        RunConfig(kappa_c=0.0)
    with pytest.raises(ValueError):
        RunConfig(fmt="tsv")
    with pytest.raises(ValueError):
        RunConfig(omega_line=(2.0, 1.0, 10))
    with pytest.raises(ValueError):
        RunConfig.from_dict({"bogus_key": 1})
    RunConfig(lam=0.0)  # decoupled atom is a legal degenerate configuration


def test_packet_width_gamma_units():
    params = ModelParams(omega_a=0.0, k_c=0.0, kappa_c=1.0, lam=0.1)
    assert abs(_parse_kappa_in("2xgamma", params) - 2 * GAMMA_SP_REFERENCE) < 1e-15
    assert _parse_kappa_in("0.3", params) == 0.3
    assert abs(_parse_kappa_in("0.5XGAMMA", params) - 0.5 * GAMMA_SP_REFERENCE) < 1e-15


def test_flags_override_config_file(tmp_path):
    cfg_file = tmp_path / "run.json"
    cfg_file.write_text(json.dumps({"lam": 0.2, "points": 51, "kappa_in": "2xgamma"}))
    cfg = _resolve(
        ["scatter", "--config", str(cfg_file), "--lambda", "0.05", "--window", "3.0"]
    )
    assert cfg.lam == 0.05  # flag wins
    assert cfg.points == 51  # file wins over default
    assert cfg.window == 3.0
    # the width multiple resolves against the merged parameters (lam=0.05)
    from cavityprop.quasimode_propagators import gamma_sp

    assert abs(cfg.kappa_in - 2 * gamma_sp(cfg.model_params())) < 1e-15


def test_omega_line_flag_parsing():
    # the '=' form lets the range start with a negative number
    cfg = _resolve(["quasimode", "--omega-line=-2.0:2.0:21"])
    assert cfg.omega_line == (-2.0, 2.0, 21)
    assert main(["quasimode", "--omega-line", "1:2"]) == 1  # needs LO:HI:COUNT


def test_scatter_writes_grid_sidecar_and_plot(tmp_path, capsys):
    out = tmp_path / "grid.csv"
    argv = ["scatter", "--points", "41", "--window", "1.0", "--out", str(out)]
    assert main(argv) == 0
    raw = out.read_bytes()
    assert b"\r" not in raw
    text = raw.decode()
    assert text.startswith("k1\\k2,")
    assert len(text.strip().split("\n")) == 42  # header + one row per k1

    meta = json.loads((tmp_path / "grid.json").read_text())
    for key in ("params", "kappa_in", "gamma_sp", "subset", "window", "points",
                "integrated_norm", "window_mass"):
        assert key in meta
    assert abs(meta["integrated_norm"] - 1.0) < 1e-5
    assert meta["subset"] == "all"
    assert (tmp_path / "grid.png").exists()

    # full-precision cells round-trip exactly through the text format
    first_row = text.split("\n")[1].split(",")
    assert float(first_row[0]) == -1.0

    # determinism: a rerun reproduces the grid byte for byte
    assert main(argv) == 0
    assert out.read_bytes() == raw
    capsys.readouterr()


def test_scatter_no_plot_and_json_format(tmp_path, capsys):
    out = tmp_path / "grid.json"
    argv = [
        "scatter", "--points", "41", "--window", "1.0", "--format", "json",
        "--no-plot", "--out", str(out), "--subset", "unlinked",
    ]
    assert main(argv) == 0  # norm gate applies only to the full amplitude
    assert not (tmp_path / "grid.png").exists()
    payload = json.loads(out.read_text())
    assert payload["subset"] == "unlinked"
    assert len(payload["values"]) == 41 and len(payload["values"][0]) == 41
    assert len(payload["k1_axis"]) == 41
    capsys.readouterr()


def test_scatter_norm_gate_sets_exit_code(tmp_path, capsys):
    out = tmp_path / "grid.csv"
    argv = [
        "scatter", "--points", "41", "--window", "1.0", "--no-plot",
        "--norm-tol", "1e-9", "--out", str(out),
    ]
    assert main(argv) == 2  # whole-plane norm misses 1 by ~3e-7 > 1e-9
    assert out.exists()  # the grid is still written for inspection
    capsys.readouterr()


def test_quasimode_table(capsys):
    assert main(["quasimode", "--n-max", "2"]) == 0
    text = capsys.readouterr().out
    blocks = text.strip().split("\n\n")
    assert blocks[0].startswith("# pole decompositions")
    pole_lines = blocks[0].split("\n")[2:]
    assert len(pole_lines) == 2
    n1 = pole_lines[0].split(",")
    # resonant single-photon poles at -i kappa_c/2 +- i sqrt(kappa_c^2/4 - lam)
    assert abs(float(n1[2]) + GAMMA_SP_REFERENCE) < 1e-12
    assert abs(float(n1[4]) + (1.0 - GAMMA_SP_REFERENCE)) < 1e-12
    assert float(n1[9]) < 1e-12  # a_plus + a_minus = 1

    sample_lines = blocks[1].split("\n")
    header = sample_lines[1].split(",")
    i_omega = header.index("omega")
    i_phi0 = header.index("re_phi0_00")
    for line in sample_lines[2:]:
        cells = line.split(",")
        w = float(cells[i_omega])
        assert w != 0.0  # the free-sector propagator 1/omega stays finite
        assert abs(float(cells[i_phi0]) - 1.0 / w) < 1e-15 * abs(1.0 / w)


def test_quasimode_json_export(tmp_path, capsys):
    out = tmp_path / "quasi.json"
    assert main(["quasimode", "--n-max", "3", "--format", "json", "--out", str(out)]) == 0
    payload = json.loads(out.read_text())
    assert [row["n"] for row in payload["poles"]] == [1, 2, 3]
    assert all("phi1_00" in row for row in payload["samples"])
    capsys.readouterr()


def test_oracle_report_and_threshold(tmp_path, capsys):
    base = [
        "oracle", "--oracle-modes", "64", "--oracle-window", "10",
        "--t-final", "270", "--window", "1.5",
    ]
    out = tmp_path / "report.json"
    assert main(base + ["--threshold", "10", "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    for key in ("l2_rel_error", "max_rel_error", "residual_b_norm", "norm_drift",
                "passed", "threshold", "gamma_sp", "kappa_in", "warnings"):
        assert key in report
    assert report["passed"] is True
    assert report["norm_drift"] < 1e-8

    # same run gated at the default threshold fails on this tiny grid
    assert main(base) == 2
    capsys.readouterr()


def test_oracle_strict_turns_warnings_into_failure(capsys):
    argv = [
        "oracle", "--oracle-modes", "64", "--oracle-window", "10",
        "--t-final", "270", "--window", "1.5", "--threshold", "10", "--strict",
    ]
    assert main(argv) == 2  # unconverged-asymptote warning
    capsys.readouterr()


def test_oracle_rejects_premature_comparison(capsys):
    argv = [
        "oracle", "--oracle-modes", "64", "--oracle-window", "10",
        "--t-final", "100", "--window", "1.5",
    ]
    assert main(argv) == 1  # t_final below 30/gamma_sp
    capsys.readouterr()


def test_oracle_zero_coupling_degenerate_run(capsys):
    argv = [
        "oracle", "--lambda", "0", "--kappa-in", "0.3", "--oracle-modes", "64",
        "--oracle-window", "10", "--t-final", "50", "--window", "1.5",
    ]
    assert main(argv) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["l2_rel_error"] == 0.0  # both sides identically zero
    assert report["gamma_sp"] == 0.0


def test_selftest_all_groups_pass(capsys):
    assert main(["selftest"]) == 0
    text = capsys.readouterr().out
    for group in ("mirror-unitarity", "pole-identities", "generic-vs-closed-form",
                  "sequence-counts", "residue-vs-quadrature", "normalization"):
        assert f"PASS {group}" in text
    assert "FAIL" not in text
    assert "sequences N=2: G2_00=8, G2_01=4, G2_10=4, G2_11=2" in text


def test_selftest_catches_injected_sign_error(monkeypatch, capsys):
    true_zeta = cavityprop.diagrammatics.zeta
    monkeypatch.setattr(
        cavityprop.diagrammatics, "zeta", lambda w, p: -true_zeta(w, p)
    )
    assert main(["selftest"]) == 2
    text = capsys.readouterr().out
    assert "FAIL generic-vs-closed-form" in text


def test_unknown_flag_is_a_usage_error(capsys):
    assert main(["scatter", "--bogus"]) == 1
    capsys.readouterr()


def test_config_file_errors(tmp_path, capsys):
    assert main(["quasimode", "--config", str(tmp_path / "missing.json")]) == 3
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["quasimode", "--config", str(bad)]) == 1
    unknown = tmp_path / "unknown.json"
    unknown.write_text(json.dumps({"no_such_field": 1}))
    assert main(["quasimode", "--config", str(unknown)]) == 1
    capsys.readouterr()


def test_unwritable_output_is_io_failure(tmp_path, capsys):
    blocker = tmp_path / "blocker"
    blocker.write_text("plain file")
    argv = ["quasimode", "--n-max", "1", "--out", str(blocker / "table.csv")]
    assert main(argv) == 3
    capsys.readouterr()


def test_console_entry_point():
    exe = shutil.which("cavityprop")
    assert exe is not None, "console script not installed"
    proc = subprocess.run(
        [exe, "quasimode", "--n-max", "1"], capture_output=True, text=True, timeout=120
    )
    assert proc.returncode == 0
    assert proc.stdout.startswith("# pole decompositions")
