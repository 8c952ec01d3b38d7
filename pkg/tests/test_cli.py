import os

import pytest

from irsmimo.cli import build_parser, main


def _write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


SMALL_SCENARIO = "M: 30\nK: 3\n"

SMALL_SWEEP = """\
M: 40
K: 2
surfaces: [2]
strategies: [single_irs, multi_sca]
sweep:
  variable: elements
  values: [20, 40]
"""


def test_parser_requires_subcommand(capsys):
    with pytest.raises(SystemExit):
        build_parser().parse_args([])
    capsys.readouterr()


def test_place_runs_and_writes(tmp_path, capsys):
    out = tmp_path / "place.txt"
    assert main(["place", "--out", str(out), "--quiet"]) == 0
    text = out.read_text()
    assert "candidates (11)" in text
    assert "greedy selection (K=4)" in text
    assert capsys.readouterr().out == ""  # --quiet suppressed stdout


def test_place_prints_without_out(capsys):
    assert main(["place"]) == 0
    assert "candidates (11)" in capsys.readouterr().out


def test_optimize_small_scenario(tmp_path, capsys):
    cfg = _write(tmp_path, "scenario.yaml", SMALL_SCENARIO)
    out = tmp_path / "opt.txt"
    assert main(["optimize", "--config", cfg, "--out", str(out), "--quiet"]) == 0
    text = out.read_text()
    assert "rounded SE" in text
    assert "surface" in text
    capsys.readouterr()


def test_sweep_writes_csv_and_figures(tmp_path, capsys):
    cfg = _write(tmp_path, "sweep.yaml", SMALL_SWEEP)
    out = tmp_path / "runs" / "fig.csv"
    out.parent.mkdir()
    assert main(["sweep", "--config", cfg, "--out", str(out), "--quiet"]) == 0
    assert out.exists()
    pngs = sorted(p.name for p in out.parent.glob("*.png"))
    assert pngs == ["fig_elements_k2.png", "fig_erank.png", "fig_rate.png"]
    capsys.readouterr()


def test_sweep_no_plots(tmp_path, capsys):
    cfg = _write(tmp_path, "sweep.yaml", SMALL_SWEEP)
    out = tmp_path / "plain.csv"
    assert main(["sweep", "--config", cfg, "--out", str(out), "--no-plots", "--quiet"]) == 0
    assert out.exists()
    assert list(tmp_path.glob("*.png")) == []
    capsys.readouterr()


def test_sweep_strict_exit_code(tmp_path, capsys):
    cfg = _write(tmp_path, "bad.yaml", "N_t: 1\nN_r: 1\nK: 1\n")
    out = tmp_path / "bad.csv"
    args = ["sweep", "--config", cfg, "--out", str(out), "--no-plots"]
    assert main(args + ["--quiet"]) == 0  # errors recorded per row
    assert main(args + ["--quiet", "--strict"]) == 2
    capsys.readouterr()


def test_sweep_strict_passes_clean_run(tmp_path, capsys):
    cfg = _write(tmp_path, "sweep.yaml", SMALL_SWEEP)
    out = tmp_path / "ok.csv"
    assert main(["sweep", "--config", cfg, "--out", str(out), "--no-plots",
                 "--strict", "--quiet"]) == 0
    capsys.readouterr()


def test_oracle_default_demo(tmp_path, capsys):
    out = tmp_path / "oracle.txt"
    assert main(["oracle", "--out", str(out), "--quiet"]) == 0
    text = out.read_text()
    assert "oracle SE" in text
    assert "gap (oracle - solver)" in text
    capsys.readouterr()


def test_oracle_accepts_scenario(tmp_path, capsys):
    cfg = _write(tmp_path, "tiny.yaml", "M: 12\nK: 2\n")
    assert main(["oracle", "--config", cfg, "--quiet"]) == 0
    capsys.readouterr()


def test_check_props_passes(tmp_path, capsys):
    out = tmp_path / "props.txt"
    assert main(["check-props", "--out", str(out), "--quiet"]) == 0
    text = out.read_text()
    assert "4/4 checks passed" in text
    assert text.count("PASS") == 4
    capsys.readouterr()


def test_missing_config_reports_error(capsys):
    code = main(["place", "--config", "/nonexistent/path.yaml"])
    assert code == 1
    assert "error:" in capsys.readouterr().err


def test_invalid_config_reports_error(tmp_path, capsys):
    cfg = _write(tmp_path, "bad.yaml", "K: 6\n")
    assert main(["optimize", "--config", cfg]) == 1
    assert "error:" in capsys.readouterr().err


def test_outputs_are_deterministic(tmp_path, capsys):
    cfg = _write(tmp_path, "sweep.yaml", SMALL_SWEEP)
    blobs = []
    for name in ("first", "second"):
        out = tmp_path / name / "sweep.csv"
        out.parent.mkdir()
        assert main(["sweep", "--config", cfg, "--out", str(out), "--quiet"]) == 0
        files = [out] + sorted(out.parent.glob("*.png"))
        blobs.append([f.read_bytes() for f in files])
    assert blobs[0] == blobs[1]
