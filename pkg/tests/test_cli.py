"""Command-line interface tests."""
import json

import numpy as np
import pytest

from mmsim.cli import main, parse_axis
from mmsim.config import Settings
from mmsim.storage import read_sweep_csv
from mmsim.sweep.presets import PRESET_NAMES


def test_preset_list(capsys):
    """Test listing presets."""
    assert main(["preset", "--list"]) == 0
    out = capsys.readouterr().out.split()
    assert out == list(PRESET_NAMES)


def test_preset_json(capsys):
    """Test printing one preset as JSON."""
    assert main(["preset", "fig3a", "--points", "5"]) == 0
    spec = json.loads(capsys.readouterr().out)
    assert spec["name"] == "fig3a"
    assert spec["axes"][0]["count"] == 5
    assert spec["constraints"]["hop_Gamma"] == 0.5


def test_unknown_preset_exit_code(capsys):
    """Test unknown presets exit with the configuration status."""
    assert main(["preset", "fig7a"]) == 2
    assert "unknown preset" in capsys.readouterr().err


def test_malformed_config_exit_code(tmp_path, capsys):
    """Test malformed TOML exits with status 2 and the error position."""
    bad = tmp_path / "bad.toml"
    bad.write_text("[cavity1\n")
    assert main(["report", "--config", str(bad)]) == 2
    assert "line 1" in capsys.readouterr().err


def test_report_decoupled(tmp_path, capsys):
    """Test a report without hopping prints zero cross-cavity negativity."""
    out_json = tmp_path / "report.json"
    code = main(
        ["report", "--set", "hop_Gamma=0", "--set", "G_target=0.48", "--json", str(out_json)]
    )
    assert code == 0
    out = capsys.readouterr().out
    assert "stability margin" in out
    assert "c1-c2  0.000000" in out
    data = json.loads(out_json.read_text())
    assert data["overrides"] == ["hop_Gamma=0", "G_target=0.48"]
    assert len(data["report"]["values"]) == 15


def test_report_unstable_exit_code(capsys):
    """Test an unstable point exits with status 3 and prints its margin."""
    code = main(
        ["report", "--set", "G_target=0.48", "--set", "Delta_m1=-1", "--set", "Delta_m2=-1"]
    )
    assert code == 3
    captured = capsys.readouterr()
    assert "stability margin" in captured.out
    assert "unstable" in captured.err


def test_dump(tmp_path):
    """Test dumping the matrices of one point."""
    code = main(
        [
            "dump",
            "--set", "G_target=0.2",
            "--dump-matrices", str(tmp_path / "m"),
            "--dump-covariance", str(tmp_path / "V.csv"),
        ]
    )
    assert code == 0
    M = np.loadtxt(tmp_path / "m" / "drift.csv", delimiter=",")
    V = np.loadtxt(tmp_path / "V.csv", delimiter=",")
    assert M.shape == V.shape == (12, 12)
    np.testing.assert_array_equal(V, V.T)


def test_sweep_custom_axis(tmp_path):
    """Test a custom one-axis sweep writes CSV, sidecar and images."""
    out = tmp_path / "sweep" / "line.csv"
    code = main(
        [
            "sweep",
            "--axis", "Delta_sym:-1:1:3",
            "--pairs", "c1-c2,m1-b1",
            "--set", "G_target=0.2",
            "--out", str(out),
            "--render",
        ]
    )
    assert code == 0
    rows = read_sweep_csv(out)
    assert len(rows) == 3
    assert list(rows[0]) == ["Delta_sym", "stability_margin", "flag", "c1-c2", "m1-b1"]
    sidecar = json.loads(out.with_suffix(".json").read_text())
    assert sidecar["overrides"] == ["G_target=0.2"]
    assert (tmp_path / "sweep" / "custom_c1-c2.png").exists()
    assert (tmp_path / "sweep" / "custom_m1-b1.png").exists()


def test_stability_preset(tmp_path):
    """Test a coarse stability sweep of a preset."""
    out = tmp_path / "stab.csv"
    assert main(["stability", "--preset", "fig2a", "--points", "3", "--out", str(out)]) == 0
    rows = read_sweep_csv(out)
    assert len(rows) == 9
    assert list(rows[0]) == ["Delta1", "Delta2", "stability_margin", "flag"]


def test_sweep_unwritable_output(tmp_path):
    """Test an unwritable output path exits with status 4."""
    blocker = tmp_path / "file"
    blocker.write_text("x")
    code = main(
        [
            "sweep",
            "--axis", "Delta1:-1:1:2",
            "--pairs", "c1-c2",
            "--set", "G_target=0.2",
            "--out", str(blocker / "x.csv"),
        ]
    )
    assert code == 4


def test_sweep_needs_axes(capsys):
    """Test sweeps without preset or axes are configuration errors."""
    assert main(["sweep"]) == 2


def test_parse_axis():
    """Test axis strings with and without units."""
    axis = parse_axis("hop_Gamma:0:10:11:kappa_c")
    assert axis.unit == "kappa_c"
    assert axis.count == 11
    assert parse_axis("Delta1:-2:2:5").start == -2.0


def test_report_table1_defaults(capsys):
    """Test the bundled parameters with their B0 drive produce a report."""
    assert main(["report"]) in (0, 3)
    assert "stability margin" in capsys.readouterr().out


def test_report_numerical_failure_exit_code(monkeypatch, capsys):
    """Test a mean-field failure exits with status 1 and names the step."""
    monkeypatch.setattr("mmsim.pipeline.default_settings", Settings(meanfield_max_iter=1))
    assert main(["report"]) == 1
    err = capsys.readouterr().err
    assert "no convergence" in err
    assert "while running step mean_field" in err


def test_help_lists_exit_codes(capsys):
    """Test the help text documents every exit status."""
    with pytest.raises(SystemExit):
        main(["--help"])
    out = capsys.readouterr().out
    assert "exit status" in out
    for code in range(5):
        assert f"  {code}  " in out
