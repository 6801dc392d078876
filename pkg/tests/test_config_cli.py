import json
import subprocess
import sys

import pytest

from lwrfront.cli import main
from lwrfront.config import load_config, parse_config
from lwrfront.errors import ConfigError

CASE1 = {
    "network": {"boundaries": [], "gamma": [1.0], "v_b": [0.3]},
    "alpha": 0.6,
    "y0": 0.0,
    "initial": {"left": 0.4, "pieces": []},
    "t_end": 1.0,
    "snapshots": [0.5, 1.0],
}


def write_cfg(tmp_path, doc, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return p


# -- config loading -----------------------------------------------------------


def test_minimal_config_defaults(tmp_path):
    cfg = load_config(write_cfg(tmp_path, CASE1))
    assert cfg.front_cap == 10**6
    assert cfg.tolerances.collision == 1e-12
    assert cfg.tolerances.constraint == 1e-8
    assert cfg.n is None


def test_non_dyadic_gamma_rejected(tmp_path):
    doc = dict(CASE1, network={"boundaries": [], "gamma": [0.3], "v_b": [0.1]})
    with pytest.raises(ConfigError, match="not dyadic"):
        load_config(write_cfg(tmp_path, doc))


def test_alpha_out_of_range_rejected(tmp_path):
    doc = dict(CASE1, alpha=1.2)
    with pytest.raises(ConfigError, match="alpha"):
        load_config(write_cfg(tmp_path, doc))


def test_profile_value_rejected():
    with pytest.raises(ConfigError, match="outside"):
        parse_config(dict(CASE1, initial={"left": 1.4, "pieces": []}))


def test_parse_error_has_line_context(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{\n  "network": }\n')
    with pytest.raises(ConfigError, match="line 2"):
        load_config(p)


def test_vb_must_be_below_gamma():
    doc = dict(CASE1, network={"boundaries": [], "gamma": [1.0], "v_b": [1.0]})
    with pytest.raises(ConfigError, match="v_b"):
        parse_config(doc)


# -- CLI ----------------------------------------------------------------------


def test_cmd_run_case1(tmp_path, capsys):
    cfg = write_cfg(tmp_path, CASE1)
    out = tmp_path / "run"
    assert main(["run", "--config", str(cfg), "--out", str(out)]) == 0
    for name in (
        "events.tsv",
        "fronts.tsv",
        "snapshots.tsv",
        "trajectory.tsv",
        "diagnostics.tsv",
        "grid.tsv",
        "summary.json",
    ):
        assert (out / name).exists()
    summary = json.loads((out / "summary.json").read_text())
    assert summary["temple_monotone"] is True
    assert summary["config"]["alpha"] == 0.6


def test_cmd_run_below_minimal_level(tmp_path, capsys):
    cfg = write_cfg(tmp_path, CASE1)
    code = main(["run", "--config", str(cfg), "--n", "2", "--out", str(tmp_path / "x")])
    assert code == 2
    assert "level below minimal" in capsys.readouterr().err


def test_cmd_run_empty_profile(tmp_path):
    doc = dict(CASE1, initial={"left": 0.05, "pieces": []})
    cfg = write_cfg(tmp_path, doc)
    assert main(["run", "--config", str(cfg), "--out", str(tmp_path / "r")]) == 0


def test_cmd_run_determinism(tmp_path):
    cfg = write_cfg(tmp_path, CASE1)
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["run", "--config", str(cfg), "--out", str(a)]) == 0
    assert main(["run", "--config", str(cfg), "--out", str(b)]) == 0
    for name in ("events.tsv", "snapshots.tsv", "trajectory.tsv", "fronts.tsv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_cmd_riemann_prints_waves(capsys):
    code = main(
        [
            "riemann", "--gamma-l", "1.0", "--gamma-r", "1.0",
            "--rho-l", "0.2", "--rho-r", "0.8",
        ]
    )
    assert code == 0
    out = capsys.readouterr().out
    assert "shock" in out


def test_cmd_riemann_constrained(capsys):
    code = main(
        [
            "riemann", "--gamma-l", "1.0", "--gamma-r", "1.0",
            "--rho-l", "0.4", "--rho-r", "0.4",
            "--constrained", "--vb", "0.25", "--alpha", "0.75",
        ]
    )
    assert code == 0
    out = capsys.readouterr().out
    assert "case 1" in out
    assert "non_classical" in out


def test_cmd_grid_dump(tmp_path, capsys):
    cfg = write_cfg(tmp_path, CASE1)
    assert main(["grid", "--config", str(cfg), "--dump"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("region\tindex\tz\trho\ttag")
    assert "rho_hat" in out and "rho_check" in out and "rho_star" in out


def test_cmd_converge(tmp_path, capsys):
    doc = dict(CASE1, initial={"left": 0.41, "pieces": [[0.8, 0.37]]})
    cfg = write_cfg(tmp_path, doc)
    out = tmp_path / "conv"
    assert main(["converge", "--config", str(cfg), "--levels", "6,7,8", "--out", str(out)]) == 0
    report = json.loads((out / "convergence.json").read_text())
    assert report["levels"] == [6, 7, 8]
    assert report["distances_decreasing"] is True


def test_cli_entry_point_subprocess(tmp_path):
    cfg = write_cfg(tmp_path, CASE1)
    proc = subprocess.run(
        [sys.executable, "-m", "lwrfront.cli", "run", "--config", str(cfg), "--out", str(tmp_path / "o")],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr


def test_cli_missing_config_exit_code():
    assert main(["run", "--config", "/nonexistent.json"]) == 2
