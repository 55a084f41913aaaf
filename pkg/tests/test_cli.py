"""Command-line surface: exit codes, output routing, config handling."""

import json
from pathlib import Path

import pytest

from sdebench.cli import main
from sdebench.csvio import read_csv


def test_no_command_is_usage_error(capsys):
    assert main([]) == 1
    assert "subcommand is required" in capsys.readouterr().err


def test_unknown_command_is_usage_error(capsys):
    assert main(["frobnicate"]) == 1
    assert "error" in capsys.readouterr().err


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert capsys.readouterr().out.startswith("sdebench ")


def test_simulate_writes_and_prints_paths(tmp_path, capsys):
    out = tmp_path / "run"
    code = main(["simulate", "--out", str(out), "--set", "noise=zero",
                 "--set", "n_steps=4"])
    assert code == 0
    printed = capsys.readouterr().out.strip().splitlines()
    assert printed == [str(out / "simulate.csv")]
    table = read_csv(out / "simulate.csv")
    assert table.float_column("x") == pytest.approx(
        [0.9 ** k for k in range(5)], rel=1e-14)


def test_bad_set_key_is_config_error(tmp_path, capsys):
    code = main(["simulate", "--out", str(tmp_path), "--set", "bogus=1"])
    assert code == 1
    assert "config error" in capsys.readouterr().err


def test_malformed_set_is_config_error(tmp_path, capsys):
    assert main(["simulate", "--out", str(tmp_path), "--set", "novalue"]) \
        == 1
    assert "config error" in capsys.readouterr().err


def test_numeric_failure_exit_code(tmp_path, capsys):
    # EM and MIL second-moment thresholds never cross, so the custom
    # bracket cannot contain a sign change
    code = main(["crossover", "--out", str(tmp_path),
                 "--set", "scheme_a=EM", "--set", "scheme_b=MIL",
                 "--set", "moment=2",
                 "--set", "bracket_lo=0.2", "--set", "bracket_hi=1.3"])
    assert code == 2
    assert "numeric failure" in capsys.readouterr().err


def test_config_file_equivalent_to_flags(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("[experiment]\nname = simulate\n\n[params]\n"
                   "noise = zero\nn_steps = 4\n")
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["simulate", "--config", str(cfg), "--out", str(a)]) == 0
    assert main(["simulate", "--out", str(b), "--set", "noise=zero",
                 "--set", "n_steps=4"]) == 0
    capsys.readouterr()
    assert (a / "simulate.csv").read_bytes() == \
        (b / "simulate.csv").read_bytes()


def test_config_experiment_name_mismatch(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("[experiment]\nname = moments\n")
    assert main(["simulate", "--config", str(cfg), "--out",
                 str(tmp_path)]) == 1
    assert "declares experiment" in capsys.readouterr().err


def test_unknown_config_section_rejected(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("[mystery]\nk = v\n")
    assert main(["simulate", "--config", str(cfg), "--out",
                 str(tmp_path)]) == 1
    assert "unknown config section" in capsys.readouterr().err


def test_missing_config_file(tmp_path, capsys):
    assert main(["simulate", "--config", str(tmp_path / "nope.cfg"),
                 "--out", str(tmp_path)]) == 1


def test_out_env_fallback(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("SDEBENCH_OUT", str(tmp_path / "envout"))
    assert main(["simulate", "--set", "noise=zero",
                 "--set", "n_steps=2"]) == 0
    assert (tmp_path / "envout" / "simulate.csv").exists()


def test_seed_flag_matches_set_override(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["simulate", "--out", str(a), "--seed", "42"]) == 0
    assert main(["simulate", "--out", str(b), "--set", "seed=42"]) == 0
    capsys.readouterr()
    assert (a / "simulate.csv").read_bytes() == \
        (b / "simulate.csv").read_bytes()


def test_equilibrium_subcommand(tmp_path, capsys):
    assert main(["equilibrium", "--out", str(tmp_path),
                 "--set", "eta=1.0", "--set", "n=801"]) == 0
    table = read_csv(tmp_path / "equilibrium_pdf.csv")
    assert len(table.rows) == 801


def test_reproduce_requires_target(tmp_path, capsys):
    assert main(["reproduce", "--out", str(tmp_path)]) == 1
    assert "figure=ID" in capsys.readouterr().err


def test_reproduce_rejects_both_targets(tmp_path, capsys):
    assert main(["reproduce", "--out", str(tmp_path),
                 "--set", "figure=stab",
                 "--set", "experiment=equilibrium"]) == 1
    assert "not both" in capsys.readouterr().err


def test_reproduce_experiment_bundle(tmp_path, capsys):
    code = main(["reproduce", "--out", str(tmp_path),
                 "--set", "experiment=equilibrium", "--set", "eta=0.8"])
    assert code == 0
    printed = Path(capsys.readouterr().out.strip())
    assert printed == tmp_path / "equilibrium" / "manifest.json"
    doc = json.loads(printed.read_text())
    assert doc["files"][0]["params"]["eta"] == "0.8"
    assert (printed.parent / "equilibrium_pdf.csv").exists()


def test_reproduce_figure_via_config(tmp_path, capsys):
    cfg = tmp_path / "fig.cfg"
    cfg.write_text("[experiment]\nfigure = stab\n\n[params]\n"
                   "eta = 0:1.4:3\nscheme = EM\n")
    code = main(["reproduce", "--config", str(cfg), "--out",
                 str(tmp_path / "out")])
    assert code == 0
    printed = Path(capsys.readouterr().out.strip())
    assert printed == tmp_path / "out" / "stab" / "manifest.json"
    names = [f["name"] for f in json.loads(printed.read_text())["files"]]
    assert names == ["stability_boundary.csv", "crossover.csv"]
