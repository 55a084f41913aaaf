"""Experiment registry, CSV emission, and bundle manifests."""

import json
import math
from pathlib import Path

import numpy as np
import pytest

from sdebench import ConfigError, benchmark_moment2
from sdebench.csvio import read_csv
from sdebench.experiments import (EXPERIMENTS, FIGURES, load_schema_manifest,
                                  run_experiment, run_experiment_bundle,
                                  run_figure)


def _run(name, overrides, out_dir):
    """Run and read everything back through the public CSV interface."""
    written = run_experiment(name, overrides, out_dir)
    tables = {f: read_csv(Path(out_dir) / f) for f, _ in written}
    return written, tables


def _meta(table):
    return dict(table.metadata)


def test_schema_manifest_is_consistent():
    schema = load_schema_manifest()
    assert schema["schema_version"] == 1
    assert set(schema["figures"]) == set(FIGURES)
    for fig_id, fig in schema["figures"].items():
        # distinct experiments, in first-use order
        assert list(dict.fromkeys(run.experiment
                                  for run in FIGURES[fig_id])) == \
            fig["experiments"]
        for exp in fig["experiments"]:
            assert exp in EXPERIMENTS
        for f in fig["files"]:
            assert f["table"] in schema["tables"]


def test_unknown_experiment_and_key_rejected(tmp_path):
    with pytest.raises(ConfigError):
        run_experiment("no-such-thing", {}, tmp_path)
    with pytest.raises(ConfigError):
        run_experiment("simulate", {"bogus": "1"}, tmp_path)


def test_simulate_zero_noise_path(tmp_path):
    written, tables = _run("simulate",
                           {"noise": "zero", "n_steps": "5"}, tmp_path)
    assert written == [("simulate.csv", "path")]
    table = tables["simulate.csv"]
    assert table.columns == load_schema_manifest()["tables"]["path"]
    xs = table.float_column("x")
    assert xs == pytest.approx([0.9 ** k for k in range(6)], rel=1e-14)
    assert table.column("traj") == ["0"] * 6
    assert table.float_column("t") == pytest.approx(
        [0.1 * k for k in range(6)])


def test_simulate_metadata_records_params(tmp_path):
    _, tables = _run("simulate", {"seed": "12"}, tmp_path)
    meta = _meta(tables["simulate.csv"])
    assert meta["table"] == "path"
    assert meta["experiment"] == "simulate"
    assert meta["param.seed"] == "12"
    assert meta["param.scheme"] == "EM"  # default, recorded explicitly
    assert meta["tool"].startswith("sdebench ")


def test_moments_with_exact_reference(tmp_path):
    written, tables = _run(
        "moments", {"eta": "0.5", "h": "0.05", "t_final": "1",
                    "n_traj": "400", "record_dt": "0.25", "seed": "3"},
        tmp_path)
    assert [w[0] for w in written] == ["moments.csv", "moments_exact.csv"]
    schema = load_schema_manifest()["tables"]
    mom = tables["moments.csv"]
    exact = tables["moments_exact.csv"]
    assert mom.columns == schema["ensemble_moments"]
    assert exact.columns == schema["exact_moments"]
    times = mom.float_column("t")
    assert times == pytest.approx([0.0, 0.25, 0.5, 0.75, 1.0])
    assert exact.float_column("mu1_exact") == pytest.approx(
        np.exp(-np.asarray(times)), rel=1e-12)
    assert exact.float_column("mu2_exact") == pytest.approx(
        benchmark_moment2(np.asarray(times), 1.0, 0.5), rel=1e-12)
    # ensemble stays within a loose Monte Carlo + discretization band
    mu1 = np.asarray(mom.float_column("mu1"))
    se1 = np.asarray(mom.float_column("se1"))
    assert np.all(np.abs(mu1 - np.exp(-np.asarray(times)))[1:]
                  < 6.0 * se1[1:] + 0.06)


def test_moments_without_exact_reference(tmp_path):
    written, _ = _run(
        "moments", {"model": "porous-small", "h": "0.1", "t_final": "0.5",
                    "n_traj": "16", "record_dt": "0.5"}, tmp_path)
    assert [w[0] for w in written] == ["moments.csv"]


def test_equilibrium_density_normalized(tmp_path):
    written, tables = _run("equilibrium", {}, tmp_path)
    assert written == [("equilibrium_pdf.csv", "density")]
    table = tables["equilibrium_pdf.csv"]
    x = np.asarray(table.float_column("x"))
    pdf = np.asarray(table.float_column("pdf"))
    assert np.trapezoid(pdf, x) == pytest.approx(1.0, abs=1e-6)
    assert _meta(table)["param.eta"] == "0.5"


def test_crossover_default_rows(tmp_path):
    _, tables = _run("crossover", {}, tmp_path)
    table = tables["crossover.csv"]
    assert table.column("moment") == ["1", "2", "2"]
    got = table.float_column("eta_cross")
    assert got == pytest.approx([0.5243240356445313, 0.5036956787109375,
                                 1.1468460083007812], abs=1e-4)


def test_crossover_custom_needs_all_fields(tmp_path):
    with pytest.raises(ConfigError):
        run_experiment("crossover", {"scheme_a": "EM"}, tmp_path)


def test_stability_region_closed_form_column(tmp_path):
    _, tables = _run(
        "stability-region",
        {"scheme": "EM", "moment": "2", "eta": "0:1.2:7"}, tmp_path)
    table = tables["stability_boundary.csv"]
    etas = np.asarray(table.float_column("eta"))
    h_max = np.asarray(table.float_column("h_max"))
    assert len(etas) == 7
    assert h_max == pytest.approx(2.0 - etas ** 2, abs=1e-8)
    assert set(table.column("scheme")) == {"EM"}
    assert set(table.column("model")) == {"BENCHMARK"}


def test_strong_order_rows_and_slope_notes(tmp_path):
    _, tables = _run(
        "strong-order", {"scheme": "EM,MIL", "h": "0.0625,0.03125",
                         "n_traj": "64"}, tmp_path)
    table = tables["strong_order.csv"]
    assert len(table.rows) == 4
    meta = _meta(table)
    assert float(meta["fitted_slope.EM"]) > 0.2
    assert float(meta["fitted_slope.MIL"]) > 0.5
    assert float(meta["h_ref.EM"]) == pytest.approx(0.03125 / 4)


def test_porous_density_basin_strided(tmp_path):
    written, tables = _run(
        "porous", {"params_set": "large", "domain": "basin"}, tmp_path)
    assert written == [("porous_density_large.csv", "density")]
    table = tables["porous_density_large.csv"]
    x = np.asarray(table.float_column("x"))
    pdf = np.asarray(table.float_column("pdf"))
    assert np.all(pdf >= 0.0)
    # stride-20 output still integrates to ~1
    assert np.trapezoid(pdf, x) == pytest.approx(1.0, abs=1e-4)
    meta = _meta(table)
    assert float(meta["mean"]) == pytest.approx(1.1785305394487167,
                                                abs=1e-9)
    assert float(meta["linearized_eta"]) == pytest.approx(
        1.1266883166974138, abs=1e-12)


def test_bundle_manifest_contents(tmp_path):
    manifest_path = run_experiment_bundle("equilibrium", {"eta": "1.0"},
                                          tmp_path / "b")
    assert manifest_path.name == "manifest.json"
    doc = json.loads(manifest_path.read_text())
    assert doc["schema_version"] == 1
    assert doc["tool"].startswith("sdebench ")
    (entry,) = doc["files"]
    assert entry["name"] == "equilibrium_pdf.csv"
    assert entry["table"] == "density"
    assert entry["columns"] == ["x", "pdf"]
    assert entry["experiment"] == "equilibrium"
    assert entry["params"]["eta"] == "1.0"
    assert (manifest_path.parent / entry["name"]).exists()


def test_bundle_reruns_byte_identical(tmp_path):
    args = ("simulate", {"n_steps": "20", "seed": "9"})
    a = run_experiment_bundle(*args, tmp_path / "a")
    b = run_experiment_bundle(*args, tmp_path / "b")
    csv_a = (a.parent / "simulate.csv").read_bytes()
    csv_b = (b.parent / "simulate.csv").read_bytes()
    assert csv_a == csv_b
    assert a.read_bytes() == b.read_bytes()


def test_run_figure_unknown_inputs(tmp_path):
    with pytest.raises(ConfigError):
        run_figure("not-a-figure", {}, tmp_path)
    with pytest.raises(ConfigError):
        run_figure("stab", {"bogus": "1"}, tmp_path)


def test_run_figure_stability_bundle(tmp_path):
    manifest_path = run_figure("stab", {"eta": "0:1.4:4", "scheme": "EM,SH"},
                               tmp_path / "stab")
    doc = json.loads(manifest_path.read_text())
    names = [f["name"] for f in doc["files"]]
    assert names == ["stability_boundary.csv", "crossover.csv"]
    exps = [f["experiment"] for f in doc["files"]]
    assert exps == ["stability-region", "crossover"]
    for f in doc["files"]:
        table = read_csv(manifest_path.parent / f["name"])
        assert table.columns == f["columns"]
    # the eta override only reaches the run that declares the key
    boundary = read_csv(manifest_path.parent / "stability_boundary.csv")
    assert len(set(boundary.column("eta"))) == 4
