"""Named experiments that turn library calls into CSV artifacts.

Every experiment has a complete string-valued default parameter set, so a
bare run needs no configuration at all.  Parameters arrive as strings
(config file or command-line overrides), are checked against the
experiment's declared keys (unknown keys are rejected), coerced, and echoed
into each output file's metadata, which makes reruns bit-identical.

Figure bundles group one or more experiment runs into a directory plus a
manifest.json describing every emitted file against the frozen column
schemas shipped in this package's manifest.json resource.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Callable

import numpy as np

from ._version import __version__
from .analytics import (benchmark_moment1, benchmark_moment2,
                        equilibrium_moment_exists, equilibrium_pdf,
                        equilibrium_quadrature, gbm_moment)
from .core import SchemeId, benchmark_problem, gbm_problem, simulate_path
from .csvio import CsvTable, write_csv
from .ensemble import (EnsembleConfig, antithetic_coupled_means,
                       noise_stream, run_ensemble, strong_order)
from .errors import ConfigError, NumericOverflowError
from .momentmaps import LinearModelId, iterate_moments, moment_map
from .porous import (LARGE_NOISE_PARAMS, SMALL_NOISE_PARAMS, linearized_eta,
                     porous_problem, right_basin_density, stationary_density,
                     stationary_mean)
from .stability import crossover_eta, trace_boundary

__all__ = [
    "EXPERIMENTS",
    "FIGURES",
    "ExperimentDef",
    "load_schema_manifest",
    "run_experiment",
    "run_experiment_bundle",
    "run_figure",
]

_ALL_SCHEMES = "EM,MIL,SH,RK3"


def load_schema_manifest() -> dict:
    """The frozen table and figure schema shipped with the package."""
    text = resources.files("sdebench").joinpath("manifest.json").read_text(
        encoding="utf-8")
    return json.loads(text)


_SCHEMA = load_schema_manifest()


# ---------------------------------------------------------------------------
# parameter coercion

def _parse_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ConfigError(f"expected a number, got {text!r}") from None
    if not math.isfinite(value):
        raise ConfigError(f"expected a finite number, got {text!r}")
    return value


def _parse_int(text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"expected an integer, got {text!r}") from None


def _parse_float_list(text: str) -> list:
    """Comma list of numbers, or an inclusive range 'lo:hi:count'."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(
                f"range must look like lo:hi:count, got {text!r}")
        lo, hi = _parse_float(parts[0]), _parse_float(parts[1])
        count = _parse_int(parts[2])
        if count < 2 or not hi > lo:
            raise ConfigError(f"bad range {text!r}")
        return [float(v) for v in np.linspace(lo, hi, count)]
    values = [_parse_float(p) for p in text.split(",") if p.strip()]
    if not values:
        raise ConfigError("expected at least one number")
    return values


def _parse_scheme(text: str) -> SchemeId:
    try:
        return SchemeId.parse(text)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _parse_schemes(text: str) -> list:
    schemes = [_parse_scheme(p) for p in text.split(",") if p.strip()]
    if not schemes:
        raise ConfigError("expected at least one scheme")
    return schemes


def _parse_model(text: str) -> LinearModelId:
    try:
        return LinearModelId.parse(text)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _parse_moments(text: str) -> list:
    moments = [_parse_int(p) for p in text.split(",") if p.strip()]
    if not moments or any(m not in (1, 2) for m in moments):
        raise ConfigError(f"moments must be a subset of 1,2, got {text!r}")
    return moments


def _parse_choice(*choices):
    def parse(text: str):
        key = text.strip().lower()
        if key not in choices:
            raise ConfigError(
                f"expected one of {', '.join(choices)}, got {text!r}")
        return key
    return parse


def _parse_choice_list(*choices):
    one = _parse_choice(*choices)
    def parse(text: str):
        values = [one(p) for p in text.split(",") if p.strip()]
        if not values:
            raise ConfigError("expected at least one value")
        return values
    return parse


_POROUS_SETS = {"small": SMALL_NOISE_PARAMS, "large": LARGE_NOISE_PARAMS}


def _sde_problem(model: str, eta: float):
    """Problem lookup for the simulate/moments operations."""
    if model == "benchmark":
        return benchmark_problem(eta)
    if model == "gbm":
        return gbm_problem(eta)
    if model == "porous-small":
        return porous_problem(SMALL_NOISE_PARAMS)
    if model == "porous-large":
        return porous_problem(LARGE_NOISE_PARAMS)
    raise ConfigError(f"unknown model {model!r}")


# ---------------------------------------------------------------------------
# experiment definitions

@dataclass(frozen=True)
class ExperimentDef:
    """One runnable experiment: defaults, coercers and a runner.

    The runner receives the coerced parameters and an _Emitter and returns
    None; everything it writes goes through the emitter so that metadata
    and schema checks are uniform.
    """

    name: str
    defaults: dict
    coercers: dict
    runner: Callable


class _Emitter:
    """Writes schema-checked CSV files with uniform metadata."""

    def __init__(self, experiment: str, params: dict, out_dir: Path):
        self.experiment = experiment
        self.params = params
        self.out_dir = Path(out_dir)
        self.written = []  # list of (filename, table_name)
        self.notes = []    # extra (key, value) metadata lines

    def note(self, key: str, value) -> None:
        self.notes.append((key, value))

    def new_table(self, table_name: str) -> CsvTable:
        columns = _SCHEMA["tables"].get(table_name)
        if columns is None:
            raise KeyError(f"table {table_name!r} is not in the manifest")
        table = CsvTable(columns=list(columns))
        table.add_meta("tool", f"sdebench {__version__}")
        table.add_meta("experiment", self.experiment)
        table.add_meta("table", table_name)
        for key in sorted(self.params):
            table.add_meta(f"param.{key}", self.params[key])
        return table

    def write(self, table: CsvTable, filename: str, table_name: str) -> Path:
        for key, value in self.notes:
            table.add_meta(key, value)
        self.notes = []
        path = write_csv(table, self.out_dir / filename)
        self.written.append((filename, table_name))
        return path


def _resolve_params(exp: ExperimentDef, overrides: dict) -> dict:
    params = dict(exp.defaults)
    for key, value in overrides.items():
        if key not in exp.defaults:
            raise ConfigError(
                f"unknown key {key!r} for experiment {exp.name}; known "
                f"keys: {', '.join(sorted(exp.defaults))}")
        params[key] = str(value)
    return params


def _coerce(exp: ExperimentDef, params: dict) -> dict:
    typed = {}
    for key, value in params.items():
        try:
            typed[key] = exp.coercers[key](value)
        except ConfigError as exc:
            raise ConfigError(f"{exp.name}: key {key!r}: {exc}") from None
    return typed


def run_experiment(name: str, overrides: dict, out_dir) -> list:
    """Run one experiment with string overrides; returns (file, table) pairs.

    Raises:
        ConfigError: unknown experiment, unknown key, or a bad value.
    """
    exp = EXPERIMENTS.get(name)
    if exp is None:
        raise ConfigError(
            f"unknown experiment {name!r}; known: "
            f"{', '.join(sorted(EXPERIMENTS))}")
    params = _resolve_params(exp, overrides)
    typed = _coerce(exp, params)
    emitter = _Emitter(name, params, Path(out_dir))
    exp.runner(typed, emitter)
    return emitter.written


# ---------------------------------------------------------------------------
# runners

def _run_accuracy(p: dict, em: _Emitter) -> None:
    """Late-time moment values of the analytic recurrences versus exact
    equilibrium statistics, per (eta, moment, scheme, h)."""
    table = em.new_table("asymptotic_accuracy")
    model = p["model"]
    for eta in p["eta"]:
        for moment in (1, 2):
            if moment == 2 and model is LinearModelId.BENCHMARK:
                exact = (1.0 / (2.0 - eta * eta)
                         if eta * eta < 2.0 else math.inf)
            elif moment == 2:
                exact = 0.0
            else:
                exact = 0.0
            for scheme in p["scheme"]:
                for h in p["h"]:
                    mmap = moment_map(scheme, model, eta, h)
                    n = round(p["t_final"] / h)
                    try:
                        value = float(
                            iterate_moments(mmap, p["x0"], n)[-1, moment - 1])
                    except NumericOverflowError:
                        value = math.inf
                    abs_err = abs(value - exact)
                    rel_err = (abs_err / abs(exact) if exact != 0.0
                               else math.nan)
                    table.add_row(eta, moment, scheme.value, h, value,
                                  exact, abs_err, rel_err)
    em.write(table, "accuracy.csv", "asymptotic_accuracy")


def _run_moment_evolution(p: dict, em: _Emitter) -> None:
    """Ensemble moment errors against the exact time-dependent moments."""
    table = em.new_table("evolution_error")
    model = p["model"]
    x0 = p["x0"]
    for eta in p["eta"]:
        for h in p["h"]:
            stride = max(1, round(p["record_dt"] / h))
            for scheme in p["scheme"]:
                cfg = EnsembleConfig(scheme=scheme, x0=x0, h=h,
                                     t_final=p["t_final"],
                                     n_traj=p["n_traj"], seed=p["seed"],
                                     output_stride=stride)
                problem = (benchmark_problem(eta)
                           if model is LinearModelId.BENCHMARK
                           else gbm_problem(eta))
                series = run_ensemble(problem, cfg)
                if model is LinearModelId.BENCHMARK:
                    ex1 = benchmark_moment1(series.times, x0)
                    ex2 = benchmark_moment2(series.times, x0, eta)
                else:
                    ex1 = gbm_moment(series.times, x0, eta, 1)
                    ex2 = gbm_moment(series.times, x0, eta, 2)
                for i, t in enumerate(series.times):
                    table.add_row(
                        eta, h, scheme.value, float(t),
                        abs(float(series.mu1[i]) - float(ex1[i])),
                        float(series.se1[i]),
                        abs(float(series.mu2[i]) / float(ex2[i]) - 1.0),
                        float(series.se2[i]) / abs(float(ex2[i])))
                if series.n_blowups:
                    em.note(f"blowups.{scheme.value}.eta{eta:g}.h{h:g}",
                            series.n_blowups)
    em.write(table, "evolution_error.csv", "evolution_error")


def _run_stability_region(p: dict, em: _Emitter) -> None:
    """Largest stable step size along an eta grid, per scheme and moment."""
    table = em.new_table("stability_boundary")
    model = p["model"]
    for scheme in p["scheme"]:
        for moment in p["moment"]:
            boundary = trace_boundary(scheme, model, moment, p["eta"])
            for eta, h_max in zip(boundary.etas, boundary.h_max):
                table.add_row(float(eta), float(h_max), scheme.value,
                              model.value, moment)
            for eta, (lo, hi) in boundary.warnings:
                em.note(
                    f"detached_interval.{scheme.value}.m{moment}",
                    "eta=%.17g lo=%.17g hi=%.17g" % (eta, lo, hi))
    em.write(table, "stability_boundary.csv", "stability_boundary")


_DEFAULT_CROSSOVERS = (
    (1, "RK3", "EM", 0.4, 0.7),
    (2, "RK3", "EM", 0.4, 0.6),
    (2, "RK3", "EM", 1.0, 1.3),
)


def _run_crossover(p: dict, em: _Emitter) -> None:
    """Eta values where two schemes swap stability-region dominance."""
    table = em.new_table("crossover")
    custom = [p[k] for k in ("scheme_a", "scheme_b", "moment",
                             "bracket_lo", "bracket_hi")]
    if any(v != "" for v in custom):
        if any(v == "" for v in custom):
            raise ConfigError(
                "custom crossover needs all of scheme_a, scheme_b, moment, "
                "bracket_lo, bracket_hi")
        rows = [(_parse_int(p["moment"]), p["scheme_a"], p["scheme_b"],
                 _parse_float(p["bracket_lo"]), _parse_float(p["bracket_hi"]))]
    else:
        rows = list(_DEFAULT_CROSSOVERS)
    for moment, name_a, name_b, lo, hi in rows:
        scheme_a = SchemeId.parse(name_a)
        scheme_b = SchemeId.parse(name_b)
        eta = crossover_eta(scheme_a, scheme_b, p["model"], moment, (lo, hi))
        table.add_row(moment, scheme_a.value, scheme_b.value, eta, lo, hi)
    em.write(table, "crossover.csv", "crossover")


def _porous_reference_mean(params_set: str) -> float:
    """Equilibrium mean of the requested coefficient set by quadrature.

    The large-noise set integrates over the basin right of the diffusion
    zero; the small-noise density is quadrature-integrable on the default
    symmetric domain.
    """
    if params_set == "small":
        return stationary_mean(SMALL_NOISE_PARAMS)
    return right_basin_density(LARGE_NOISE_PARAMS).mean


def _run_porous_mean(p: dict, em: _Emitter) -> None:
    """Endpoint mean errors versus the quadrature equilibrium mean.

    Uses antithetic pairs with increments shared across the h ladder, so
    the statistical offset is common to all step sizes and the h-dependence
    of the error is the discretization bias.
    """
    params_set = p["params_set"]
    reference = _porous_reference_mean(params_set)
    problem = porous_problem(_POROUS_SETS[params_set])
    if p["n_traj"] % 2:
        raise ConfigError("n_traj must be even (antithetic pairs)")
    table = em.new_table("porous_mean_error")
    for scheme in p["scheme"]:
        report = antithetic_coupled_means(
            problem, scheme, p["x0"], p["t_final"], p["h"],
            n_pairs=p["n_traj"] // 2, seed=p["seed"])
        for h, mean, se in zip(report.h_values, report.means, report.ses):
            table.add_row(float(h), abs(float(mean) - reference), float(se),
                          scheme.value)
    em.note("reference_mean", reference)
    em.note("estimator", "antithetic pairs, increments shared across h")
    em.write(table, f"porous_mean_error_{params_set}.csv",
             "porous_mean_error")


def _run_porous_paths(p: dict, em: _Emitter) -> None:
    """Ensemble mean paths at a fine and a coarse step size."""
    table = em.new_table("porous_paths")
    for params_set in p["params_set"]:
        problem = porous_problem(_POROUS_SETS[params_set])
        reference = _porous_reference_mean(params_set)
        final_err = {}
        for scheme in p["scheme"]:
            for h in p["h"]:
                stride = max(1, round(p["record_dt"] / h))
                cfg = EnsembleConfig(scheme=scheme, x0=p["x0"], h=h,
                                     t_final=p["t_final"],
                                     n_traj=p["n_traj"], seed=p["seed"],
                                     output_stride=stride)
                series = run_ensemble(problem, cfg)
                for i, t in enumerate(series.times):
                    table.add_row(params_set, scheme.value, h, float(t),
                                  float(series.mu1[i]),
                                  float(series.se1[i]), series.n_blowups)
                final_err[(scheme, h)] = abs(float(series.mu1[-1])
                                             - reference)
        em.note(f"reference_mean.{params_set}", reference)
        h_fine = min(p["h"])
        for scheme in p["scheme"]:
            for h in p["h"]:
                if h == h_fine:
                    continue
                fine = final_err[(scheme, h_fine)]
                coarse = final_err[(scheme, h)]
                if coarse > 10.0 * fine:
                    em.note(
                        f"unstable.{params_set}.{scheme.value}",
                        "final mean error at h=%g is %.1fx the h=%g error"
                        % (h, coarse / fine, h_fine))
    em.write(table, "porous_paths.csv", "porous_paths")


def _run_strong_order(p: dict, em: _Emitter) -> None:
    """Pathwise self-convergence against a refined reference level."""
    table = em.new_table("strong_order")
    problem = benchmark_problem(p["eta"])
    for scheme in p["scheme"]:
        report = strong_order(problem, scheme, p["x0"], p["t_final"],
                              p["h"], n_traj=p["n_traj"], seed=p["seed"],
                              refine_factor=p["refine_factor"])
        for h, err in zip(report.h_values, report.rms_errors):
            table.add_row(scheme.value, float(h), float(err))
        em.note(f"fitted_slope.{scheme.value}", report.fitted_slope)
        em.note(f"h_ref.{scheme.value}", report.h_ref)
    em.write(table, "strong_order.csv", "strong_order")


def _write_moment_run(p: dict, em: _Emitter, problem, model: str,
                      eta: float) -> None:
    stride = max(1, round(p["record_dt"] / p["h"]))
    cfg = EnsembleConfig(scheme=p["scheme"], x0=p["x0"], h=p["h"],
                         t_final=p["t_final"], n_traj=p["n_traj"],
                         seed=p["seed"], output_stride=stride)
    series = run_ensemble(problem, cfg)
    table = em.new_table("ensemble_moments")
    for i, t in enumerate(series.times):
        table.add_row(float(t), float(series.mu1[i]), float(series.se1[i]),
                      float(series.mu2[i]), float(series.se2[i]),
                      series.n_blowups)
    em.write(table, "moments.csv", "ensemble_moments")
    if model in ("benchmark", "gbm"):
        exact = em.new_table("exact_moments")
        if model == "benchmark":
            ex1 = benchmark_moment1(series.times, p["x0"])
            ex2 = benchmark_moment2(series.times, p["x0"], eta)
        else:
            ex1 = gbm_moment(series.times, p["x0"], eta, 1)
            ex2 = gbm_moment(series.times, p["x0"], eta, 2)
        for i, t in enumerate(series.times):
            exact.add_row(float(t), float(ex1[i]), float(ex2[i]))
        em.write(exact, "moments_exact.csv", "exact_moments")


def _run_moments(p: dict, em: _Emitter) -> None:
    """One ensemble moment run plus exact references where they exist."""
    problem = _sde_problem(p["model"], p["eta"])
    _write_moment_run(p, em, problem, p["model"], p["eta"])


def _run_gbm_check(p: dict, em: _Emitter) -> None:
    """Ensemble moments for the multiplicative-noise test equation."""
    _write_moment_run(p, em, gbm_problem(p["eta"]), "gbm", p["eta"])


def _run_simulate(p: dict, em: _Emitter) -> None:
    """Individual trajectories on a uniform grid, one CSV for all of them."""
    problem = _sde_problem(p["model"], p["eta"])
    table = em.new_table("path")
    for traj in range(p["n_traj"]):
        if p["noise"] == "zero":
            noise = ((0.0, 0.0) for _ in range(p["n_steps"]))
        else:
            noise = noise_stream(p["seed"], traj, p["h"])
        path = simulate_path(p["scheme"], problem, p["x0"], p["h"],
                             p["n_steps"], noise)
        for k in range(len(path.times)):
            table.add_row(traj, k, float(path.times[k]),
                          float(path.states[k]))
    em.write(table, "simulate.csv", "path")


def _auto_pdf_domain(eta: float) -> tuple:
    """An x interval covering the equilibrium density down to ~1e-15."""
    if eta == 0.0:
        return (-6.0, 6.0)
    e = abs(eta)
    edge = -1.0 / e + 1e-9
    # algebraic tail: pdf ~ u^-(2 + 2/eta^2); pick u where it reaches 1e-15
    u_hi = (1e15) ** (1.0 / (2.0 + 2.0 / (e * e)))
    hi = max((u_hi - 1.0) / e, 6.0)
    if eta > 0:
        return (edge, hi)
    return (-hi, -edge)


def _run_equilibrium(p: dict, em: _Emitter) -> None:
    """Tabulated equilibrium density plus quadrature checks in metadata."""
    eta = p["eta"]
    if p["lo"] == "" or p["hi"] == "":
        lo, hi = _auto_pdf_domain(eta)
    else:
        lo, hi = _parse_float(p["lo"]), _parse_float(p["hi"])
    xs = np.linspace(lo, hi, p["n"])
    pdf = equilibrium_pdf(eta, xs)
    table = em.new_table("density")
    for x, v in zip(xs, pdf):
        table.add_row(float(x), float(v))
    em.note("quadrature_norm", equilibrium_quadrature(eta, 0))
    for k in (1, 2):
        if equilibrium_moment_exists(eta, k):
            em.note(f"quadrature_moment{k}", equilibrium_quadrature(eta, k))
    em.write(table, "equilibrium_pdf.csv", "density")


def _run_porous_density(p: dict, em: _Emitter) -> None:
    """Stationary density of the saturating-coefficient example."""
    params_set = p["params_set"]
    params = _POROUS_SETS[params_set]
    dx = _parse_float(p["dx"]) if p["dx"] != "" else (
        0.0025 if params_set == "small" else 0.00125)
    if params_set == "large" or p["domain"] == "basin":
        grid = right_basin_density(params, hi=p["hi"], dx=dx)
        em.note("domain", "right basin only; diffusion vanishes below it")
    else:
        grid = stationary_density(porous_problem(params), p["lo"], p["hi"],
                                  dx)
    table = em.new_table("density")
    stride = max(1, p["out_stride"])
    n = len(grid.x)
    for i in range(0, n, stride):
        table.add_row(float(grid.x[i]), float(grid.p[i]))
    if (n - 1) % stride:
        table.add_row(float(grid.x[-1]), float(grid.p[-1]))
    em.note("mean", grid.mean)
    em.note("linearized_eta", linearized_eta(params))
    em.write(table, f"porous_density_{params_set}.csv", "density")


# ---------------------------------------------------------------------------
# registry

_LADDER_H = "0.1,0.05,0.025,0.0125,0.00625,0.003125,0.0015625"
_POROUS_H = "0.01,0.02,0.04,0.08,0.16,0.32,0.64"
_STRONG_H = ("0.0625,0.03125,0.015625,0.0078125,0.00390625,0.001953125")

_RAW = str  # keep as-is; runner handles it


def _define(name, runner, **keys) -> ExperimentDef:
    defaults = {}
    coercers = {}
    for key, (default, coerce) in keys.items():
        defaults[key] = default
        coercers[key] = coerce
    return ExperimentDef(name=name, defaults=defaults, coercers=coercers,
                         runner=runner)


EXPERIMENTS = {exp.name: exp for exp in [
    _define(
        "accuracy-asymptotic", _run_accuracy,
        model=("benchmark", _parse_model),
        scheme=(_ALL_SCHEMES, _parse_schemes),
        eta=("0.1,1.412", _parse_float_list),
        h=(_LADDER_H, _parse_float_list),
        t_final=("200", _parse_float),
        x0=("1", _parse_float),
    ),
    _define(
        "moment-evolution", _run_moment_evolution,
        model=("benchmark", _parse_model),
        scheme=(_ALL_SCHEMES, _parse_schemes),
        eta=("0.1,1.41", _parse_float_list),
        h=("0.001,0.005,0.025", _parse_float_list),
        t_final=("20", _parse_float),
        n_traj=("10000", _parse_int),
        record_dt=("0.5", _parse_float),
        x0=("1", _parse_float),
        seed=("5", _parse_int),
    ),
    _define(
        "stability-region", _run_stability_region,
        model=("benchmark", _parse_model),
        scheme=(_ALL_SCHEMES, _parse_schemes),
        moment=("1,2", _parse_moments),
        eta=("0:1.45:30", _parse_float_list),
    ),
    _define(
        "crossover", _run_crossover,
        model=("benchmark", _parse_model),
        scheme_a=("", _RAW),
        scheme_b=("", _RAW),
        moment=("", _RAW),
        bracket_lo=("", _RAW),
        bracket_hi=("", _RAW),
    ),
    _define(
        "porous-mean", _run_porous_mean,
        params_set=("small", _parse_choice("small", "large")),
        scheme=(_ALL_SCHEMES, _parse_schemes),
        h=(_POROUS_H, _parse_float_list),
        t_final=("16", _parse_float),
        n_traj=("40000", _parse_int),
        x0=("1", _parse_float),
        seed=("47", _parse_int),
    ),
    _define(
        "porous-paths", _run_porous_paths,
        params_set=("small,large", _parse_choice_list("small", "large")),
        scheme=(_ALL_SCHEMES, _parse_schemes),
        h=("1.0,0.01", _parse_float_list),
        t_final=("16", _parse_float),
        n_traj=("40000", _parse_int),
        record_dt=("1.0", _parse_float),
        x0=("2", _parse_float),
        seed=("101", _parse_int),
    ),
    _define(
        "strong-order", _run_strong_order,
        eta=("0.5", _parse_float),
        scheme=(_ALL_SCHEMES, _parse_schemes),
        h=(_STRONG_H, _parse_float_list),
        t_final=("1", _parse_float),
        n_traj=("2000", _parse_int),
        refine_factor=("4", _parse_int),
        x0=("1", _parse_float),
        seed=("7", _parse_int),
    ),
    _define(
        "gbm-check", _run_gbm_check,
        eta=("1.0", _parse_float),
        scheme=("EM", _parse_scheme),
        h=("0.1", _parse_float),
        t_final=("10", _parse_float),
        n_traj=("10000", _parse_int),
        record_dt=("0.5", _parse_float),
        x0=("1", _parse_float),
        seed=("156", _parse_int),
    ),
    _define(
        "simulate", _run_simulate,
        model=(
            "benchmark",
            _parse_choice("benchmark", "gbm", "porous-small",
                          "porous-large")),
        eta=("0", _parse_float),
        scheme=("EM", _parse_scheme),
        h=("0.1", _parse_float),
        n_steps=("50", _parse_int),
        n_traj=("1", _parse_int),
        x0=("1", _parse_float),
        seed=("0", _parse_int),
        noise=("gauss", _parse_choice("gauss", "zero")),
    ),
    _define(
        "moments", _run_moments,
        model=(
            "benchmark",
            _parse_choice("benchmark", "gbm", "porous-small",
                          "porous-large")),
        eta=("0.5", _parse_float),
        scheme=("EM", _parse_scheme),
        h=("0.01", _parse_float),
        t_final=("10", _parse_float),
        n_traj=("10000", _parse_int),
        record_dt=("0.5", _parse_float),
        x0=("1", _parse_float),
        seed=("1", _parse_int),
    ),
    _define(
        "equilibrium", _run_equilibrium,
        eta=("0.5", _parse_float),
        lo=("", _RAW),
        hi=("", _RAW),
        n=("4001", _parse_int),
    ),
    _define(
        "porous", _run_porous_density,
        params_set=("small", _parse_choice("small", "large")),
        domain=("full", _parse_choice("full", "basin")),
        lo=("-100", _parse_float),
        hi=("100", _parse_float),
        dx=("", _RAW),
        out_stride=("20", _parse_int),
    ),
]}


# ---------------------------------------------------------------------------
# figure bundles

@dataclass(frozen=True)
class FigureRun:
    """One experiment invocation inside a figure bundle."""

    experiment: str
    presets: dict


FIGURES = {
    "accuracy": (FigureRun("accuracy-asymptotic", {}),),
    "1stMom": (FigureRun("moment-evolution", {}),),
    "2ndMom": (FigureRun("moment-evolution", {}),),
    "stab": (FigureRun("stability-region", {}),
             FigureRun("crossover", {})),
    "1d_porousM_mean": (FigureRun("porous-mean", {"params_set": "small"}),
                        FigureRun("porous-mean", {"params_set": "large"})),
    "fine_vs_coarse": (FigureRun("porous-paths", {}),),
}


def _write_bundle_manifest(out_dir: Path, head: dict, files: list) -> Path:
    bundle = dict(head)
    bundle["schema_version"] = _SCHEMA["schema_version"]
    bundle["tool"] = f"sdebench {__version__}"
    bundle["files"] = files
    path = Path(out_dir) / "manifest.json"
    path.write_text(json.dumps(bundle, indent=2, sort_keys=True) + "\n",
                    encoding="utf-8")
    return path


def run_experiment_bundle(name: str, overrides: dict, out_dir) -> Path:
    """Run one experiment and write a bundle manifest beside its files."""
    exp = EXPERIMENTS.get(name)
    if exp is None:
        raise ConfigError(
            f"unknown experiment {name!r}; known: "
            f"{', '.join(sorted(EXPERIMENTS))}")
    out_dir = Path(out_dir)
    written = run_experiment(name, overrides, out_dir)
    params = _resolve_params(exp, overrides)
    files = [{
        "name": filename,
        "table": table_name,
        "columns": list(_SCHEMA["tables"][table_name]),
        "experiment": name,
        "params": params,
    } for filename, table_name in written]
    return _write_bundle_manifest(out_dir, {"experiment": name}, files)


def run_figure(figure_id: str, overrides: dict, out_dir) -> Path:
    """Run all experiments behind one figure id and write its manifest.

    User overrides are applied on top of each run's presets; keys unknown
    to a given experiment are only legal if another run of this figure
    accepts them, otherwise the usual unknown-key rejection applies.

    Returns the path of the bundle manifest.
    """
    runs = FIGURES.get(figure_id)
    if runs is None:
        raise ConfigError(
            f"unknown figure {figure_id!r}; known: "
            f"{', '.join(sorted(FIGURES))}")
    known = set()
    for run in runs:
        known |= set(EXPERIMENTS[run.experiment].defaults)
    for key in overrides:
        if key not in known:
            raise ConfigError(
                f"unknown key {key!r} for figure {figure_id}; known keys: "
                f"{', '.join(sorted(known))}")
    out_dir = Path(out_dir)
    files = []
    for run in runs:
        exp = EXPERIMENTS[run.experiment]
        merged = dict(run.presets)
        merged.update({k: v for k, v in overrides.items()
                       if k in exp.defaults})
        written = run_experiment(run.experiment, merged, out_dir)
        params = _resolve_params(exp, merged)
        for filename, table_name in written:
            files.append({
                "name": filename,
                "table": table_name,
                "columns": list(_SCHEMA["tables"][table_name]),
                "experiment": run.experiment,
                "params": params,
            })
    return _write_bundle_manifest(out_dir, {"figure": figure_id}, files)
