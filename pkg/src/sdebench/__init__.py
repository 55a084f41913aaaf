"""sdebench: explicit stochastic integrators with exactly solvable benchmarks.

The package bundles four explicit schemes for scalar Ito SDEs, a
one-parameter linear benchmark whose transient and equilibrium statistics
are known in closed form, exact per-step moment recurrences for every
scheme on that benchmark (and on its purely multiplicative variant),
numerical stability atlases derived from those recurrences, a vectorized
Monte Carlo engine with counter-based per-trajectory noise, and a
nonlinear saturating-transport example with a quadrature stationary
density.  The command line front end (`sdebench`) reproduces the standard
experiment set as CSV bundles.
"""

from .analytics import (
    AffineSde,
    Benchmark,
    Gbm,
    RescaleTransform,
    TranslatedBrownian,
    UnitDriftMultiplicative,
    benchmark_moment1,
    benchmark_moment2,
    equilibrium_log_pdf,
    equilibrium_moment,
    equilibrium_moment_exists,
    equilibrium_pdf,
    equilibrium_quadrature,
    eta_from_moment2,
    gbm_moment,
    moment2_growth_rate,
    reduce_affine,
)
from .core import (
    NoiseDraw,
    Path,
    SCHEME_STAGE_COUNTS,
    SchemeId,
    SdeProblem,
    aux_drift,
    benchmark_problem,
    check_derivatives,
    gbm_problem,
    simulate_path,
    step,
    step_kernel,
)
from .config import (
    apply_override,
    parse_config,
    parse_config_file,
    serialize_config,
)
from .csvio import (
    CsvTable,
    read_csv,
    write_csv,
)
from .ensemble import (
    CoupledMeanReport,
    EnsembleConfig,
    MomentSeries,
    StrongErrorReport,
    affine_mean_step,
    antithetic_coupled_means,
    noise_stream,
    run_ensemble,
    strong_order,
    trajectory_increments,
)
from .errors import (
    BracketError,
    ConfigError,
    DegenerateSdeError,
    DiffusionSignError,
    DomainTooSmallError,
    EnsembleCollapseError,
    Error,
    NumericOverflowError,
    StabilityDomainError,
)
from .momentmaps import (
    FixedPoint,
    LinearModelId,
    MomentMap,
    amplification,
    asymptotic_bias,
    fixed_point,
    is_stable,
    iterate_moments,
    moment_map,
)
from .porous import (
    DensityGrid,
    LARGE_NOISE_PARAMS,
    PorousParams,
    SMALL_NOISE_PARAMS,
    diffusion_zero,
    linearized_eta,
    linearized_problem,
    porous_problem,
    right_basin_density,
    stationary_density,
    stationary_mean,
)
from .experiments import (
    EXPERIMENTS,
    FIGURES,
    load_schema_manifest,
    run_experiment,
    run_experiment_bundle,
    run_figure,
)
from .stability import (
    RegionGrid,
    StabilityBoundary,
    crossover_eta,
    max_stable_h,
    region_grid,
    scan_stable_intervals,
    trace_boundary,
)

from ._version import __version__

__all__ = [
    "__version__",
    # errors
    "Error", "NumericOverflowError", "StabilityDomainError",
    "DegenerateSdeError", "DiffusionSignError", "DomainTooSmallError",
    "EnsembleCollapseError", "BracketError", "ConfigError",
    # core
    "SchemeId", "SCHEME_STAGE_COUNTS", "NoiseDraw", "SdeProblem", "Path",
    "benchmark_problem", "gbm_problem", "aux_drift", "step_kernel", "step",
    "simulate_path", "check_derivatives",
    # analytics
    "AffineSde", "RescaleTransform", "Benchmark", "Gbm",
    "UnitDriftMultiplicative", "TranslatedBrownian", "reduce_affine",
    "equilibrium_log_pdf", "equilibrium_pdf", "equilibrium_moment_exists",
    "equilibrium_moment", "equilibrium_quadrature",
    "benchmark_moment1", "benchmark_moment2",
    "moment2_growth_rate", "eta_from_moment2", "gbm_moment",
    # moment maps
    "LinearModelId", "MomentMap", "FixedPoint", "moment_map",
    "iterate_moments", "amplification", "is_stable", "fixed_point",
    "asymptotic_bias",
    # stability
    "StabilityBoundary", "RegionGrid", "scan_stable_intervals",
    "max_stable_h", "trace_boundary", "region_grid", "crossover_eta",
    # ensemble
    "EnsembleConfig", "MomentSeries", "StrongErrorReport",
    "CoupledMeanReport", "affine_mean_step", "antithetic_coupled_means",
    "trajectory_increments", "noise_stream", "run_ensemble", "strong_order",
    # porous
    "PorousParams", "DensityGrid", "LARGE_NOISE_PARAMS",
    "SMALL_NOISE_PARAMS", "porous_problem", "linearized_eta",
    "linearized_problem",
    "stationary_density", "stationary_mean", "right_basin_density",
    "diffusion_zero",
    # artifacts
    "CsvTable", "read_csv", "write_csv",
    "parse_config", "parse_config_file", "serialize_config",
    "apply_override",
    "EXPERIMENTS", "FIGURES", "load_schema_manifest", "run_experiment",
    "run_experiment_bundle", "run_figure",
]
