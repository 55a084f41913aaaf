"""Command-line entry point.

Subcommands map onto the experiment registry; every run takes its
parameters from the experiment defaults, overlaid by an optional config
file ([params] section) and repeatable --set key=value flags.  Artifacts
are CSV files (plus a bundle manifest for reproduce) under --out, the
SDEBENCH_OUT environment variable, or ./sdebench-out.

Exit status: 0 on success, 1 for usage or configuration problems, 2 when
the numerics fail (overflow, bad bracket, quadrature domain too small).
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from ._version import __version__
from .config import DEFAULT_SECTION, apply_override, parse_config_file
from .errors import ConfigError, Error
from .experiments import (EXPERIMENTS, FIGURES, run_experiment,
                          run_experiment_bundle, run_figure)

__all__ = ["main"]

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERIC = 2
OUT_ENV = "SDEBENCH_OUT"

# subcommand -> experiment behind it
_SUBCOMMANDS = {
    "simulate": "simulate",
    "moments": "moments",
    "stability": "stability-region",
    "crossover": "crossover",
    "equilibrium": "equilibrium",
    "porous": "porous",
    "strong-order": "strong-order",
}

_HELP = {
    "simulate": "integrate individual trajectories",
    "moments": "Monte Carlo moment evolution for one configuration",
    "stability": "largest stable step size along an eta grid",
    "crossover": "eta values where two schemes swap stability dominance",
    "equilibrium": "tabulate the benchmark equilibrium density",
    "porous": "stationary density of the saturating nonlinear example",
    "strong-order": "pathwise self-convergence rates",
    "reproduce": "run a full figure bundle or a named experiment",
}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems as exit status 1."""

    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="sdebench",
        description="Benchmark experiments for explicit SDE integrators.")
    parser.add_argument("--version", action="version",
                        version=f"sdebench {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    for name in list(_SUBCOMMANDS) + ["reproduce"]:
        p = sub.add_parser(name, help=_HELP[name])
        p.add_argument("--config", metavar="PATH",
                       help="config file ([params] section and friends)")
        p.add_argument("--set", dest="sets", action="append", default=[],
                       metavar="KEY=VALUE",
                       help="override one parameter (repeatable)")
        p.add_argument("--out", metavar="DIR",
                       help=f"output directory (default ${OUT_ENV} or "
                            "./sdebench-out)")
        p.add_argument("--seed", type=int,
                       help="override the experiment's seed parameter")
    return parser


def _load_sections(args) -> dict:
    sections = parse_config_file(args.config) if args.config else {}
    for spec in args.sets:
        apply_override(sections, spec)
    allowed = {DEFAULT_SECTION, "experiment"}
    unknown = set(sections) - allowed
    if unknown:
        raise ConfigError(
            f"unknown config section(s): {', '.join(sorted(unknown))}; "
            f"allowed: {', '.join(sorted(allowed))}")
    meta = dict(sections.get("experiment", {}))
    bad_meta = set(meta) - {"name", "figure"}
    if bad_meta:
        raise ConfigError(
            f"unknown key(s) in [experiment]: {', '.join(sorted(bad_meta))}")
    return sections


def _out_dir(args) -> Path:
    return Path(args.out or os.environ.get(OUT_ENV) or "sdebench-out")


def _dispatch(args) -> int:
    sections = _load_sections(args)
    params = dict(sections.get(DEFAULT_SECTION, {}))
    meta = dict(sections.get("experiment", {}))
    if args.seed is not None:
        params["seed"] = str(args.seed)
    out_root = _out_dir(args)

    if args.command == "reproduce":
        figure = params.pop("figure", None) or meta.get("figure")
        experiment = params.pop("experiment", None) or meta.get("name")
        if figure and experiment:
            raise ConfigError("give either figure=... or experiment=..., "
                              "not both")
        if figure:
            manifest = run_figure(figure, params, out_root / figure)
        elif experiment:
            manifest = run_experiment_bundle(experiment, params,
                                             out_root / experiment)
        else:
            raise ConfigError(
                "reproduce needs --set figure=ID or --set experiment=NAME; "
                f"figures: {', '.join(sorted(FIGURES))}")
        print(manifest)
        return EXIT_OK

    name = _SUBCOMMANDS[args.command]
    declared = meta.get("name")
    if declared and declared != name:
        raise ConfigError(
            f"config declares experiment {declared!r} but the {args.command} "
            f"subcommand runs {name!r}")
    out_root.mkdir(parents=True, exist_ok=True)
    for filename, _ in run_experiment(name, params, out_root):
        print(out_root / filename)
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"sdebench: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.command is None:
        parser.print_usage(sys.stderr)
        print("sdebench: error: a subcommand is required", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return _dispatch(args)
    except (ConfigError, ValueError) as exc:
        print(f"sdebench: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Error as exc:
        print(f"sdebench: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
