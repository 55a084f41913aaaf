"""Nonlinear test problem with error-function drift and diffusion.

The problem models saturating transport:

    f(x) = -A erf((x - x*) / B)
    g(x) =  C + D erf((x - x*) / E)

with A, B, E > 0.  Near x* the coefficients linearize to the affine
benchmark family; linearized_eta reports the matching noise parameter
eta = g'(x*) / sqrt(|f'(x*)|) = sqrt(2 B D^2 / (A E^2 sqrt(pi))).

For one-dimensional diffusions the stationary density is available by
quadrature:

    p(x) = exp( int 2 f / g^2 ) / (Z g^2),

which this module evaluates on a uniform grid, entirely in the log domain
(the inner integral reaches hundreds on the standard domains, far beyond
exp overflow).  The quadrature refuses domains on which g is not strictly
positive: when D > C the diffusion has a zero and the formula is only
meaningful on one basin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import erf

from .core import SdeProblem
from .errors import DiffusionSignError, DomainTooSmallError, Error

__all__ = [
    "PorousParams",
    "DensityGrid",
    "LARGE_NOISE_PARAMS",
    "SMALL_NOISE_PARAMS",
    "porous_problem",
    "linearized_eta",
    "linearized_problem",
    "stationary_density",
    "stationary_mean",
    "right_basin_density",
    "diffusion_zero",
]

_SQRT_PI = math.sqrt(math.pi)
# Normalized density must fall below this at both domain edges.
_EDGE_TOL = 1e-12


@dataclass(frozen=True)
class PorousParams:
    """Coefficients of the saturating-transport problem."""

    A: float
    B: float
    C: float
    D: float
    E: float
    x_star: float = 0.0

    def __post_init__(self):
        for name in ("A", "B", "E"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"parameter {name} must be positive")


# The two parameter sets used throughout the experiments: strong
# multiplicative noise (eta ~ 1.13, diffusion vanishes at one point) and
# weak multiplicative noise (eta ~ 0.056, diffusion strictly positive).
LARGE_NOISE_PARAMS = PorousParams(A=2.0, B=1.0, C=1.0, D=1.5, E=1.0, x_star=1.0)
SMALL_NOISE_PARAMS = PorousParams(A=2.0, B=1.0, C=1.0, D=0.3, E=4.0, x_star=1.0)


@dataclass(frozen=True)
class DensityGrid:
    """Normalized stationary density on a uniform grid.

    log_z is the natural log of the unnormalized integral (the normalizer);
    mean is the trapezoid first moment of the normalized density.
    """

    x: np.ndarray
    p: np.ndarray
    log_z: float
    mean: float


def porous_problem(params: PorousParams) -> SdeProblem:
    """Build the SdeProblem with analytic derivatives.

    f'(x) = -(2A / (B sqrt(pi))) exp(-((x - x*)/B)^2)
    g'(x) =  (2D / (E sqrt(pi))) exp(-((x - x*)/E)^2)
    g''(x) = -(4D (x - x*) / (E^3 sqrt(pi))) exp(-((x - x*)/E)^2)
    """
    A, B, C, D, E, xs = (params.A, params.B, params.C, params.D, params.E,
                         params.x_star)
    fp_scale = 2.0 * A / (B * _SQRT_PI)
    gp_scale = 2.0 * D / (E * _SQRT_PI)
    gpp_scale = 4.0 * D / (E ** 3 * _SQRT_PI)
    return SdeProblem(
        drift=lambda x: -A * erf((x - xs) / B),
        diffusion=lambda x: C + D * erf((x - xs) / E),
        drift_deriv=lambda x: -fp_scale * np.exp(-((x - xs) / B) ** 2),
        diffusion_deriv=lambda x: gp_scale * np.exp(-((x - xs) / E) ** 2),
        diffusion_deriv2=lambda x: -gpp_scale * (x - xs)
        * np.exp(-((x - xs) / E) ** 2),
        label=f"porous(A={A:g},B={B:g},C={C:g},D={D:g},E={E:g},x*={xs:g})",
    )


def linearized_eta(params: PorousParams) -> float:
    """Noise parameter of the affine linearization at x*."""
    return math.sqrt(2.0 * params.B * params.D ** 2
                     / (params.A * params.E ** 2 * _SQRT_PI))


def linearized_problem(params: PorousParams) -> SdeProblem:
    """Affine SDE tangent to the saturating problem at x*.

    f(x*) = 0, so the tangent problem is f'(x*)(x - x*) with diffusion
    g(x*) + g'(x*)(x - x*).  Exactly solvable companion for variance
    reduction and for cross-checking the linearized noise parameter.
    """
    xs = params.x_star
    a = -2.0 * params.A / (params.B * _SQRT_PI)
    gamma = params.C
    delta = 2.0 * params.D / (params.E * _SQRT_PI)
    return SdeProblem(
        drift=lambda x: a * (x - xs),
        diffusion=lambda x: gamma + delta * (x - xs),
        drift_deriv=lambda x: a,
        diffusion_deriv=lambda x: delta,
        diffusion_deriv2=lambda x: 0.0,
        label=f"porous-tangent(a={a:g},gamma={gamma:g},delta={delta:g},"
              f"x*={xs:g})",
    )


def diffusion_zero(params: PorousParams, search_span: float = 50.0) -> float:
    """Location of the diffusion zero left of x*, if any.

    Raises:
        DiffusionSignError: the diffusion has no sign change (D <= C case).
    """
    problem = porous_problem(params)
    lo = params.x_star - search_span
    hi = params.x_star
    g_lo = float(problem.diffusion(lo))
    g_hi = float(problem.diffusion(hi))
    if not (g_lo < 0.0 < g_hi):
        raise DiffusionSignError(
            "diffusion does not change sign on the search span", x=lo)
    return float(brentq(lambda x: float(problem.diffusion(x)), lo, hi,
                        xtol=1e-13))


def stationary_density(problem: SdeProblem, lo: float, hi: float,
                       dx: float) -> DensityGrid:
    """Stationary density by cumulative-trapezoid quadrature.

    The inner integral of 2 f / g^2 is accumulated left to right with the
    same trapezoid rule used for normalization and moments; all density
    arithmetic happens in the log domain with the running maximum
    subtracted before exponentiation.

    Raises:
        ValueError: bad grid specification.
        DiffusionSignError: g <= 0 somewhere on the grid (names the point).
        DomainTooSmallError: the normalized density exceeds 1e-12 at either
            edge, i.e. the domain clips visible mass.
    """
    lo, hi, dx = float(lo), float(hi), float(dx)
    if not (hi > lo and dx > 0.0):
        raise ValueError("need hi > lo and dx > 0")
    n = int(math.floor((hi - lo) / dx + 0.5)) + 1
    if n < 3:
        raise ValueError("grid must contain at least 3 points")
    x = lo + dx * np.arange(n)
    g = np.asarray(problem.diffusion(x), dtype=float)
    if np.any(g <= 0.0):
        bad = x[int(np.argmin(g))]
        raise DiffusionSignError(
            f"diffusion is not strictly positive on the domain "
            f"(g({bad:.6g}) = {float(problem.diffusion(bad)):.6g})", x=bad)
    f = np.asarray(problem.drift(x), dtype=float)
    integrand = 2.0 * f / (g * g)
    inner = np.empty(n)
    inner[0] = 0.0
    np.cumsum(0.5 * dx * (integrand[1:] + integrand[:-1]), out=inner[1:])
    log_unnorm = inner - 2.0 * np.log(g)
    peak = float(np.max(log_unnorm))
    with np.errstate(under="ignore"):
        w = np.exp(log_unnorm - peak)
    z_shifted = float(np.trapezoid(w, dx=dx))
    p = w / z_shifted
    if p[0] > _EDGE_TOL or p[-1] > _EDGE_TOL:
        raise DomainTooSmallError(
            f"stationary density does not vanish at the domain edges "
            f"(p(lo)={p[0]:.3g}, p(hi)={p[-1]:.3g}); enlarge [lo, hi]")
    mean = float(np.trapezoid(x * p, dx=dx))
    return DensityGrid(x=x, p=p, log_z=peak + math.log(z_shifted), mean=mean)


def right_basin_density(params: PorousParams, hi: float = 100.0,
                        dx: float = 0.00125,
                        offset: float = 0.02) -> DensityGrid:
    """Stationary density on the basin right of the diffusion zero.

    When the diffusion vanishes (D > C) the stationary formula only makes
    sense per basin; this integrates on [zero + offset, hi].  The offset
    must be small enough that the left edge carries no visible mass (the
    density vanishes like exp(-K / (x - zero)) at the zero) yet any offset
    below ~0.04 works for the standard strong-noise parameters; edge
    clearance is enforced by stationary_density either way.
    """
    z = diffusion_zero(params)
    return stationary_density(porous_problem(params), z + offset, hi, dx)


def stationary_mean(params: PorousParams, lo: float = -100.0,
                    hi: float = 100.0, dx: float = 0.0025,
                    validate_tol: float = 1e-5) -> float:
    """Stationary mean with one grid-refinement validation at dx/2.

    Raises:
        Error: the refined mean moved by more than validate_tol, i.e. the
            quadrature has not converged on this grid.
    """
    problem = porous_problem(params)
    coarse = stationary_density(problem, lo, hi, dx)
    fine = stationary_density(problem, lo, hi, dx / 2.0)
    if abs(coarse.mean - fine.mean) > validate_tol:
        raise Error(
            f"stationary mean not grid-converged: dx={dx:g} gives "
            f"{coarse.mean!r}, dx/2 gives {fine.mean!r}")
    return coarse.mean
