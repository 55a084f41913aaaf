"""Explicit one-step integrators for scalar autonomous Ito SDEs.

The package targets equations of the form

    dx = f(x) dt + g(x) dW,

advanced with one of four explicit schemes: Euler-Maruyama (EM), Milstein
(MIL), a stochastic Heun predictor-corrector (SH), and a three-stage
stochastic Runge-Kutta scheme (RK3).  The two averaging schemes (SH, RK3)
integrate the correction-adjusted drift

    F(x) = f(x) - (1/2) g'(x) g(x)

through their deterministic stage structure, so with all noise draws zero
they reduce to the classical Heun and third-order Runge-Kutta steps applied
to dx/dt = F(x).

Brownian increments are supplied by the caller as variance-h draws (the
schemes never scale them).  RK3 consumes a second, independent variance-h
draw per step for its mixed-derivative correction term.

Usage::

    problem = benchmark_problem(eta=0.5)
    noise = [NoiseDraw(dw, dwt) for dw, dwt in increments]
    path = simulate_path(SchemeId.RK3, problem, x0=1.0, h=0.01,
                         n_steps=len(noise), noise=noise)
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, NamedTuple

import numpy as np

from .errors import NumericOverflowError

__all__ = [
    "SchemeId",
    "SdeProblem",
    "NoiseDraw",
    "Path",
    "SCHEME_STAGE_COUNTS",
    "benchmark_problem",
    "gbm_problem",
    "aux_drift",
    "step",
    "simulate_path",
    "check_derivatives",
]

# 1 / (2 sqrt(3)), the weight of the RK3 mixed correction term.
_INV_TWO_SQRT3 = 1.0 / (2.0 * math.sqrt(3.0))


class SchemeId(enum.Enum):
    """Identifier of an integration scheme."""

    EM = "EM"
    MIL = "MIL"
    SH = "SH"
    RK3 = "RK3"

    @classmethod
    def parse(cls, text: str) -> "SchemeId":
        """Parse a case-insensitive scheme name ("em", "Mil", "RK3", ...).

        Raises:
            ValueError: if the text names no known scheme.
        """
        key = str(text).strip().upper()
        try:
            return cls[key]
        except KeyError:
            raise ValueError(
                f"unknown scheme {text!r}; expected one of "
                f"{', '.join(m.value for m in cls)}"
            ) from None


# Callable evaluations consumed by one step of each scheme, counting the
# auxiliary drift F as one f call plus one g' call with the g value at the
# same point shared between F and the diffusion stage.
SCHEME_STAGE_COUNTS = {
    SchemeId.EM: {"drift": 1, "diffusion": 1, "drift_deriv": 0,
                  "diffusion_deriv": 0, "diffusion_deriv2": 0},
    SchemeId.MIL: {"drift": 1, "diffusion": 1, "drift_deriv": 0,
                   "diffusion_deriv": 1, "diffusion_deriv2": 0},
    SchemeId.SH: {"drift": 2, "diffusion": 2, "drift_deriv": 0,
                  "diffusion_deriv": 2, "diffusion_deriv2": 0},
    SchemeId.RK3: {"drift": 3, "diffusion": 3, "drift_deriv": 1,
                   "diffusion_deriv": 3, "diffusion_deriv2": 1},
}


class NoiseDraw(NamedTuple):
    """One step's Brownian increments, both of variance h.

    dw drives the diffusion term; dw_tilde is the independent draw consumed
    only by RK3's mixed correction term.
    """

    dw: float
    dw_tilde: float = 0.0


@dataclass(frozen=True)
class SdeProblem:
    """A scalar autonomous SDE given by coefficient callables.

    All callables must accept a float or ndarray and return a value that
    broadcasts against the input (constants are fine for derivatives).

    Attributes:
        drift: f(x).
        diffusion: g(x).
        drift_deriv: f'(x), used by RK3 only.
        diffusion_deriv: g'(x), used by MIL, SH and RK3.
        diffusion_deriv2: g''(x), used by RK3 only.
        label: short human-readable tag carried into output metadata.
    """

    drift: Callable
    diffusion: Callable
    drift_deriv: Callable
    diffusion_deriv: Callable
    diffusion_deriv2: Callable
    label: str = ""


@dataclass(frozen=True)
class Path:
    """A single simulated trajectory on a uniform time grid."""

    times: np.ndarray
    states: np.ndarray
    scheme: SchemeId
    h: float

    def __post_init__(self):
        if len(self.times) != len(self.states):
            raise ValueError("times and states must have equal length")


def benchmark_problem(eta: float) -> SdeProblem:
    """The one-parameter benchmark SDE dx = -x dt + (1 + eta x) dW.

    Linear mean-reverting drift with affine noise; eta interpolates from
    purely additive noise (eta = 0) toward purely multiplicative noise.
    """
    eta = float(eta)
    return SdeProblem(
        drift=lambda x: -x,
        diffusion=lambda x: 1.0 + eta * x,
        drift_deriv=lambda x: -1.0,
        diffusion_deriv=lambda x: eta,
        diffusion_deriv2=lambda x: 0.0,
        label=f"benchmark(eta={eta:g})",
    )


def gbm_problem(eta: float) -> SdeProblem:
    """Geometric Brownian motion dx = -x dt + eta x dW (no additive noise)."""
    eta = float(eta)
    return SdeProblem(
        drift=lambda x: -x,
        diffusion=lambda x: eta * x,
        drift_deriv=lambda x: -1.0,
        diffusion_deriv=lambda x: eta,
        diffusion_deriv2=lambda x: 0.0,
        label=f"gbm(eta={eta:g})",
    )


def aux_drift(problem: SdeProblem, x):
    """Correction-adjusted drift F(x) = f(x) - (1/2) g'(x) g(x).

    Args:
        problem: the SDE.
        x: state, float or ndarray.

    Returns:
        F(x), same shape as x.

    Raises:
        NumericOverflowError: if the result is non-finite; carries x.
    """
    value = problem.drift(x) - 0.5 * problem.diffusion_deriv(x) * problem.diffusion(x)
    if not np.all(np.isfinite(value)):
        raise NumericOverflowError(
            f"auxiliary drift non-finite at x={x!r}", x=x)
    return value


def _kernel_em(problem, x, h, dw, dwt):
    fx = problem.drift(x)
    gx = problem.diffusion(x)
    return x + fx * h + gx * dw, ()


def _kernel_mil(problem, x, h, dw, dwt):
    fx = problem.drift(x)
    gx = problem.diffusion(x)
    gpx = problem.diffusion_deriv(x)
    return x + fx * h + gx * dw + 0.5 * gpx * gx * (dw * dw - h), ()


def _kernel_sh(problem, x, h, dw, dwt):
    gx = problem.diffusion(x)
    f1 = problem.drift(x) - 0.5 * problem.diffusion_deriv(x) * gx
    xp = x + f1 * h + gx * dw
    gp = problem.diffusion(xp)
    f2 = problem.drift(xp) - 0.5 * problem.diffusion_deriv(xp) * gp
    out = x + 0.5 * (f1 + f2) * h + 0.5 * (gx + gp) * dw
    return out, (("predictor", xp),)


def _kernel_rk3(problem, x, h, dw, dwt):
    fx = problem.drift(x)
    gx = problem.diffusion(x)
    gpx = problem.diffusion_deriv(x)
    f1 = fx - 0.5 * gpx * gx
    y2 = x + (h / 3.0) * f1 + (1.0 / 3.0) * gx * dw
    g2 = problem.diffusion(y2)
    f2 = problem.drift(y2) - 0.5 * problem.diffusion_deriv(y2) * g2
    y3 = x + (2.0 * h / 3.0) * f2 + (2.0 / 3.0) * g2 * dw
    g3 = problem.diffusion(y3)
    f3 = problem.drift(y3) - 0.5 * problem.diffusion_deriv(y3) * g3
    mixed = (problem.drift_deriv(x) * gx - gpx * fx
             - 0.5 * problem.diffusion_deriv2(x) * gx * gx)
    out = (x + 0.25 * (f1 + 3.0 * f3) * h + 0.25 * (gx + 3.0 * g3) * dw
           + _INV_TWO_SQRT3 * mixed * h * dwt)
    return out, (("stage2", y2), ("stage3", y3))


_KERNELS = {
    SchemeId.EM: _kernel_em,
    SchemeId.MIL: _kernel_mil,
    SchemeId.SH: _kernel_sh,
    SchemeId.RK3: _kernel_rk3,
}


def step_kernel(scheme: SchemeId, problem: SdeProblem, x, h, dw, dwt=0.0):
    """Raw one-step update without finiteness checks.

    Works elementwise on ndarrays; callers that need blowup handling (the
    ensemble engine) mask the output themselves instead of raising.
    """
    out, _ = _KERNELS[scheme](problem, x, h, dw, dwt)
    return out


def step(scheme: SchemeId, problem: SdeProblem, x: float, h: float,
         noise: NoiseDraw) -> float:
    """Advance one step of the given scheme.

    Args:
        scheme: which integrator to apply.
        problem: the SDE.
        x: current state (finite).
        h: step size, h > 0.
        noise: variance-h increments for this step.

    Returns:
        The next state.

    Raises:
        ValueError: if h <= 0 or not finite.
        NumericOverflowError: if the input state, any internal stage, or the
            result is non-finite; identifies scheme and stage.
    """
    if not (h > 0.0) or not math.isfinite(h):
        raise ValueError(f"step size must be finite and positive, got {h!r}")
    if not np.all(np.isfinite(x)):
        raise NumericOverflowError(
            f"non-finite input state for {scheme.value}", x=x,
            scheme=scheme, stage="input")
    dw, dwt = noise
    out, stages = _KERNELS[scheme](problem, x, h, dw, dwt)
    for name, value in stages:
        if not np.all(np.isfinite(value)):
            raise NumericOverflowError(
                f"overflow in {scheme.value} {name} stage", x=x,
                scheme=scheme, stage=name)
    if not np.all(np.isfinite(out)):
        raise NumericOverflowError(
            f"overflow in {scheme.value} update", x=x,
            scheme=scheme, stage="update")
    return out


def simulate_path(scheme: SchemeId, problem: SdeProblem, x0: float, h: float,
                  n_steps: int, noise: Iterable) -> Path:
    """Integrate a single trajectory over n_steps uniform steps.

    Args:
        scheme: which integrator to apply.
        problem: the SDE.
        x0: initial state.
        h: step size, h > 0.
        n_steps: number of steps, >= 0.
        noise: iterable yielding at least n_steps NoiseDraw-compatible pairs.

    Returns:
        Path with n_steps + 1 states on times k*h.

    Raises:
        ValueError: bad h, bad n_steps, or the noise iterable ran dry.
        NumericOverflowError: overflow during stepping, annotated with the
            step index at which it occurred.
    """
    n_steps = int(n_steps)
    if n_steps < 0:
        raise ValueError("n_steps must be non-negative")
    states = np.empty(n_steps + 1, dtype=float)
    states[0] = x = float(x0)
    it = iter(noise)
    for k in range(n_steps):
        try:
            draw = next(it)
        except StopIteration:
            raise ValueError(
                f"noise iterable exhausted at step {k}; need {n_steps} draws"
            ) from None
        dw, dwt = draw
        try:
            x = step(scheme, problem, x, h, NoiseDraw(float(dw), float(dwt)))
        except NumericOverflowError as exc:
            raise NumericOverflowError(
                f"{exc} (at step {k})", x=exc.x, scheme=scheme,
                stage=exc.stage, step=k) from exc
        states[k + 1] = x
    times = h * np.arange(n_steps + 1, dtype=float)
    return Path(times=times, states=states, scheme=scheme, h=float(h))


def check_derivatives(problem: SdeProblem, xs, rel_step: float = 1e-5) -> dict:
    """Compare declared derivatives against central finite differences.

    For each point in xs computes the normalized discrepancy
    |fd - declared| / (|declared| + 1e-3), so a return value <= 1e-6
    certifies agreement to 1e-6 relative with a 1e-9 absolute floor.

    Returns:
        dict with the max discrepancy per derivative:
        {"drift_deriv": ..., "diffusion_deriv": ..., "diffusion_deriv2": ...}.
    """
    xs = np.asarray(xs, dtype=float)
    out = {}
    pairs = [
        ("drift_deriv", problem.drift, problem.drift_deriv),
        ("diffusion_deriv", problem.diffusion, problem.diffusion_deriv),
        ("diffusion_deriv2", problem.diffusion_deriv, problem.diffusion_deriv2),
    ]
    for name, func, deriv in pairs:
        d = rel_step * np.maximum(1.0, np.abs(xs))
        fd = (np.asarray(func(xs + d), dtype=float)
              - np.asarray(func(xs - d), dtype=float)) / (2.0 * d)
        declared = np.broadcast_to(
            np.asarray(deriv(xs), dtype=float), xs.shape)
        disc = np.abs(fd - declared) / (np.abs(declared) + 1e-3)
        out[name] = float(np.max(disc))
    return out
