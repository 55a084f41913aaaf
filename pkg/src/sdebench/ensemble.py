"""Monte Carlo moment estimation and strong self-convergence.

Noise policy: every trajectory owns a counter-based substream keyed by
(seed, trajectory index) through a Philox bit generator, so results are
bit-identical for any processing order or degree of parallelism and do not
depend on how trajectories are grouped into blocks.  Increments are drawn
as variance-h Gaussians, two per step (the second column feeds RK3's mixed
correction term; it is drawn for every scheme so that the dW sequence is
scheme-independent).

Trajectories that overflow (non-finite state or |x| > BLOWUP_GUARD) are
terminated, counted in n_blowups, and excluded from the moment estimates at
every recorded time, keeping one denominator per series.

Strong-order runs couple refinement levels exactly: coarse Brownian
increments are block sums of the finest level's increments, and errors are
measured against the same scheme run at the finest level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .core import SchemeId, SdeProblem, step_kernel
from .errors import EnsembleCollapseError, NumericOverflowError

__all__ = [
    "BLOWUP_GUARD",
    "CoupledMeanReport",
    "EnsembleConfig",
    "MomentSeries",
    "StrongErrorReport",
    "affine_mean_step",
    "antithetic_coupled_means",
    "trajectory_increments",
    "noise_stream",
    "run_ensemble",
    "strong_order",
]

BLOWUP_GUARD = 1e15
# Trajectories are processed in fixed-size blocks; the size is part of the
# algorithm (it fixes the summation tree), not a tuning knob.
_BLOCK = 1024
_MASK64 = (1 << 64) - 1


def _substream(seed: int, trajectory: int) -> np.random.Generator:
    key = np.array([seed & _MASK64, trajectory & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def trajectory_increments(seed: int, trajectory: int, n_steps: int,
                          h: float) -> np.ndarray:
    """The (n_steps, 2) array of variance-h increments for one trajectory."""
    gen = _substream(int(seed), int(trajectory))
    return gen.standard_normal((int(n_steps), 2)) * math.sqrt(h)


def noise_stream(seed: int, trajectory: int, h: float, chunk: int = 1024):
    """Infinite iterator of per-step increment pairs for simulate_path.

    Yields the same draws, in the same order, that run_ensemble consumes
    for this (seed, trajectory).
    """
    gen = _substream(int(seed), int(trajectory))
    root_h = math.sqrt(h)
    while True:
        block = gen.standard_normal((chunk, 2)) * root_h
        for row in block:
            yield (row[0], row[1])


def _integer_steps(t_final: float, h: float) -> int:
    ratio = t_final / h
    n = int(round(ratio))
    if n < 1 or abs(ratio - n) > 1e-9 * max(1.0, abs(ratio)):
        raise ValueError(
            f"t_final={t_final!r} is not an integer number of steps of "
            f"h={h!r}")
    return n


@dataclass(frozen=True)
class EnsembleConfig:
    """Parameters of one Monte Carlo moment run.

    output_stride k records every k-th step (step 0 and the final step
    included); it must divide the total step count.
    """

    scheme: SchemeId
    x0: float
    h: float
    t_final: float
    n_traj: int
    seed: int
    output_stride: int = 1

    def __post_init__(self):
        if not (self.h > 0.0 and math.isfinite(self.h)):
            raise ValueError("h must be finite and positive")
        if not (self.t_final > 0.0 and math.isfinite(self.t_final)):
            raise ValueError("t_final must be finite and positive")
        if int(self.n_traj) < 1:
            raise ValueError("n_traj must be >= 1")
        stride = int(self.output_stride)
        if stride < 1:
            raise ValueError("output_stride must be >= 1")
        n_steps = _integer_steps(self.t_final, self.h)
        if n_steps % stride != 0:
            raise ValueError(
                f"output_stride={stride} does not divide n_steps={n_steps}")

    @property
    def n_steps(self) -> int:
        return _integer_steps(self.t_final, self.h)


@dataclass(frozen=True)
class MomentSeries:
    """Sample moments on the recorded time grid.

    mu_j is the sample mean of x^j over surviving trajectories; se_j is the
    sample standard deviation of x^j divided by sqrt(n_surviving).
    n_blowups trajectories overflowed and are excluded everywhere.
    """

    times: np.ndarray
    mu1: np.ndarray
    mu2: np.ndarray
    se1: np.ndarray
    se2: np.ndarray
    n_traj: int
    n_blowups: int


@dataclass(frozen=True)
class StrongErrorReport:
    """RMS endpoint self-convergence errors against the finest level."""

    scheme: SchemeId
    h_values: np.ndarray
    rms_errors: np.ndarray
    fitted_slope: float
    h_ref: float
    n_traj: int
    seed: int


def run_ensemble(problem: SdeProblem, config: EnsembleConfig,
                 noise_transform: Optional[Callable] = None) -> MomentSeries:
    """Estimate moment evolution over an ensemble of trajectories.

    Args:
        problem: the SDE.
        config: run parameters.
        noise_transform: test hook; receives each trajectory's (n_steps, 2)
            array of variance-h increments and returns a same-shape array
            (e.g. negation or zeroing).  None means use the draws as-is.

    Returns:
        MomentSeries on times k * output_stride * h.

    Raises:
        EnsembleCollapseError: every trajectory overflowed.
    """
    scheme = config.scheme
    n_steps = config.n_steps
    stride = int(config.output_stride)
    n_rec = n_steps // stride + 1
    n_traj = int(config.n_traj)
    h = float(config.h)

    part_s1, part_s2, part_s4 = [], [], []
    alive_total = 0

    for lo in range(0, n_traj, _BLOCK):
        nb = min(_BLOCK, n_traj - lo)
        noise = np.empty((nb, n_steps, 2), dtype=float)
        for j in range(nb):
            draws = trajectory_increments(config.seed, lo + j, n_steps, h)
            if noise_transform is not None:
                draws = np.asarray(noise_transform(draws), dtype=float)
                if draws.shape != (n_steps, 2):
                    raise ValueError(
                        "noise_transform must preserve the (n_steps, 2) shape")
            noise[j] = draws

        x = np.full(nb, float(config.x0))
        dead = np.zeros(nb, dtype=bool)
        rec = np.empty((nb, n_rec), dtype=float)
        rec[:, 0] = x
        r = 1
        with np.errstate(all="ignore"):
            for k in range(n_steps):
                x = step_kernel(scheme, problem, x, h,
                                noise[:, k, 0], noise[:, k, 1])
                bad = ~np.isfinite(x) | (np.abs(x) > BLOWUP_GUARD)
                dead |= bad
                if dead.any():
                    x = np.where(dead, 0.0, x)
                if (k + 1) % stride == 0:
                    rec[:, r] = x
                    r += 1
        alive = ~dead
        alive_total += int(np.count_nonzero(alive))
        kept = rec[alive]
        sq = kept * kept
        part_s1.append(kept.sum(axis=0))
        part_s2.append(sq.sum(axis=0))
        part_s4.append((sq * sq).sum(axis=0))

    if alive_total == 0:
        raise EnsembleCollapseError(
            f"all {n_traj} trajectories overflowed "
            f"({scheme.value}, h={h:g})")

    n = alive_total
    s1 = np.sum(part_s1, axis=0)
    s2 = np.sum(part_s2, axis=0)
    s4 = np.sum(part_s4, axis=0)
    mu1 = s1 / n
    mu2 = s2 / n
    if n > 1:
        var1 = np.maximum(s2 / n - mu1 * mu1, 0.0) * (n / (n - 1.0))
        var2 = np.maximum(s4 / n - mu2 * mu2, 0.0) * (n / (n - 1.0))
        se1 = np.sqrt(var1 / n)
        se2 = np.sqrt(var2 / n)
    else:
        se1 = np.zeros(n_rec)
        se2 = np.zeros(n_rec)
    times = (stride * h) * np.arange(n_rec, dtype=float)
    return MomentSeries(times=times, mu1=mu1, mu2=mu2, se1=se1, se2=se2,
                        n_traj=n_traj, n_blowups=n_traj - n)


@dataclass(frozen=True)
class CoupledMeanReport:
    """Variance-reduced estimates of E[x(T)] across a shared-noise h ladder.

    means[i] estimates E[x(t_final)] at step size h_values[i]; ses[i] is the
    standard error of that estimate over antithetic pair averages.  Because
    every level consumes block sums of the same fine increments and each
    trajectory is paired with its sign-flipped twin, the statistical offset
    is common across levels and far smaller than for independent draws, so
    level differences expose the weak bias directly.
    """

    scheme: SchemeId
    h_values: np.ndarray
    means: np.ndarray
    ses: np.ndarray
    n_pairs: int
    seed: int


def affine_mean_step(problem: SdeProblem, scheme: SchemeId,
                     h: float) -> tuple:
    """Coefficients (m, b) of E[x1] = m*E[x0] + b for an affine problem.

    Every scheme's update is polynomial in the increments with degree at
    most three when drift and diffusion are affine, so a 12-node
    Gauss-Hermite rule over the increment pair gives the one-step mean
    exactly (to roundoff).

    Raises:
        ValueError: the problem's coefficients are not affine.
    """
    for fn, name in ((problem.drift, "drift"),
                     (problem.diffusion, "diffusion")):
        scale = 1.0 + abs(float(fn(0.0)))
        # Two stencils so that curvature odd about either center still shows.
        for center in (0.0, 0.5):
            second_diff = (float(fn(center + 1.0)) - 2.0 * float(fn(center))
                           + float(fn(center - 1.0)))
            if abs(second_diff) > 1e-12 * scale:
                raise ValueError(f"{name} is not affine; the one-step mean "
                                 "rule would not be exact")
    nodes, weights = np.polynomial.hermite_e.hermegauss(12)
    w2 = np.outer(weights, weights) / weights.sum() ** 2
    dw = (nodes * math.sqrt(h))[:, None] + np.zeros(len(nodes))[None, :]
    dwt = (nodes * math.sqrt(h))[None, :] + np.zeros(len(nodes))[:, None]

    def mean_from(x0):
        x1 = step_kernel(scheme, problem, np.full(dw.shape, x0), h, dw, dwt)
        return float(np.sum(w2 * x1))

    b = mean_from(0.0)
    m = mean_from(1.0) - b
    return m, b


def _affine_mean_at(problem, scheme, x0, h, n_steps) -> float:
    m, b = affine_mean_step(problem, scheme, h)
    mu = float(x0)
    for _ in range(int(n_steps)):
        mu = m * mu + b
    return mu


def antithetic_coupled_means(problem: SdeProblem, scheme: SchemeId, x0: float,
                             t_final: float, h_values, n_pairs: int,
                             seed: int,
                             control: Optional[SdeProblem] = None
                             ) -> CoupledMeanReport:
    """Estimate E[x(t_final)] at several step sizes from shared noise.

    Each of the n_pairs pair indices owns one fine-level increment array
    (variance min(h) Gaussians); every coarser level uses exact block sums
    of it, and each array is consumed twice, once negated.  The estimate at
    each level is the mean of the 2*n_pairs endpoints, an unbiased plain
    Monte Carlo mean over 2*n_pairs trajectories.

    Args:
        h_values: step sizes; each must be an integer multiple of the
            smallest, and t_final an integer number of steps at every level.
        control: optional affine companion problem driven by the same
            increments.  Its endpoint mean under this scheme is known
            exactly (affine_mean_step), so subtracting the companion's
            sample mean and adding back its exact value removes most of
            the shared statistical fluctuation without changing the
            estimator's expectation.

    Raises:
        ValueError: incompatible ladder, or a non-affine control.
        NumericOverflowError: some endpoint became non-finite; the message
            names the level.
    """
    hs = [float(h) for h in h_values]
    if not hs:
        raise ValueError("need at least one step size")
    h_fine = min(hs)
    n_fine = _integer_steps(t_final, h_fine)
    factors = []
    for h in hs:
        m = int(round(h / h_fine))
        if m < 1 or abs(h - m * h_fine) > 1e-9 * h:
            raise ValueError(
                f"h={h!r} is not an integer multiple of the finest "
                f"h={h_fine!r}")
        if n_fine % m != 0:
            raise ValueError(
                f"t_final={t_final!r} is not an integer number of steps "
                f"of h={h!r}")
        factors.append(m)
    n_pairs = int(n_pairs)
    if n_pairs < 2:
        raise ValueError("n_pairs must be >= 2")
    exact_control = None
    if control is not None:
        exact_control = [
            _affine_mean_at(control, scheme, x0, h, n_fine // m)
            for h, m in zip(hs, factors)]

    s1 = np.zeros(len(hs))
    s2 = np.zeros(len(hs))
    for lo in range(0, n_pairs, _BLOCK):
        nb = min(_BLOCK, n_pairs - lo)
        fine = np.empty((nb, n_fine, 2), dtype=float)
        for j in range(nb):
            fine[j] = trajectory_increments(seed, lo + j, n_fine, h_fine)
        for i, (h, m) in enumerate(zip(hs, factors)):
            inc = fine.reshape(nb, n_fine // m, m, 2).sum(axis=2)
            pair_avg = 0.5 * (
                _endpoint_block(problem, scheme, x0, h, inc)
                + _endpoint_block(problem, scheme, x0, h, -inc))
            if control is not None:
                companion = 0.5 * (
                    _endpoint_block(control, scheme, x0, h, inc)
                    + _endpoint_block(control, scheme, x0, h, -inc))
                pair_avg = pair_avg - companion + exact_control[i]
            if not np.all(np.isfinite(pair_avg)):
                raise NumericOverflowError(
                    f"level h={h:g} overflowed", scheme=scheme)
            s1[i] += pair_avg.sum()
            s2[i] += float(np.dot(pair_avg, pair_avg))

    means = s1 / n_pairs
    var = np.maximum(s2 / n_pairs - means * means, 0.0)
    var *= n_pairs / (n_pairs - 1.0)
    ses = np.sqrt(var / n_pairs)
    return CoupledMeanReport(scheme=scheme, h_values=np.asarray(hs),
                             means=means, ses=ses, n_pairs=n_pairs,
                             seed=int(seed))


def _endpoint_block(problem, scheme, x0, h, noise):
    """Propagate a block to the final time; returns endpoint states."""
    nb, n_steps, _ = noise.shape
    x = np.full(nb, float(x0))
    with np.errstate(all="ignore"):
        for k in range(n_steps):
            x = step_kernel(scheme, problem, x, h, noise[:, k, 0],
                            noise[:, k, 1])
    return x


def strong_order(problem: SdeProblem, scheme: SchemeId, x0: float,
                 t_final: float, h_values, n_traj: int, seed: int,
                 refine_factor: int = 4) -> StrongErrorReport:
    """RMS endpoint error of each level against the finest-level reference.

    The reference uses the same scheme at h_ref = min(h) / refine_factor;
    each coarse level's Brownian increments are exact block sums of the
    reference increments, trajectory by trajectory.

    Args:
        h_values: strictly decreasing step sizes, each exactly twice the
            next (dyadic ladder); t_final must be an integer number of steps
            at every level.
        refine_factor: power of two >= 4 separating the reference level
            from the smallest tested h.

    Raises:
        ValueError: non-dyadic ladder or incompatible t_final.
        NumericOverflowError: a level produced non-finite endpoints; the
            message names the level.
    """
    hs = [float(v) for v in h_values]
    if len(hs) < 2:
        raise ValueError("need at least two step sizes")
    for a, b in zip(hs, hs[1:]):
        if not abs(a - 2.0 * b) <= 1e-12 * a:
            raise ValueError(
                f"step sizes must halve at every level, got {a!r} -> {b!r}")
    refine_factor = int(refine_factor)
    if refine_factor < 4 or refine_factor & (refine_factor - 1):
        raise ValueError("refine_factor must be a power of two >= 4")
    h_ref = hs[-1] / refine_factor
    n_ref = _integer_steps(t_final, h_ref)
    n_traj = int(n_traj)
    if n_traj < 1:
        raise ValueError("n_traj must be >= 1")
    factors = [int(round(h / h_ref)) for h in hs]

    sq_sums = np.zeros(len(hs))
    for lo in range(0, n_traj, _BLOCK):
        nb = min(_BLOCK, n_traj - lo)
        fine = np.empty((nb, n_ref, 2), dtype=float)
        for j in range(nb):
            fine[j] = trajectory_increments(seed, lo + j, n_ref, h_ref)
        x_ref = _endpoint_block(problem, scheme, x0, h_ref, fine)
        if not np.all(np.isfinite(x_ref)):
            raise NumericOverflowError(
                f"reference level h={h_ref:g} overflowed", scheme=scheme)
        for i, (h, m) in enumerate(zip(hs, factors)):
            coarse = fine.reshape(nb, n_ref // m, m, 2).sum(axis=2)
            x_h = _endpoint_block(problem, scheme, x0, h, coarse)
            if not np.all(np.isfinite(x_h)):
                raise NumericOverflowError(
                    f"level h={h:g} overflowed", scheme=scheme)
            d = x_h - x_ref
            sq_sums[i] += float(np.dot(d, d))

    rms = np.sqrt(sq_sums / n_traj)
    slope = float(np.polyfit(np.log(hs), np.log(rms), 1)[0])
    return StrongErrorReport(scheme=scheme, h_values=np.asarray(hs),
                             rms_errors=rms, fitted_slope=slope,
                             h_ref=h_ref, n_traj=n_traj, seed=int(seed))
