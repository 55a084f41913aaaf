"""Monte Carlo driver: noise plumbing, moments, blowups, paired estimators."""

import math
from itertools import islice

import numpy as np
import pytest

from sdebench import (
    LARGE_NOISE_PARAMS,
    EnsembleCollapseError,
    EnsembleConfig,
    LinearModelId,
    SchemeId,
    SdeProblem,
    affine_mean_step,
    antithetic_coupled_means,
    benchmark_problem,
    gbm_problem,
    iterate_moments,
    moment_map,
    noise_stream,
    porous_problem,
    run_ensemble,
    step_kernel,
    strong_order,
    trajectory_increments,
)


def _deterministic(drift, drift_deriv, label="det"):
    zero = lambda x: np.zeros_like(np.asarray(x, dtype=float))
    return SdeProblem(drift=drift, diffusion=zero, drift_deriv=drift_deriv,
                      diffusion_deriv=zero, diffusion_deriv2=zero,
                      label=label)


# ---------------------------------------------------------------- noise ---

def test_increments_shape_and_determinism():
    a = trajectory_increments(7, 3, 20, 0.1)
    b = trajectory_increments(7, 3, 20, 0.1)
    assert a.shape == (20, 2)
    assert np.array_equal(a, b)


def test_increments_differ_across_keys():
    base = trajectory_increments(7, 3, 20, 0.1)
    assert not np.array_equal(base, trajectory_increments(7, 4, 20, 0.1))
    assert not np.array_equal(base, trajectory_increments(8, 3, 20, 0.1))


def test_increments_scale_exactly_with_sqrt_h():
    """The counter-based stream draws unit normals and multiplies by
    sqrt(h), so quadrupling h must double every draw bit-for-bit.  This is
    what makes coupled-step-size comparisons meaningful."""
    unit = trajectory_increments(11, 0, 64, 1.0)
    assert np.array_equal(trajectory_increments(11, 0, 64, 4.0), 2.0 * unit)
    assert np.array_equal(trajectory_increments(11, 0, 64, 0.25),
                          0.5 * unit)


def test_increments_prefix_property():
    longer = trajectory_increments(5, 2, 100, 0.2)
    shorter = trajectory_increments(5, 2, 30, 0.2)
    assert np.array_equal(longer[:30], shorter)


def test_noise_stream_matches_increments():
    # spans two internal chunks to catch refill bugs
    ref = trajectory_increments(9, 1, 2300, 0.05)
    got = np.array(list(islice(noise_stream(9, 1, 0.05), 2300)))
    assert np.array_equal(got, ref)


def test_noise_stream_chunk_size_is_cosmetic():
    a = np.array(list(islice(noise_stream(4, 0, 0.1, chunk=7), 20)))
    b = np.array(list(islice(noise_stream(4, 0, 0.1, chunk=256), 20)))
    assert np.array_equal(a, b)


# ---------------------------------------------------------------- config ---

def test_config_validation():
    ok = dict(scheme=SchemeId.EM, x0=1.0, h=0.3, t_final=0.9, n_traj=4,
              seed=0)
    assert EnsembleConfig(**ok).n_steps == 3
    with pytest.raises(ValueError):
        EnsembleConfig(**{**ok, "h": 0.0})
    with pytest.raises(ValueError):
        EnsembleConfig(**{**ok, "t_final": -1.0})
    with pytest.raises(ValueError):
        EnsembleConfig(**{**ok, "n_traj": 0})
    with pytest.raises(ValueError):
        EnsembleConfig(**{**ok, "output_stride": 2})
    with pytest.raises(ValueError):
        EnsembleConfig(**{**ok, "t_final": 1.0})  # 0.3 does not divide 1


# ------------------------------------------------------------- ensembles ---

def test_run_ensemble_deterministic():
    cfg = EnsembleConfig(scheme=SchemeId.SH, x0=1.0, h=0.1, t_final=1.0,
                         n_traj=64, seed=21)
    p = benchmark_problem(0.5)
    a = run_ensemble(p, cfg)
    b = run_ensemble(p, cfg)
    assert np.array_equal(a.mu1, b.mu1)
    assert np.array_equal(a.se2, b.se2)


def test_zero_diffusion_collapses_to_deterministic_recursion():
    p = _deterministic(lambda x: -x, lambda x: -np.ones_like(x))
    cfg = EnsembleConfig(scheme=SchemeId.EM, x0=2.0, h=0.25, t_final=2.0,
                         n_traj=16, seed=0)
    ms = run_ensemble(p, cfg)
    expect = 2.0 * 0.75 ** np.arange(9)
    assert ms.mu1 == pytest.approx(expect, rel=1e-14)
    assert np.all(ms.se1 == 0.0)
    assert ms.mu2 == pytest.approx(ms.mu1 ** 2, rel=1e-13)


def test_noise_transform_can_silence_the_noise():
    cfg = EnsembleConfig(scheme=SchemeId.EM, x0=1.0, h=0.5, t_final=3.0,
                         n_traj=8, seed=5)
    ms = run_ensemble(benchmark_problem(0.9), cfg,
                      noise_transform=lambda a: np.zeros_like(a))
    assert ms.mu1 == pytest.approx(0.5 ** np.arange(7), rel=1e-14)


def test_times_and_stride():
    cfg = EnsembleConfig(scheme=SchemeId.EM, x0=1.0, h=0.1, t_final=1.0,
                         n_traj=8, seed=1, output_stride=5)
    ms = run_ensemble(benchmark_problem(0.3), cfg)
    assert ms.times == pytest.approx([0.0, 0.5, 1.0])
    full = run_ensemble(benchmark_problem(0.3),
                        EnsembleConfig(scheme=SchemeId.EM, x0=1.0, h=0.1,
                                       t_final=1.0, n_traj=8, seed=1))
    # recording cadence must not perturb the dynamics
    assert ms.mu1 == pytest.approx(full.mu1[::5], rel=0)
    assert ms.mu2 == pytest.approx(full.mu2[::5], rel=0)


def test_sample_moments_track_recurrence():
    """Dual route: the empirical ensemble and the closed-form moment
    recurrence must agree to Monte Carlo error."""
    eta, h = 0.5, 0.1
    cfg = EnsembleConfig(scheme=SchemeId.MIL, x0=1.0, h=h, t_final=2.0,
                         n_traj=20000, seed=42)
    ms = run_ensemble(benchmark_problem(eta), cfg)
    ref = iterate_moments(moment_map(SchemeId.MIL, LinearModelId.BENCHMARK,
                                     eta, h), 1.0, cfg.n_steps)
    k = -1
    assert abs(ms.mu1[k] - ref[k, 0]) < 4.0 * ms.se1[k]
    assert abs(ms.mu2[k] - ref[k, 1]) < 4.0 * ms.se2[k]


def test_partial_blowups_are_excluded():
    # multiplier 1 + 6 dW with h=1 overflows most trajectories by t=30;
    # survivors must still produce finite statistics
    cfg = EnsembleConfig(scheme=SchemeId.EM, x0=1.0, h=1.0, t_final=30.0,
                         n_traj=512, seed=3)
    ms = run_ensemble(gbm_problem(6.0), cfg)
    assert ms.n_blowups == 271  # frozen: counter-based stream, fixed key
    assert ms.n_traj == 512
    assert np.isfinite(ms.mu1).all()
    assert np.isfinite(ms.se2).all()


def test_total_collapse_raises():
    cubic = _deterministic(lambda x: x * x * x, lambda x: 3.0 * x * x)
    cfg = EnsembleConfig(scheme=SchemeId.EM, x0=5.0, h=1.0, t_final=40.0,
                         n_traj=8, seed=0)
    with pytest.raises(EnsembleCollapseError):
        run_ensemble(cubic, cfg)


# ------------------------------------------------------------ estimators ---

def test_coupled_means_match_hand_recompute():
    """Exact replay of the blocked implementation with the public noise
    API: per-pair fine increments, block-summed to each level, endpoints
    averaged over the +/- pair."""
    eta, t_final, seed, n_pairs = 0.5, 1.0, 9, 8
    hs = [0.2, 0.1]
    problem = benchmark_problem(eta)
    rep = antithetic_coupled_means(problem, SchemeId.SH, 1.0, t_final, hs,
                                   n_pairs, seed)
    h_fine = min(hs)
    n_fine = round(t_final / h_fine)
    for i, h in enumerate(hs):
        m = round(h / h_fine)
        ends = []
        for j in range(n_pairs):
            fine = trajectory_increments(seed, j, n_fine, h_fine)
            inc = fine.reshape(n_fine // m, m, 2).sum(axis=1)
            for sign in (1.0, -1.0):
                x = 1.0
                for k in range(n_fine // m):
                    x = float(step_kernel(SchemeId.SH, problem, x, h,
                                          sign * inc[k, 0],
                                          sign * inc[k, 1]))
                ends.append(x)
        assert rep.means[i] == pytest.approx(np.mean(ends), rel=1e-12)


def test_coupled_means_ladder_validation():
    p = benchmark_problem(0.5)
    with pytest.raises(ValueError):
        antithetic_coupled_means(p, SchemeId.EM, 1.0, 1.0, [0.3, 0.2], 4, 0)
    with pytest.raises(ValueError):
        antithetic_coupled_means(p, SchemeId.EM, 1.0, 1.0, [], 4, 0)
    with pytest.raises(ValueError):
        antithetic_coupled_means(p, SchemeId.EM, 1.0, 1.0, [0.1], 1, 0)


def test_affine_control_is_exact_on_itself():
    """With the problem as its own control the estimator must return the
    closed-form mean with (numerically) zero variance; this pins the
    control plumbing to the exact-mean bookkeeping."""
    p = benchmark_problem(0.8)
    hs = [0.1, 0.05]
    rep = antithetic_coupled_means(p, SchemeId.RK3, 1.0, 1.0, hs, 16, 2,
                                   control=p)
    for i, h in enumerate(hs):
        m, b = affine_mean_step(p, SchemeId.RK3, h)
        mu = 1.0
        for _ in range(round(1.0 / h)):
            mu = m * mu + b
        assert rep.means[i] == pytest.approx(mu, abs=1e-12)
        assert rep.ses[i] < 1e-9


def test_affine_mean_step_matches_moment_map():
    for model, factory in ((LinearModelId.BENCHMARK, benchmark_problem),
                           (LinearModelId.GBM, gbm_problem)):
        for scheme in SchemeId:
            for eta, h in ((0.3, 0.05), (1.2, 0.4)):
                m, b = affine_mean_step(factory(eta), scheme, h)
                mm = moment_map(scheme, model, eta, h)
                assert m == pytest.approx(mm.m11, abs=1e-13)
                assert b == pytest.approx(mm.b1, abs=1e-13)


def test_affine_mean_step_rejects_nonlinear_problem():
    with pytest.raises(ValueError):
        affine_mean_step(porous_problem(LARGE_NOISE_PARAMS), SchemeId.EM,
                         0.1)


# ----------------------------------------------------------- convergence ---

def test_strong_order_report_structure():
    rep = strong_order(benchmark_problem(0.5), SchemeId.EM, 1.0, 1.0,
                       [2 ** -4, 2 ** -5, 2 ** -6], 256, 17)
    assert rep.h_ref == pytest.approx(2 ** -6 / 4)
    assert rep.n_traj == 256
    assert list(rep.h_values) == [2 ** -4, 2 ** -5, 2 ** -6]
    assert np.all(np.diff(rep.rms_errors) < 0)  # error shrinks with h
    # shared-noise self-convergence keeps the fit tight even at small n
    assert rep.fitted_slope == pytest.approx(0.5, abs=0.2)


def test_strong_order_milstein_beats_em():
    mil = strong_order(benchmark_problem(0.5), SchemeId.MIL, 1.0, 1.0,
                       [2 ** -4, 2 ** -5, 2 ** -6], 256, 17)
    assert mil.fitted_slope == pytest.approx(1.0, abs=0.25)


def test_strong_order_ladder_validation():
    p = benchmark_problem(0.5)
    with pytest.raises(ValueError):
        strong_order(p, SchemeId.EM, 1.0, 1.0, [0.3, 0.1], 8, 0)
    with pytest.raises(ValueError):
        strong_order(p, SchemeId.EM, 1.0, 1.0, [0.1], 8, 0,
                     refine_factor=0)
