"""Exact statistics of the benchmark SDE and the affine reduction.

The benchmark equation

    dx = -x dt + (1 + eta x) dW                                   (x0 given)

is the normal form of the general affine-coefficient scalar SDE

    d(xi) = -(alpha + beta xi) d(tau) + (gamma + delta xi) dW,

reached by the substitution xi = A x + B, tau = T t.  This module classifies
an affine SDE into its reduced form, and provides the benchmark's exact
equilibrium density, equilibrium moments, and transient moment evolution,
plus the corresponding geometric Brownian motion formulas for the degenerate
case in which no additive noise survives the reduction.

Signs: for beta > 0 the reduced drift is -x (mean reverting, the benchmark
proper); beta < 0 flips it to +x.  drift_sign records that sign.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.special import gammaln

from .errors import DegenerateSdeError

__all__ = [
    "AffineSde",
    "RescaleTransform",
    "Benchmark",
    "Gbm",
    "UnitDriftMultiplicative",
    "TranslatedBrownian",
    "ReducedForm",
    "reduce_affine",
    "equilibrium_log_pdf",
    "equilibrium_pdf",
    "equilibrium_moment_exists",
    "equilibrium_moment",
    "equilibrium_quadrature",
    "benchmark_moment1",
    "benchmark_moment2",
    "moment2_growth_rate",
    "eta_from_moment2",
    "gbm_moment",
]

# Width of the eta window around +/-1 in which benchmark_moment2 switches to
# the resonant closed form.
_ETA_BRANCH_TOL = 1e-8


@dataclass(frozen=True)
class AffineSde:
    """Coefficients of d(xi) = -(alpha + beta xi) d(tau) + (gamma + delta xi) dW."""

    alpha: float
    beta: float
    gamma: float
    delta: float


@dataclass(frozen=True)
class RescaleTransform:
    """The substitution xi = A x + B, tau = T t linking original and reduced
    coordinates.  T > 0 always; A != 0 whenever a spatial rescale is reported."""

    A: float
    B: float
    T: float

    def __post_init__(self):
        if not self.T > 0.0:
            raise ValueError("time scale T must be positive")


@dataclass(frozen=True)
class Benchmark:
    """Reduced form dx = drift_sign * x dt + (1 + eta x) dW."""

    eta: float
    drift_sign: int
    transform: RescaleTransform


@dataclass(frozen=True)
class Gbm:
    """Reduced form dx = drift_sign * x dt + eta x dW (no additive noise)."""

    eta: float
    drift_sign: int
    transform: RescaleTransform


@dataclass(frozen=True)
class UnitDriftMultiplicative:
    """Reduced form dx = dt + noise_sign * x dW (beta = 0, delta != 0)."""

    noise_sign: int
    transform: RescaleTransform


@dataclass(frozen=True)
class TranslatedBrownian:
    """No reduction applies: d(xi) = -alpha d(tau) + gamma dW as given."""

    alpha: float
    gamma: float


ReducedForm = Union[Benchmark, Gbm, UnitDriftMultiplicative, TranslatedBrownian]


def reduce_affine(sde: AffineSde) -> ReducedForm:
    """Classify an affine SDE and compute its reduction transform.

    Cases:
      * beta != 0 and beta*gamma - alpha*delta != 0: Benchmark with
        eta = delta / |beta|^(1/2), A = (beta*gamma - alpha*delta) /
        (beta |beta|^(1/2)), B = -alpha/beta, T = 1/|beta|.
      * beta != 0, beta*gamma - alpha*delta == 0 (within 1e-12 relative):
        Gbm with the same eta, A = 1.
      * beta == 0, delta != 0, alpha != 0: UnitDriftMultiplicative with
        B = -gamma/delta, T = 1/delta^2, A = -alpha/delta^2 and
        noise_sign = sign(delta).
      * beta == delta == 0: TranslatedBrownian (returned as-is).

    Raises:
        DegenerateSdeError: beta == 0, delta != 0, alpha == 0 (driftless
            multiplicative noise; not classified).
    """
    alpha, beta, gamma, delta = (float(sde.alpha), float(sde.beta),
                                 float(sde.gamma), float(sde.delta))
    if beta != 0.0:
        sqb = math.sqrt(abs(beta))
        eta = delta / sqb
        sign = -1 if beta > 0 else 1
        det = beta * gamma - alpha * delta
        scale = abs(beta * gamma) + abs(alpha * delta)
        if abs(det) <= 1e-12 * scale:
            return Gbm(eta=eta, drift_sign=sign,
                       transform=RescaleTransform(A=1.0, B=-alpha / beta,
                                                  T=1.0 / abs(beta)))
        return Benchmark(eta=eta, drift_sign=sign,
                         transform=RescaleTransform(A=det / (beta * sqb),
                                                    B=-alpha / beta,
                                                    T=1.0 / abs(beta)))
    if delta != 0.0:
        if alpha == 0.0:
            raise DegenerateSdeError(
                "driftless multiplicative-noise SDE (alpha=0, beta=0, "
                "delta!=0) has no classified reduction")
        return UnitDriftMultiplicative(
            noise_sign=1 if delta > 0 else -1,
            transform=RescaleTransform(A=-alpha / delta ** 2,
                                       B=-gamma / delta,
                                       T=1.0 / delta ** 2))
    return TranslatedBrownian(alpha=alpha, gamma=gamma)


def _log_pdf_positive_eta(eta: float, x):
    """Log equilibrium density for eta > 0 on the support x > -1/eta.

    Evaluated entirely in the log domain through log-gamma so that it stays
    finite for any finite input, including very small eta (where the gamma
    argument 2/eta^2 is astronomically large).
    """
    a = 2.0 / (eta * eta)
    log_c = a * math.log(2.0) + (1.0 - 2.0 * a) * math.log(eta) - gammaln(a)
    u = 1.0 + eta * np.asarray(x, dtype=float)
    inside = u > 0.0
    safe_u = np.where(inside, u, 1.0)
    logp = log_c - a / safe_u - (2.0 + a) * np.log(safe_u)
    return np.where(inside, logp, -np.inf)


def equilibrium_log_pdf(eta: float, x):
    """Natural log of the benchmark equilibrium density.

    Negative eta is evaluated by the exact mirror identity
    log p(x; -eta) = log p(-x; eta); eta = 0 is the Gaussian N(0, 1/2).
    Returns -inf outside the support.
    """
    eta = float(eta)
    if eta > 0.0:
        return _log_pdf_positive_eta(eta, x)
    if eta < 0.0:
        return _log_pdf_positive_eta(-eta, -np.asarray(x, dtype=float))
    x = np.asarray(x, dtype=float)
    return -0.5 * math.log(math.pi) - x * x


def equilibrium_pdf(eta: float, x):
    """Benchmark equilibrium density p(x); zero outside the support.

    For eta > 0 the support is x > -1/eta and

        p(x) = C exp(-(2/eta^2) / (1 + eta x)) (1 + eta x)^(-2 - 2/eta^2),
        C = 2^(2/eta^2) eta^(1 - 4/eta^2) / Gamma(2/eta^2).

    eta < 0 mirrors the density through the origin; eta = 0 is N(0, 1/2).
    Never returns NaN for finite inputs.
    """
    scalar = np.isscalar(x)
    with np.errstate(under="ignore"):
        p = np.exp(equilibrium_log_pdf(eta, x))
    return float(p) if scalar else p


def equilibrium_moment_exists(eta: float, k: int) -> bool:
    """Whether the k-th equilibrium moment is finite.

    The density has an algebraic tail of exponent -(2 + 2/eta^2), so the
    k-th moment exists iff |eta| < sqrt(2/(k-1)) for k >= 2; the first
    moment always exists.

    Raises:
        ValueError: k <= 0.
    """
    k = int(k)
    if k <= 0:
        raise ValueError("moment order k must be >= 1")
    if k == 1:
        return True
    return eta * eta < 2.0 / (k - 1)


def equilibrium_moment(eta: float, k: int) -> float:
    """Exact k-th equilibrium moment for k in {1, 2}.

    Returns 0 for k = 1, 1/(2 - eta^2) for k = 2 when it exists and
    math.inf otherwise.

    Raises:
        ValueError: k not in {1, 2} (existence for higher k is available
            through equilibrium_moment_exists).
    """
    k = int(k)
    if k == 1:
        return 0.0
    if k == 2:
        if not equilibrium_moment_exists(eta, 2):
            return math.inf
        return 1.0 / (2.0 - eta * eta)
    raise ValueError("closed-form moments implemented for k in {1, 2} only")


def equilibrium_quadrature(eta: float, k: int) -> float:
    """integral of x^k p_inf(x) dx by adaptive quadrature of the pdf.

    Independent of the closed forms: this integrates equilibrium_pdf
    itself.  k = 0 recovers the normalization (should be 1).  For eta != 0
    the substitution v = (2/eta^2) / (1 + eta x) maps the support onto
    (0, inf) where the integrand decays like a Gamma density; the integral
    is split at the Gamma mode.  Requires the moment to exist (see
    equilibrium_moment_exists), otherwise the quadrature cannot converge.
    """
    from scipy.integrate import quad

    k = int(k)
    if k < 0:
        raise ValueError("k must be >= 0")
    if k > 0 and not equilibrium_moment_exists(eta, k):
        raise ValueError(f"equilibrium moment k={k} does not exist "
                         f"at eta={eta}")
    if eta == 0.0:
        val, _ = quad(lambda x: x ** k * equilibrium_pdf(0.0, x),
                      -np.inf, np.inf, epsabs=1e-13, epsrel=1e-13)
        return val
    e = abs(eta)
    a = 2.0 / (e * e)

    def integrand(v):
        x = (a / v - 1.0) / e
        return x ** k * equilibrium_pdf(e, x) * a / (e * v * v)

    lo, _ = quad(integrand, 0.0, a, epsabs=1e-13, epsrel=1e-13, limit=200)
    hi, _ = quad(integrand, a, np.inf, epsabs=1e-13, epsrel=1e-13, limit=200)
    val = lo + hi
    # mirror symmetry: odd moments flip sign for eta < 0
    if eta < 0.0 and k % 2 == 1:
        val = -val
    return val


def benchmark_moment1(t, x0: float):
    """First moment of the benchmark solution: mu1(t) = x0 exp(-t)."""
    return x0 * np.exp(-np.asarray(t, dtype=float)) if not np.isscalar(t) \
        else x0 * math.exp(-t)


def benchmark_moment2(t, x0: float, eta: float):
    """Second moment of the benchmark solution at time t.

    For eta away from +/-1:

        mu2(t) = x0^2 e^(-(2-eta^2) t) + (1 - e^(-(2-eta^2) t)) / (2-eta^2)
                 + (2 eta x0 / (1-eta^2)) (e^(-t) - e^(-(2-eta^2) t)),

    with the resonant branch mu2(t) = x0^2 e^(-t) + 1 - e^(-t)
    +/- 2 x0 t e^(-t) used when |eta -/+ 1| <= 1e-8.  Both branches are
    evaluated via expm1 so they agree across the switch to well below 1e-6
    relative.
    """
    t = np.asarray(t, dtype=float)
    eta = float(eta)
    if abs(eta - 1.0) <= _ETA_BRANCH_TOL or abs(eta + 1.0) <= _ETA_BRANCH_TOL:
        sign = 1.0 if eta > 0 else -1.0
        et = np.exp(-t)
        out = x0 * x0 * et - np.expm1(-t) + sign * 2.0 * x0 * t * et
        return float(out) if out.ndim == 0 else out
    a = 2.0 - eta * eta
    eps = 1.0 - eta * eta
    eat = np.exp(-a * t)
    if a == 0.0:
        relax = t.copy() if t.ndim else float(t)
    else:
        relax = -np.expm1(-a * t) / a
    cross = 2.0 * eta * x0 * np.exp(-t) * (-np.expm1(-eps * t)) / eps
    out = x0 * x0 * eat + relax + cross
    return float(out) if np.ndim(out) == 0 else out


def moment2_growth_rate(eta: float) -> float:
    """Long-time exponential rate of the second moment: eta^2 - 2.

    Negative iff the second moment is asymptotically stable (|eta| < sqrt 2).
    """
    return eta * eta - 2.0


def eta_from_moment2(mu2_inf: float) -> float:
    """Invert the equilibrium second moment: eta = sqrt(2 - 1/mu2_inf).

    Raises:
        ValueError: mu2_inf < 1/2 (below the additive-noise floor).
    """
    mu2_inf = float(mu2_inf)
    if mu2_inf < 0.5:
        raise ValueError(
            f"equilibrium second moment must be >= 1/2, got {mu2_inf!r}")
    if math.isinf(mu2_inf):
        return math.sqrt(2.0)
    return math.sqrt(2.0 - 1.0 / mu2_inf)


def gbm_moment(t, x0: float, eta: float, k: int):
    """Exact GBM moments: mu1(t) = x0 e^(-t), mu2(t) = x0^2 e^((eta^2-2) t).

    Raises:
        ValueError: k not in {1, 2}.
    """
    k = int(k)
    t = np.asarray(t, dtype=float)
    if k == 1:
        out = x0 * np.exp(-t)
    elif k == 2:
        out = x0 * x0 * np.exp((eta * eta - 2.0) * t)
    else:
        raise ValueError("GBM moments implemented for k in {1, 2} only")
    return float(out) if out.ndim == 0 else out
