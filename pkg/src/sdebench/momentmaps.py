"""Closed-form one-step maps for the first two moments of each scheme.

On the benchmark equation dx = -x dt + (1 + eta x) dW every scheme's first
and second moments obey an exact affine recurrence

    mu1[n+1] = m11 * mu1[n] + b1
    mu2[n+1] = m21 * mu1[n] + m22 * mu2[n] + b2

whose coefficients are polynomials in (eta, h).  On geometric Brownian
motion (dx = -x dt + eta x dW) the same schemes give purely multiplicative
recurrences (b1 = m21 = b2 = 0) with the same m11 and m22.  The two model
variants are transcribed from independent derivations on purpose: their
multiplier identity is a checked invariant that guards the long polynomial
transcriptions.

All coefficients are written with explicit rational constants (1/64,
1/2304, ...) rather than evaluated decimals.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import SchemeId
from .errors import NumericOverflowError, StabilityDomainError

__all__ = [
    "LinearModelId",
    "MomentMap",
    "FixedPoint",
    "moment_map",
    "iterate_moments",
    "amplification",
    "is_stable",
    "fixed_point",
    "asymptotic_bias",
]


class LinearModelId(enum.Enum):
    """Which linear test equation the moment recurrence describes."""

    BENCHMARK = "BENCHMARK"
    GBM = "GBM"

    @classmethod
    def parse(cls, text: str) -> "LinearModelId":
        key = str(text).strip().upper()
        try:
            return cls[key]
        except KeyError:
            raise ValueError(
                f"unknown model {text!r}; expected BENCHMARK or GBM") from None


@dataclass(frozen=True)
class MomentMap:
    """Affine moment recurrence coefficients at a fixed (eta, h)."""

    scheme: SchemeId
    model: LinearModelId
    eta: float
    h: float
    m11: float
    b1: float
    m21: float
    m22: float
    b2: float


@dataclass(frozen=True)
class FixedPoint:
    """Fixed point of a moment map; values unset when not contractive."""

    mu1: Optional[float]
    mu2: Optional[float]
    contractive1: bool
    contractive2: bool


def _benchmark_coeffs(scheme: SchemeId, eta: float, h: float):
    e2 = eta * eta
    s = 2.0 + e2
    if scheme is SchemeId.EM:
        m11 = 1.0 - h
        b1 = 0.0
        m21 = 2.0 * h * eta
        m22 = (1.0 - h) ** 2 + h * e2
        b2 = h
    elif scheme is SchemeId.MIL:
        m11 = 1.0 - h
        b1 = 0.0
        m21 = 2.0 * h * eta + h * h * eta * e2
        m22 = (1.0 - h) ** 2 + h * e2 + h * h * e2 * e2 / 2.0
        b2 = h + h * h * e2 / 2.0
    elif scheme is SchemeId.SH:
        m11 = 1.0 - h + h * h * s * s / 8.0
        b1 = eta * h * h * s / 8.0
        b2 = (h
              - h ** 2 * s / 2.0
              + h ** 3 * (1.0 + e2) ** 2 / 4.0
              + h ** 4 * e2 * s ** 2 / 64.0)
        m21 = (2.0 * h * eta
               - h ** 2 * eta * (10.0 + 3.0 * e2) / 4.0
               + h ** 3 * eta * (2.0 + 5.0 * e2 + 2.0 * e2 * e2) / 4.0
               + h ** 4 * eta * s ** 3 / 32.0)
        m22 = (1.0
               - h * (2.0 - e2)
               - h ** 2 * (s * s - 12.0) / 4.0
               + h ** 3 * (e2 ** 3 + 3.0 * e2 * e2 - 4.0) / 4.0
               + h ** 4 * s ** 4 / 64.0)
    elif scheme is SchemeId.RK3:
        m11 = (1.0 - h
               + h ** 2 * (4.0 - e2 * e2) / 8.0
               - h ** 3 * s ** 3 / 48.0)
        b1 = (-h ** 2 * eta * (2.0 + 3.0 * e2) / 24.0
              - h ** 3 * eta * s ** 2 / 48.0)
        b2 = (h
              - h ** 2 * (2.0 - e2) / 2.0
              + h ** 3 * (8.0 - e2 * e2) / 12.0
              - h ** 4 * (32.0 + 20.0 * e2 - 44.0 * e2 ** 2 - 27.0 * e2 ** 3) / 192.0
              + h ** 5 * s ** 2 * (2.0 + 7.0 * e2 + 6.0 * e2 * e2) / 288.0
              + h ** 6 * e2 * s ** 4 / 2304.0)
        m21 = (2.0 * h * eta
               - h ** 2 * eta * (38.0 - 9.0 * e2) / 12.0
               + h ** 3 * eta * (56.0 + 2.0 * e2 - 5.0 * e2 * e2) / 24.0
               - h ** 4 * eta * (72.0 + 44.0 * e2 - 50.0 * e2 ** 2
                                 - 27.0 * e2 ** 3) / 96.0
               + h ** 5 * eta * s ** 3 * (1.0 + 3.0 * e2) / 72.0
               + h ** 6 * eta * s ** 5 / 1152.0)
        m22 = (1.0
               - h * (2.0 - e2)
               + h ** 2 * (8.0 - 8.0 * e2 + e2 * e2) / 4.0
               - h ** 3 * (32.0 - 36.0 * e2 + 3.0 * e2 ** 3) / 24.0
               + h ** 4 * s ** 2 * (28.0 - 52.0 * e2 + 27.0 * e2 * e2) / 192.0
               - h ** 5 * s ** 4 * (1.0 - 2.0 * e2) / 96.0
               + h ** 6 * s ** 6 / 2304.0)
    else:  # pragma: no cover
        raise ValueError(f"unhandled scheme {scheme!r}")
    return m11, b1, m21, m22, b2


def _gbm_coeffs(scheme: SchemeId, eta: float, h: float):
    # Transcribed from the multiplicative-noise derivation, written in the
    # expanded monomial form it is stated in; deliberately not shared with
    # _benchmark_coeffs so the multiplier identity stays a real check.
    e2 = eta * eta
    e4 = e2 * e2
    e6 = e4 * e2
    e8 = e4 * e4
    e10 = e8 * e2
    e12 = e8 * e4
    if scheme is SchemeId.EM:
        m11 = 1.0 - h
        m22 = (1.0 - h) ** 2 + e2 * h
    elif scheme is SchemeId.MIL:
        m11 = 1.0 - h
        m22 = 1.0 + (e2 - 2.0) * h + (1.0 + e4 / 2.0) * h * h
    elif scheme is SchemeId.SH:
        m11 = 1.0 - h + (1.0 + e2 / 2.0) ** 2 * h * h / 2.0
        m22 = (1.0
               + (e2 - 2.0) * h
               + (2.0 - e2 - e4 / 4.0) * h ** 2
               + (e6 / 4.0 + 3.0 * e4 / 4.0 - 1.0) * h ** 3
               + (e8 / 64.0 + e6 / 8.0 + 3.0 * e4 / 8.0 + e2 / 2.0
                  + 1.0 / 4.0) * h ** 4)
    elif scheme is SchemeId.RK3:
        m11 = (1.0 - h
               + (1.0 / 2.0 - e4 / 8.0) * h ** 2
               - (e6 / 48.0 + e4 / 8.0 + e2 / 4.0 + 1.0 / 6.0) * h ** 3)
        m22 = (1.0
               + (e2 - 2.0) * h
               + (e4 / 4.0 - 2.0 * e2 + 2.0) * h ** 2
               + (-e6 / 8.0 + 3.0 * e2 / 2.0 - 4.0 / 3.0) * h ** 3
               + (9.0 * e8 / 64.0 + 7.0 * e6 / 24.0 - 3.0 * e4 / 8.0
                  - e2 / 2.0 + 7.0 / 12.0) * h ** 4
               + (e10 / 48.0 + 5.0 * e8 / 32.0 + 5.0 * e6 / 12.0
                  + 5.0 * e4 / 12.0 - 1.0 / 6.0) * h ** 5
               + (e12 / 2304.0 + e10 / 192.0 + 5.0 * e8 / 192.0
                  + 5.0 * e6 / 72.0 + 5.0 * e4 / 48.0 + e2 / 12.0
                  + 1.0 / 36.0) * h ** 6)
    else:  # pragma: no cover
        raise ValueError(f"unhandled scheme {scheme!r}")
    return m11, 0.0, 0.0, m22, 0.0


def moment_map(scheme: SchemeId, model: LinearModelId, eta: float,
               h: float) -> MomentMap:
    """Exact moment recurrence coefficients for a scheme at (eta, h).

    Raises:
        ValueError: h <= 0 or non-finite inputs.
    """
    eta = float(eta)
    h = float(h)
    if not (h > 0.0 and math.isfinite(h)):
        raise ValueError(f"step size must be finite and positive, got {h!r}")
    if not math.isfinite(eta):
        raise ValueError(f"eta must be finite, got {eta!r}")
    if model is LinearModelId.BENCHMARK:
        m11, b1, m21, m22, b2 = _benchmark_coeffs(scheme, eta, h)
    else:
        m11, b1, m21, m22, b2 = _gbm_coeffs(scheme, eta, h)
    return MomentMap(scheme=scheme, model=model, eta=eta, h=h,
                     m11=m11, b1=b1, m21=m21, m22=m22, b2=b2)


def iterate_moments(mmap: MomentMap, x0: float, n_steps: int) -> np.ndarray:
    """Iterate the moment recurrence from the deterministic start x0.

    Returns:
        Array of shape (n_steps + 1, 2): column 0 holds mu1[n], column 1
        holds mu2[n], starting from (x0, x0^2).

    Raises:
        NumericOverflowError: a moment became non-finite; the error's step
            attribute holds the first offending step index.
    """
    n_steps = int(n_steps)
    if n_steps < 0:
        raise ValueError("n_steps must be non-negative")
    m11, b1 = mmap.m11, mmap.b1
    m21, m22, b2 = mmap.m21, mmap.m22, mmap.b2
    mu1 = float(x0)
    mu2 = mu1 * mu1
    out = np.empty((n_steps + 1, 2), dtype=float)
    out[0, 0] = mu1
    out[0, 1] = mu2
    for k in range(1, n_steps + 1):
        mu2 = m21 * mu1 + m22 * mu2 + b2
        mu1 = m11 * mu1 + b1
        if not (math.isfinite(mu1) and math.isfinite(mu2)):
            raise NumericOverflowError(
                f"moment recurrence overflowed at step {k} "
                f"({mmap.scheme.value}, eta={mmap.eta:g}, h={mmap.h:g})",
                step=k, scheme=mmap.scheme)
        out[k, 0] = mu1
        out[k, 1] = mu2
    return out


def amplification(scheme: SchemeId, model: LinearModelId, moment: int,
                  eta: float, h: float) -> float:
    """Self-coupling multiplier of the requested moment (m11 or m22).

    Raises:
        ValueError: moment not in {1, 2}.
    """
    mmap = moment_map(scheme, model, eta, h)
    if moment == 1:
        return mmap.m11
    if moment == 2:
        return mmap.m22
    raise ValueError("moment must be 1 or 2")


def is_stable(scheme: SchemeId, model: LinearModelId, moment: int,
              eta: float, h: float) -> bool:
    """Strict contractivity |multiplier| < 1 (marginal cases are unstable)."""
    return abs(amplification(scheme, model, moment, eta, h)) < 1.0


def fixed_point(mmap: MomentMap) -> FixedPoint:
    """Fixed point of the recurrence, where contractive.

    mu1 requires |m11| < 1; mu2 additionally requires |m22| < 1 because the
    second-moment row is driven by mu1.
    """
    c1 = abs(mmap.m11) < 1.0
    c2 = abs(mmap.m22) < 1.0
    mu1 = mmap.b1 / (1.0 - mmap.m11) if c1 else None
    mu2 = ((mmap.m21 * mu1 + mmap.b2) / (1.0 - mmap.m22)
           if (c1 and c2) else None)
    return FixedPoint(mu1=mu1, mu2=mu2, contractive1=c1, contractive2=c2)


def asymptotic_bias(scheme: SchemeId, model: LinearModelId, moment: int,
                    eta: float, h: float) -> float:
    """Fixed-point error against the exact equilibrium moment.

    For the benchmark the exact limits are 0 (first moment) and
    1/(2 - eta^2) (second moment, requires eta^2 < 2); for GBM both limits
    are 0 and every scheme is exact.

    Raises:
        StabilityDomainError: the map is not contractive in both moments at
            (eta, h), or the benchmark second moment does not exist.
    """
    if moment not in (1, 2):
        raise ValueError("moment must be 1 or 2")
    mmap = moment_map(scheme, model, eta, h)
    fp = fixed_point(mmap)
    if not (fp.contractive1 and fp.contractive2):
        raise StabilityDomainError(
            f"{scheme.value} on {model.value} not contractive in both "
            f"moments at eta={eta:g}, h={h:g}")
    if model is LinearModelId.BENCHMARK:
        if moment == 2 and not eta * eta < 2.0:
            raise StabilityDomainError(
                f"benchmark second moment does not exist for eta={eta:g}")
        exact = 0.0 if moment == 1 else 1.0 / (2.0 - eta * eta)
    else:
        exact = 0.0
    value = fp.mu1 if moment == 1 else fp.mu2
    return value - exact
