"""Asymptotic stability regions of the moment recurrences.

For a fixed eta, each scheme's moment multiplier |m(h)| crosses 1 at some
largest usable step size.  This module locates those thresholds by a uniform
scan plus bisection, rasterizes whole (eta, h) regions, and finds the eta at
which two schemes swap stability ordering.  The scan route is deliberately
independent of the closed-form thresholds that exist for some schemes; those
closed forms act as oracles in the test suite, not here.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import SchemeId
from .errors import BracketError
from .momentmaps import LinearModelId, amplification

__all__ = [
    "SCAN_CEILING",
    "SCAN_RESOLUTION",
    "StabilityBoundary",
    "RegionGrid",
    "scan_stable_intervals",
    "max_stable_h",
    "trace_boundary",
    "region_grid",
    "crossover_eta",
]

# Scan window (0, SCAN_CEILING] walked at SCAN_RESOLUTION; every multiplier
# polynomial grows without bound in h, so the ceiling never binds.
SCAN_CEILING = 8.0
SCAN_RESOLUTION = 1e-3
# Interval endpoints are refined by bisection to this width (tighter than
# the 1e-9 the results are quoted at).
_BISECT_TOL = 1e-11


@dataclass(frozen=True)
class StabilityBoundary:
    """Largest stable h per eta for one (scheme, model, moment).

    warnings lists (eta, (lo, hi)) for stable h-intervals disconnected from
    the origin; those are reported, never folded into h_max.
    """

    scheme: SchemeId
    model: LinearModelId
    moment: int
    etas: np.ndarray
    h_max: np.ndarray
    warnings: tuple = field(default_factory=tuple)


@dataclass(frozen=True)
class RegionGrid:
    """Boolean stability raster over a uniform (eta, h) grid."""

    scheme: SchemeId
    model: LinearModelId
    moment: int
    eta_axis: np.ndarray
    h_axis: np.ndarray
    stable: np.ndarray  # shape (len(eta_axis), len(h_axis))


def _stable_at(scheme, model, moment, eta, h):
    return abs(amplification(scheme, model, moment, eta, h)) < 1.0


def _refine(scheme, model, moment, eta, h_stable, h_unstable):
    """Bisect the stable/unstable flip between two scan points.

    Works for either ordering of the two endpoints (upper edges have the
    unstable point above, lower edges of detached intervals have it below);
    returns the stable side of the flip.
    """
    while abs(h_unstable - h_stable) > _BISECT_TOL:
        mid = 0.5 * (h_stable + h_unstable)
        if _stable_at(scheme, model, moment, eta, mid):
            h_stable = mid
        else:
            h_unstable = mid
    return h_stable


def scan_stable_intervals(scheme: SchemeId, model: LinearModelId, moment: int,
                          eta: float) -> list:
    """All maximal stable h-intervals found in the scan window.

    Returns a list of (lo, hi) pairs with endpoints refined by bisection;
    marginal |multiplier| = 1 counts as unstable.  An interval that starts
    at the scan floor is reported with lo = 0.0.
    """
    if moment not in (1, 2):
        raise ValueError("moment must be 1 or 2")
    n = int(round(SCAN_CEILING / SCAN_RESOLUTION))
    hs = SCAN_RESOLUTION * np.arange(1, n + 1)
    flags = [_stable_at(scheme, model, moment, eta, h) for h in hs]
    intervals = []
    k = 0
    while k < n:
        if not flags[k]:
            k += 1
            continue
        start = k
        while k + 1 < n and flags[k + 1]:
            k += 1
        # stable run from hs[start] to hs[k]
        if start == 0:
            lo = 0.0
        else:
            lo = _refine(scheme, model, moment, eta,
                         h_stable=hs[start], h_unstable=hs[start - 1])
        if k == n - 1:
            hi = hs[k]
        else:
            hi = _refine(scheme, model, moment, eta,
                         h_stable=hs[k], h_unstable=hs[k + 1])
        intervals.append((lo, hi))
        k += 1
    return intervals


def max_stable_h(scheme: SchemeId, model: LinearModelId, moment: int,
                 eta: float) -> float:
    """Supremum of the stable h-interval attached to the origin.

    Returns 0.0 when the scan floor itself is unstable (no usable h).
    Stable intervals disconnected from the origin do not count; use
    scan_stable_intervals or trace_boundary to see them.
    """
    intervals = scan_stable_intervals(scheme, model, moment, eta)
    if not intervals or intervals[0][0] != 0.0:
        return 0.0
    return intervals[0][1]


def trace_boundary(scheme: SchemeId, model: LinearModelId, moment: int,
                   etas) -> StabilityBoundary:
    """max_stable_h along an eta grid, collecting disconnected-interval
    warnings instead of hiding them."""
    etas = np.asarray(etas, dtype=float)
    h_max = np.empty_like(etas)
    warnings = []
    for i, eta in enumerate(etas):
        intervals = scan_stable_intervals(scheme, model, moment, eta)
        if intervals and intervals[0][0] == 0.0:
            h_max[i] = intervals[0][1]
            extras = intervals[1:]
        else:
            h_max[i] = 0.0
            extras = intervals
        for pair in extras:
            warnings.append((float(eta), pair))
    return StabilityBoundary(scheme=scheme, model=model, moment=moment,
                             etas=etas, h_max=h_max,
                             warnings=tuple(warnings))


def region_grid(scheme: SchemeId, model: LinearModelId, moment: int,
                eta_range, h_range, resolution) -> RegionGrid:
    """Rasterize the stability verdict over a uniform grid.

    Args:
        eta_range: (lo, hi) inclusive.
        h_range: (lo, hi) inclusive, lo > 0.
        resolution: (n_eta, n_h) grid point counts.

    Raises:
        ValueError: empty or non-positive grid specification.
    """
    n_eta, n_h = (int(resolution[0]), int(resolution[1]))
    if n_eta < 1 or n_h < 1:
        raise ValueError("resolution must be at least 1 point per axis")
    if not h_range[0] > 0.0:
        raise ValueError("h grid must start strictly above 0")
    eta_axis = np.linspace(eta_range[0], eta_range[1], n_eta)
    h_axis = np.linspace(h_range[0], h_range[1], n_h)
    stable = np.empty((n_eta, n_h), dtype=bool)
    for i, eta in enumerate(eta_axis):
        for j, h in enumerate(h_axis):
            stable[i, j] = _stable_at(scheme, model, moment, eta, h)
    return RegionGrid(scheme=scheme, model=model, moment=moment,
                      eta_axis=eta_axis, h_axis=h_axis, stable=stable)


def crossover_eta(scheme_a: SchemeId, scheme_b: SchemeId,
                  model: LinearModelId, moment: int, bracket) -> float:
    """The eta at which max_stable_h(scheme_a) - max_stable_h(scheme_b)
    changes sign, bisected to 1e-5.

    Raises:
        BracketError: the difference has the same sign at both bracket ends.
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    if not hi > lo:
        raise ValueError("bracket must satisfy lo < hi")

    def diff(eta):
        return (max_stable_h(scheme_a, model, moment, eta)
                - max_stable_h(scheme_b, model, moment, eta))

    f_lo = diff(lo)
    f_hi = diff(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if (f_lo > 0.0) == (f_hi > 0.0):
        raise BracketError(
            f"stability difference of {scheme_a.value} vs {scheme_b.value} "
            f"does not change sign on [{lo:g}, {hi:g}]")
    while hi - lo > 1e-5:
        mid = 0.5 * (lo + hi)
        f_mid = diff(mid)
        if f_mid == 0.0:
            return mid
        if (f_mid > 0.0) == (f_lo > 0.0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
