"""Exception types shared across the package."""


class Error(Exception):
    """Base class for all sdebench errors."""


class NumericOverflowError(Error):
    """A state, stage value or moment became non-finite or exceeded the
    overflow guard.  Carries enough context to locate the failure."""

    def __init__(self, message, *, x=None, scheme=None, stage=None, step=None):
        super().__init__(message)
        self.x = x
        self.scheme = scheme
        self.stage = stage
        self.step = step


class StabilityDomainError(Error):
    """An operation that requires contractive moment multipliers was called
    at a non-contractive (eta, h) point."""


class DegenerateSdeError(Error):
    """The affine SDE falls outside the classified reduction cases."""


class DiffusionSignError(Error):
    """The diffusion coefficient is not strictly positive on the requested
    quadrature domain.  Carries the offending location."""

    def __init__(self, message, *, x=None):
        super().__init__(message)
        self.x = x


class DomainTooSmallError(Error):
    """The stationary density does not vanish at the quadrature domain edges."""


class EnsembleCollapseError(Error):
    """Every trajectory of an ensemble overflowed; no estimate exists."""


class BracketError(Error):
    """A bisection bracket does not actually bracket a sign change."""


class ConfigError(Error):
    """Malformed configuration text, unknown key, or bad value."""
