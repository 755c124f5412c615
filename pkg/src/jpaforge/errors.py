"""Exception hierarchy for the jpaforge toolkit.

Numeric singularities are reported as typed errors rather than
infinities so that sweep outputs stay finite and machine-parsable.
"""

from __future__ import annotations


class JpaForgeError(Exception):
    """Base class for all jpaforge errors."""


class UsageError(JpaForgeError):
    """Invalid arguments: empty grids, unknown parameter names, bad shapes."""


class ConfigError(UsageError):
    """Malformed or incomplete configuration file."""


class DomainError(JpaForgeError):
    """Physical input outside its valid domain (e.g. nonpositive frequency)."""


class SingularValueError(JpaForgeError):
    """Inversion of a zero-magnitude immittance."""


class PoleError(JpaForgeError):
    """Evaluation at a transformer pole (electrical length at an odd
    multiple of pi).  Carries the cutoff frequency in Hz when known."""

    def __init__(self, message: str, cutoff_hz: float | None = None):
        super().__init__(message)
        self.cutoff_hz = cutoff_hz


class DivergenceError(JpaForgeError):
    """Bias flux at half a flux quantum: cos term vanishes, L0 diverges."""


class DegenerateBiasError(JpaForgeError):
    """Zero DC bias flux with pumping requested: sin term vanishes, no
    parametric coupling."""


class SingularOperatingPointError(JpaForgeError):
    """The pumped-branch denominator j*w*L1 + X vanishes."""


class OscillationThresholdError(JpaForgeError):
    """Reflection-gain denominator vanishes: the amplifier self-oscillates."""


class NoBandwidthError(JpaForgeError):
    """Requested bandwidth level lies above the curve's peak gain."""


class DegenerateFitError(JpaForgeError):
    """Noise fit with a rank-deficient design (all temperatures equal)."""
