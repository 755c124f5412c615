"""Physical constants, frequency conversions, and complex immittances.

Unit conventions
----------------
All internal quantities are strict SI with *angular* frequency (rad/s).
Cyclic frequencies (Hz, GHz) appear only at file/CLI boundaries and are
converted exactly once, via :func:`to_angular` / :func:`to_cyclic`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SingularValueError

# 2022 CODATA values, fixed (not configurable).
FLUX_QUANTUM = 2.067833848e-15  # Wb
HBAR = 1.054571817e-34          # J s
BOLTZMANN = 1.380649e-23        # J/K


@dataclass(frozen=True)
class PhysicalConstants:
    """The three constants the model depends on."""

    flux_quantum: float = FLUX_QUANTUM
    reduced_planck: float = HBAR
    boltzmann: float = BOLTZMANN


CONSTANTS = PhysicalConstants()


def to_angular(f_hz):
    """Convert cyclic frequency in Hz to angular frequency in rad/s.

    Parameters
    ----------
    f_hz : float or ndarray
        Cyclic frequency, must be > 0.

    Returns
    -------
    float or ndarray
        2*pi*f in rad/s.
    """
    f = np.asarray(f_hz, dtype=float)
    if np.any(f <= 0.0) or not np.all(np.isfinite(f)):
        raise DomainError("cyclic frequency must be positive and finite")
    omega = 2.0 * math.pi * f
    return float(omega) if np.isscalar(f_hz) else omega


def to_cyclic(omega):
    """Convert angular frequency in rad/s back to cyclic frequency in Hz."""
    w = np.asarray(omega, dtype=float)
    if np.any(w <= 0.0) or not np.all(np.isfinite(w)):
        raise DomainError("angular frequency must be positive and finite")
    f = w / (2.0 * math.pi)
    return float(f) if np.isscalar(omega) else f


class ImmittanceKind(enum.Enum):
    IMPEDANCE = "impedance"   # ohms
    ADMITTANCE = "admittance"  # siemens

    def inverse(self) -> "ImmittanceKind":
        if self is ImmittanceKind.IMPEDANCE:
            return ImmittanceKind.ADMITTANCE
        return ImmittanceKind.IMPEDANCE


@dataclass(frozen=True)
class Immittance:
    """A complex impedance (ohms) or admittance (siemens) with a kind tag.

    Passive values satisfy Re >= 0; pumped (active) values may violate
    this, so no sign check is applied here.
    """

    value: complex
    kind: ImmittanceKind

    def invert(self) -> "Immittance":
        """Reciprocal value with the kind toggled."""
        if abs(self.value) == 0.0:
            raise SingularValueError("cannot invert a zero immittance")
        return Immittance(1.0 / self.value, self.kind.inverse())

    @property
    def z(self) -> complex:
        """Value expressed as an impedance in ohms."""
        if self.kind is ImmittanceKind.IMPEDANCE:
            return self.value
        if abs(self.value) == 0.0:
            raise SingularValueError("zero admittance has no finite impedance")
        return 1.0 / self.value

    @property
    def y(self) -> complex:
        """Value expressed as an admittance in siemens."""
        if self.kind is ImmittanceKind.ADMITTANCE:
            return self.value
        if abs(self.value) == 0.0:
            raise SingularValueError("zero impedance has no finite admittance")
        return 1.0 / self.value


def impedance(value: complex) -> Immittance:
    return Immittance(complex(value), ImmittanceKind.IMPEDANCE)


def admittance(value: complex) -> Immittance:
    return Immittance(complex(value), ImmittanceKind.ADMITTANCE)


def immittance_invert(x: Immittance) -> Immittance:
    """Functional form of :meth:`Immittance.invert`."""
    return x.invert()


def admittance_value(x) -> complex:
    """Accept an Immittance or a bare complex and return siemens."""
    if isinstance(x, Immittance):
        return x.y
    return complex(x)
