"""Small-signal model of the flux-pumped SQUID.

The modulated SQUID is replaced by a static two-branch admittance: an
inductive branch L0 set by the DC flux bias, and a pumped branch whose
series combination of L1 and the complex element X carries the
parametric coupling.  A negative real part of X is what produces gain,
and it appears whenever the environment at the idler frequency has a
positive real admittance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateBiasError,
    DivergenceError,
    DomainError,
    SingularOperatingPointError,
)
from .quantities import FLUX_QUANTUM, Immittance, admittance


def squid_inductance(critical_current: float) -> float:
    """Zero-bias SQUID inductance flux_quantum / (2*pi*I_c), in henries."""
    if critical_current <= 0:
        raise DomainError("critical current must be positive")
    return FLUX_QUANTUM / (2.0 * math.pi * critical_current)


@dataclass(frozen=True)
class SquidSpec:
    """SQUID critical current and the resonance capacitor shunting it."""

    critical_current: float
    shunt_capacitance: float

    def __post_init__(self):
        if self.critical_current <= 0:
            raise DomainError("critical current must be positive")
        if self.shunt_capacitance < 0:
            raise DomainError("shunt capacitance must be >= 0")

    @property
    def zero_bias_inductance(self) -> float:
        return squid_inductance(self.critical_current)

    @classmethod
    def from_inductance(cls, inductance: float,
                        shunt_capacitance: float) -> "SquidSpec":
        """Build from a target zero-bias inductance instead of I_c."""
        if inductance <= 0:
            raise DomainError("inductance must be positive")
        return cls(FLUX_QUANTUM / (2.0 * math.pi * inductance),
                   shunt_capacitance)


@dataclass(frozen=True)
class OperatingPoint:
    """Flux bias, flux modulation amplitude, and pump frequency.

    Fluxes are stored in webers; the DC bias must sit strictly below
    half a flux quantum so the cosine in L0 stays positive.
    """

    flux_dc: float
    flux_ac: float
    pump_omega: float

    def __post_init__(self):
        ratio = self.flux_dc / FLUX_QUANTUM
        if not 0.0 <= ratio < 0.5:
            raise DomainError(
                "DC flux must satisfy 0 <= flux/flux_quantum < 0.5 "
                "(got %.6g)" % ratio
            )
        if self.flux_ac <= 0:
            raise DomainError("AC flux amplitude must be positive")
        if self.pump_omega <= 0:
            raise DomainError("pump frequency must be positive")

    @classmethod
    def from_flux_fractions(cls, phi_dc_over_phi0: float,
                            phi_ac_over_phi0: float,
                            pump_omega: float) -> "OperatingPoint":
        return cls(phi_dc_over_phi0 * FLUX_QUANTUM,
                   phi_ac_over_phi0 * FLUX_QUANTUM,
                   pump_omega)

    @property
    def phi_dc_over_phi0(self) -> float:
        return self.flux_dc / FLUX_QUANTUM

    @property
    def phi_ac_over_phi0(self) -> float:
        return self.flux_ac / FLUX_QUANTUM

    def idler_omega(self, signal_omega: float) -> float:
        """omega_i = omega_p - omega_s; must come out positive."""
        w_i = self.pump_omega - signal_omega
        if np.any(np.asarray(w_i) <= 0):
            raise DomainError("idler frequency must be positive")
        return w_i


@dataclass(frozen=True)
class PumpistorElements:
    """L0 and L1 in henries; X in ohms (complex).  X may be an array
    when built from a frequency grid."""

    l0: float
    l1: float
    x: complex


# pi to extended precision so that cos(pi*x)/sin(pi*x) round correctly at
# simple rational biases (e.g. cos(pi/3) comes out exactly 0.5).
_PI_LONG = np.longdouble("3.14159265358979323846264338327950288")


def _bias_trig(flux_dc: float) -> tuple[float, float]:
    ratio = flux_dc / FLUX_QUANTUM
    if not 0.0 <= ratio < 0.5:
        if ratio == 0.5:
            raise DivergenceError("bias at half a flux quantum: L0 diverges")
        raise DomainError("DC flux fraction %.6g outside [0, 0.5)" % ratio)
    phase = _PI_LONG * np.longdouble(ratio)
    return float(np.cos(phase)), float(np.sin(phase))


def pumpistor_elements(squid: SquidSpec, op: OperatingPoint,
                       signal_omega, y_ext_idler) -> PumpistorElements:
    """Evaluate L0, L1 and X at a signal frequency.

    Parameters
    ----------
    signal_omega : float or ndarray
        Signal angular frequency (rad/s); the idler is pump - signal.
    y_ext_idler : complex, Immittance or ndarray
        Environment admittance at the idler frequency, in siemens.  Its
        complex conjugate enters X.
    """
    cos_f, sin_f = _bias_trig(op.flux_dc)
    if sin_f == 0.0:
        raise DegenerateBiasError(
            "zero DC bias gives no parametric coupling (sin term vanishes)"
        )
    w_s = np.asarray(signal_omega, dtype=float)
    w_i = op.idler_omega(w_s)
    if isinstance(y_ext_idler, Immittance):
        y_i = y_ext_idler.y
    else:
        y_i = np.asarray(y_ext_idler, dtype=complex)

    l_j = squid.zero_bias_inductance
    drive = (FLUX_QUANTUM / op.flux_ac) ** 2
    pis2 = math.pi ** 2 * sin_f ** 2

    l0 = l_j / cos_f
    l1 = -4.0 * l_j * cos_f / pis2 * drive
    x = -4.0 * w_s * w_i * l_j ** 2 * np.conj(y_i) / pis2 * drive
    if x.ndim == 0:
        x = complex(x)
    return PumpistorElements(l0=l0, l1=l1, x=x)


def pumpistor_admittance(elems: PumpistorElements, signal_omega: float) -> Immittance:
    """Two-branch admittance 1/(j w L0) + 1/(j w L1 + X), in siemens."""
    y, faults = pumpistor_admittance_values(elems, signal_omega)
    if faults:
        raise SingularOperatingPointError(
            "pumped branch impedance vanishes at omega=%.6g rad/s"
            % float(np.asarray(signal_omega).reshape(-1)[0])
        )
    return admittance(complex(y))


def pumpistor_admittance_values(elems: PumpistorElements, signal_omega):
    """Array-safe admittance evaluation.

    Returns the admittance values (NaN where the pumped branch is
    singular) along with a map of faulted indices.
    """
    w = np.asarray(signal_omega, dtype=float)
    den = 1j * w * elems.l1 + elems.x
    scale = np.abs(w * elems.l1) + np.abs(elems.x)
    bad = np.abs(den) <= 1e-15 * scale
    y = np.where(bad, complex(math.nan, math.nan),
                 1.0 / (1j * w * elems.l0) + 1.0 / np.where(bad, 1.0, den))
    faults = {int(i): "pumped branch impedance vanishes"
              for i in np.nonzero(np.atleast_1d(bad))[0]}
    return y, faults


def bare_resonance(squid: SquidSpec, flux_dc: float,
                   z0: float) -> tuple[float, float]:
    """Unpumped resonance frequency and quality factor.

    Returns
    -------
    (omega0, q) : (float, float)
        omega0 = 1/sqrt(L0*C) in rad/s and Q = omega0*Z0*C.
    """
    if squid.shunt_capacitance <= 0:
        raise DomainError("resonance requires a positive shunt capacitance")
    if z0 <= 0:
        raise DomainError("environment impedance must be positive")
    cos_f, _ = _bias_trig(flux_dc)
    l0 = squid.zero_bias_inductance / cos_f
    omega0 = 1.0 / math.sqrt(l0 * squid.shunt_capacitance)
    q = omega0 * z0 * squid.shunt_capacitance
    return omega0, q
