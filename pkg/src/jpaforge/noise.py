"""Hot/cold-load noise calibration: forward model and least-squares fit.

The measured noise spectral density, referenced to the amplifier input
in kelvin-equivalent units, is linear in the Planck occupancy of the
source: S = 2*G*(P(w,T) + T_sys).  The factor 2 is fixed — noise enters
at both the signal and the idler frequency.  Fitting S against P over a
set of source temperatures yields the gain and the system noise
temperature, which converts to added photons against the standard
quantum limit.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateFitError, DomainError
from .quantities import BOLTZMANN, HBAR

# Below this span ratio the two fit parameters are nearly collinear.
MIN_SPAN_RATIO = 2.0


def planck_occupancy_temperature(omega, temperature):
    """Planck term (hbar*w/k_B)/(exp(hbar*w/(k_B*T)) - 1), in kelvin.

    Strictly increasing in T, strictly decreasing in omega; approaches
    T - hbar*w/(2*k_B) in the Rayleigh-Jeans limit and freezes out
    exponentially for k_B*T << hbar*w.
    """
    w = np.asarray(omega, dtype=float)
    t = np.asarray(temperature, dtype=float)
    if np.any(w <= 0):
        raise DomainError("angular frequency must be positive")
    if np.any(t <= 0):
        raise DomainError("temperature must be positive")
    quantum = HBAR * w / BOLTZMANN
    with np.errstate(over="ignore"):
        p = quantum / np.expm1(quantum / t)
    if p.ndim == 0:
        return float(p)
    return p


def noise_forward(omega, temperature, gain, t_sys):
    """Input-referred noise density S = 2*G*(P(w,T) + T_sys)."""
    if np.any(np.asarray(gain) <= 0):
        raise DomainError("gain must be positive")
    if np.any(np.asarray(t_sys) < 0):
        raise DomainError("system noise temperature must be >= 0")
    return 2.0 * gain * (planck_occupancy_temperature(omega, temperature) + t_sys)


def sql_temperature(omega):
    """Standard-quantum-limit temperature hbar*w/(2*k_B), in kelvin."""
    if np.any(np.asarray(omega) <= 0):
        raise DomainError("angular frequency must be positive")
    return 0.5 * HBAR * np.asarray(omega, dtype=float) / BOLTZMANN \
        if np.ndim(omega) else 0.5 * HBAR * omega / BOLTZMANN


def added_photons(t_sys, omega):
    """Added noise quanta k_B*T_sys/(hbar*w).

    Computed as T_sys/(2*T_SQL(w)), which is the same expression and
    makes added_photons(sql_temperature(w), w) == 0.5 an exact identity.
    """
    if np.any(np.asarray(t_sys) < 0):
        raise DomainError("system noise temperature must be >= 0")
    return 0.5 * t_sys / sql_temperature(omega)


@dataclass(frozen=True)
class NoiseDataset:
    """(T, S) calibration samples at one signal frequency.

    Parameters
    ----------
    omega : float
        Signal angular frequency (rad/s).
    temperatures : sequence of float
        Source temperatures in kelvin, at least two, all positive.
    psd : sequence of float
        Input-referred noise density in kelvin-equivalent units.
    weights : sequence of float, optional
        Per-sample least-squares weights (positive).
    """

    omega: float
    temperatures: tuple
    psd: tuple
    weights: tuple | None = None

    def __post_init__(self):
        t = tuple(float(v) for v in self.temperatures)
        s = tuple(float(v) for v in self.psd)
        object.__setattr__(self, "temperatures", t)
        object.__setattr__(self, "psd", s)
        if self.omega <= 0:
            raise DomainError("angular frequency must be positive")
        if len(t) < 2:
            raise DomainError("need at least two calibration samples")
        if len(s) != len(t):
            raise DomainError("temperature and density lists differ in length")
        if any(v <= 0 for v in t):
            raise DomainError("all source temperatures must be positive")
        if self.weights is not None:
            w = tuple(float(v) for v in self.weights)
            object.__setattr__(self, "weights", w)
            if len(w) != len(t):
                raise DomainError("weight list length mismatch")
            if any(v <= 0 for v in w):
                raise DomainError("weights must be positive")
        if max(t) / min(t) < MIN_SPAN_RATIO:
            warnings.warn(
                "temperature span ratio %.2f is below %.0f; "
                "the fit may be ill-conditioned"
                % (max(t) / min(t), MIN_SPAN_RATIO),
                stacklevel=2,
            )

    def __len__(self) -> int:
        return len(self.temperatures)


@dataclass(frozen=True)
class NoiseFitResult:
    """Calibration fit output.

    ``t_sys`` is clamped to zero (with ``clamped`` set) when the
    unconstrained fit is negative — a signal of a calibration problem,
    not an error.
    """

    omega: float
    gain: float
    t_sys: float
    n_add: float
    residual_rms: float
    gain_std_error: float
    t_sys_std_error: float
    clamped: bool


def fit_noise(data: NoiseDataset) -> NoiseFitResult:
    """Least-squares fit of S = a*P(w,T) + b, with G = a/2, T_sys = b/a.

    Closed-form (weighted) normal equations; parameter standard errors
    from the residual variance.

    Raises
    ------
    DegenerateFitError
        If all sample temperatures coincide (rank-deficient design) or
        the fitted slope is not positive.
    """
    t = np.array(data.temperatures, dtype=float)
    s = np.array(data.psd, dtype=float)
    w = np.ones_like(t) if data.weights is None \
        else np.array(data.weights, dtype=float)
    p = planck_occupancy_temperature(data.omega, t)

    spread = float(np.max(p) - np.min(p))
    if spread <= 1e-12 * float(np.max(np.abs(p))):
        raise DegenerateFitError(
            "all sample temperatures are equal; the gain and noise "
            "parameters cannot be separated"
        )

    sw = float(np.sum(w))
    sx = float(np.sum(w * p))
    sxx = float(np.sum(w * p * p))
    sy = float(np.sum(w * s))
    sxy = float(np.sum(w * p * s))
    delta = sw * sxx - sx * sx
    a = (sw * sxy - sx * sy) / delta
    b = (sxx * sy - sx * sxy) / delta
    if a <= 0:
        raise DegenerateFitError(
            "fitted slope is not positive; the dataset is inconsistent "
            "with an amplifying chain"
        )

    resid = s - (a * p + b)
    residual_rms = math.sqrt(float(np.sum(w * resid * resid)) / sw)

    dof = len(data) - 2
    sigma2 = float(np.sum(w * resid * resid)) / dof if dof > 0 else 0.0
    var_a = sigma2 * sw / delta
    var_b = sigma2 * sxx / delta
    cov_ab = -sigma2 * sx / delta

    t_sys_raw = b / a
    clamped = t_sys_raw < 0.0
    t_sys = 0.0 if clamped else t_sys_raw
    # First-order propagation of (a, b) covariance through b/a.
    var_tsys = (var_b / a ** 2
                + (b ** 2 / a ** 4) * var_a
                - 2.0 * (b / a ** 3) * cov_ab)

    return NoiseFitResult(
        omega=data.omega,
        gain=a / 2.0,
        t_sys=t_sys,
        n_add=float(added_photons(t_sys, data.omega)),
        residual_rms=residual_rms,
        gain_std_error=math.sqrt(max(var_a, 0.0)) / 2.0,
        t_sys_std_error=math.sqrt(max(var_tsys, 0.0)),
        clamped=clamped,
    )
