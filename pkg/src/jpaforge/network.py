"""Two-port cascade engine and the Ruthroff coupled-line transformer.

The transformer is the closed-form one-port of a pair of tightly coupled
lines joined in parallel at the low-impedance end and in series at the
high-impedance end.  Everything here is lossless; evaluations at
different frequencies are independent pure functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from .errors import DomainError, PoleError, SingularValueError, UsageError
from .quantities import Immittance, admittance, impedance

# Pole detection: |denominator| below this fraction of the high-side
# impedance counts as an evaluation exactly on the transformer pole.
POLE_REL_TOL = 1e-12


# ---------------------------------------------------------------------------
# ABCD matrices
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AbcdMatrix:
    """Chain matrix of a two-port: a, d dimensionless, b ohms, c siemens."""

    a: complex
    b: complex
    c: complex
    d: complex

    def __matmul__(self, other: "AbcdMatrix") -> "AbcdMatrix":
        return AbcdMatrix(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    @staticmethod
    def identity() -> "AbcdMatrix":
        return AbcdMatrix(1.0, 0.0, 0.0, 1.0)

    def determinant(self) -> complex:
        return self.a * self.d - self.b * self.c

    def is_reciprocal(self, tol: float = 1e-9) -> bool:
        return abs(self.determinant() - 1.0) <= tol

    def flipped(self) -> "AbcdMatrix":
        """Chain matrix of the same (reciprocal) two-port seen from the
        other side: a and d swap."""
        return AbcdMatrix(self.d, self.b, self.c, self.a)


def cascade(matrices) -> AbcdMatrix:
    """Left-to-right product of a sequence of ABCD matrices.

    An empty sequence yields the identity.
    """
    return reduce(lambda m, n: m @ n, matrices, AbcdMatrix.identity())


def electrical_angle(omega: float, length: float, velocity: float) -> float:
    """theta = beta*l with beta = omega/velocity, in radians."""
    if length < 0 or velocity <= 0:
        raise DomainError("length must be >= 0 and velocity > 0")
    if omega <= 0:
        raise DomainError("angular frequency must be positive")
    return omega * length / velocity


def tline_abcd(z_c: float, velocity: float, length: float, omega: float) -> AbcdMatrix:
    """ABCD matrix of a lossless transmission-line section.

    Parameters
    ----------
    z_c : float
        Characteristic impedance in ohms, > 0.
    velocity : float
        Phase velocity in m/s.
    length : float
        Physical length in m, >= 0.
    omega : float
        Angular frequency in rad/s.
    """
    if z_c <= 0:
        raise DomainError("characteristic impedance must be positive")
    theta = electrical_angle(omega, length, velocity)
    c, s = math.cos(theta), math.sin(theta)
    return AbcdMatrix(c, 1j * z_c * s, 1j * s / z_c, c)


# ---------------------------------------------------------------------------
# Coupled-line transformer
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CoupledLineSpec:
    """Physical and electrical parameters of the coupled-line transformer.

    The closed-form low-port impedance assumes tightly coupled lines, so
    the even/odd impedance ratio must be at least 50 (the reference
    device sits near 714).
    """

    z_odd: float
    z_even: float
    length: float
    odd_mode_velocity: float
    z_high: float = 50.0

    def __post_init__(self):
        if self.z_odd <= 0 or self.z_high <= 0:
            raise DomainError("mode and line impedances must be positive")
        if self.length <= 0 or self.odd_mode_velocity <= 0:
            raise DomainError("length and phase velocity must be positive")
        if self.z_even / self.z_odd < 50.0:
            raise DomainError(
                "even/odd impedance ratio %.3g is below 50; the closed-form "
                "transformer model does not apply" % (self.z_even / self.z_odd)
            )

    def theta(self, omega: float) -> float:
        return electrical_angle(omega, self.length, self.odd_mode_velocity)

    @property
    def cutoff_hz(self) -> float:
        """First pole of the transformer response (theta = pi), in Hz."""
        return self.odd_mode_velocity / (2.0 * self.length)


def _ruthroff_num_den(z_high, z_odd, theta):
    """Numerator and denominator of the low-port impedance (array-safe)."""
    c = np.cos(theta)
    s = np.sin(theta)
    num = 2.0 * z_odd * (z_high * c - 2j * z_odd * s)
    den = 4.0 * z_odd * (c + 1.0) - 1j * z_high * s
    return num, den


def ruthroff_impedance(spec: CoupledLineSpec, omega: float) -> Immittance:
    """Impedance seen at the transformer's low-impedance port.

    Raises
    ------
    PoleError
        If the electrical length sits on an odd multiple of pi, where
        the transformer response diverges (the cutoff frequency).
    """
    if omega <= 0:
        raise DomainError("angular frequency must be positive")
    theta = spec.theta(omega)
    num, den = _ruthroff_num_den(spec.z_high, spec.z_odd, theta)
    if abs(den) < POLE_REL_TOL * abs(spec.z_high):
        raise PoleError(
            "transformer pole at theta=%.6g rad (cutoff %.6g Hz)"
            % (theta, spec.cutoff_hz),
            cutoff_hz=spec.cutoff_hz,
        )
    return impedance(num / den)


def ruthroff_impedance_values(spec: CoupledLineSpec, omegas: np.ndarray):
    """Vectorized low-port impedance over a frequency grid.

    Returns
    -------
    (values, pole_mask) : (complex ndarray, bool ndarray)
        Impedances with NaN at pole points, and the mask of pole points.
    """
    theta = np.asarray(omegas, dtype=float) * spec.length / spec.odd_mode_velocity
    num, den = _ruthroff_num_den(spec.z_high, spec.z_odd, theta)
    pole = np.abs(den) < POLE_REL_TOL * abs(spec.z_high)
    z = np.empty_like(den, dtype=complex)
    np.divide(num, den, out=z, where=~pole)
    z[pole] = complex(math.nan, math.nan)
    return z, pole


def ruthroff_pole_angle(z_high: float, z_odd: float) -> float:
    """Numerically locate the smallest positive electrical length at
    which the transformer denominator vanishes.

    A coarse scan brackets the minimum of |denominator|, which is
    monotone on each side of the pole near it; golden-section search
    then shrinks the bracket.
    """
    if z_high <= 0 or z_odd <= 0:
        raise DomainError("impedances must be positive")

    def mag(theta):
        _, den = _ruthroff_num_den(z_high, z_odd, theta)
        return abs(den)

    grid = np.linspace(1e-3, 2.0 * math.pi - 1e-3, 4001)
    mags = np.abs(_ruthroff_num_den(z_high, z_odd, grid)[1])
    k = int(np.argmin(mags))
    lo = grid[max(k - 1, 0)]
    hi = grid[min(k + 1, grid.size - 1)]

    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = mag(c), mag(d)
    while b - a > 1e-12:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = mag(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = mag(d)
    return 0.5 * (a + b)


@dataclass(frozen=True)
class RatioPoint:
    """One row of a transformer sweep; ``error`` set instead of values
    when the grid point hits the pole."""

    omega: float
    z_ext: complex | None = None
    ratio_mag: float | None = None
    ratio_re: float | None = None
    error: str | None = None


def transformation_ratio(spec: CoupledLineSpec, omega_grid) -> list[RatioPoint]:
    """Impedance transformation ratio |Z_high / Z_ext| over a grid.

    Both the magnitude ratio and Re(Z_high/Z_ext) are recorded, since
    either may be compared against published transformation curves.
    Pole points are flagged per row, not fatal.
    """
    omegas = np.asarray(omega_grid, dtype=float)
    if omegas.size == 0:
        raise UsageError("frequency grid is empty")
    if omegas.size > 1 and not np.all(np.diff(omegas) > 0):
        raise UsageError("frequency grid must be strictly increasing")
    if np.any(omegas <= 0):
        raise DomainError("angular frequencies must be positive")

    z, pole = ruthroff_impedance_values(spec, omegas)
    points: list[RatioPoint] = []
    for i, w in enumerate(omegas):
        if pole[i]:
            points.append(RatioPoint(
                omega=float(w),
                error="pole at cutoff %.6g Hz" % spec.cutoff_hz,
            ))
            continue
        ratio = spec.z_high / z[i]
        points.append(RatioPoint(
            omega=float(w),
            z_ext=complex(z[i]),
            ratio_mag=float(abs(ratio)),
            ratio_re=float(ratio.real),
        ))
    return points


# ---------------------------------------------------------------------------
# Environment chain
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TransmissionLine:
    """Lossless line section: characteristic impedance, velocity, length."""
    z_c: float
    velocity: float
    length: float


@dataclass(frozen=True)
class SeriesInductor:
    inductance: float


@dataclass(frozen=True)
class SeriesCapacitor:
    capacitance: float


@dataclass(frozen=True)
class ShuntCapacitor:
    capacitance: float


@dataclass(frozen=True)
class SeriesTunedReactance:
    """Series L-C pair resonant at ``center_omega``.

    Contributes zero reactance at the center frequency and a chosen
    reactance slope there: X(w) = (slope/2)*(w - center^2/w), so
    dX/dw = slope exactly at w = center.  This is the knob for shaping
    the gain profile without detuning the resonance (equivalently an
    inductor slope/2 in series with a capacitor 2/(slope*center^2));
    slope zero degenerates to a through connection.
    """

    slope: float          # H (ohms per rad/s at the center)
    center_omega: float   # rad/s

    def __post_init__(self):
        if self.slope < 0:
            raise DomainError("reactance slope must be >= 0")
        if self.center_omega <= 0:
            raise DomainError("center frequency must be positive")

    def reactance(self, omega):
        return 0.5 * self.slope * (omega - self.center_omega ** 2 / omega)


@dataclass(frozen=True)
class RuthroffTransformer:
    """Transformer element; modeled as the closed-form one-port, so it
    must sit directly at the source end of the chain."""
    spec: CoupledLineSpec


ChainElement = (TransmissionLine, SeriesInductor, SeriesCapacitor,
                ShuntCapacitor, SeriesTunedReactance, RuthroffTransformer)


@dataclass(frozen=True)
class EnvironmentChain:
    """Everything between the real source and the SQUID plane.

    ``elements`` are ordered from the source toward the SQUID;
    ``shunt_capacitance`` is the resonance capacitor sitting at the
    SQUID plane itself.
    """

    source_impedance: float = 50.0
    elements: tuple = field(default_factory=tuple)
    shunt_capacitance: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))
        if self.source_impedance <= 0:
            raise DomainError("source impedance must be positive")
        if self.shunt_capacitance < 0:
            raise DomainError("shunt capacitance must be >= 0")
        for i, el in enumerate(self.elements):
            if not isinstance(el, ChainElement):
                raise UsageError("unknown chain element %r" % (el,))
            if isinstance(el, RuthroffTransformer):
                if i != 0:
                    raise UsageError(
                        "the transformer must be the element adjacent to "
                        "the source (index 0, got %d)" % i
                    )
                if not math.isclose(el.spec.z_high, self.source_impedance,
                                    rel_tol=1e-9):
                    raise UsageError(
                        "transformer high-side impedance %.6g ohm must match "
                        "the source impedance %.6g ohm"
                        % (el.spec.z_high, self.source_impedance)
                    )


def element_abcd(element, omega: float) -> AbcdMatrix:
    """ABCD matrix of a single chain element, source-to-SQUID orientation."""
    if isinstance(element, TransmissionLine):
        return tline_abcd(element.z_c, element.velocity, element.length, omega)
    if isinstance(element, SeriesInductor):
        return AbcdMatrix(1.0, 1j * omega * element.inductance, 0.0, 1.0)
    if isinstance(element, SeriesCapacitor):
        if element.capacitance <= 0:
            raise DomainError("series capacitance must be positive")
        return AbcdMatrix(1.0, 1.0 / (1j * omega * element.capacitance), 0.0, 1.0)
    if isinstance(element, ShuntCapacitor):
        return AbcdMatrix(1.0, 0.0, 1j * omega * element.capacitance, 1.0)
    if isinstance(element, SeriesTunedReactance):
        return AbcdMatrix(1.0, 1j * element.reactance(omega), 0.0, 1.0)
    raise UsageError("element %r has no two-port representation" % (element,))


def _base_impedance(chain: EnvironmentChain, omega: float) -> tuple[complex, tuple]:
    """Impedance terminating the cascade (source, or source seen through
    the transformer) and the remaining two-port elements."""
    elements = chain.elements
    if elements and isinstance(elements[0], RuthroffTransformer):
        z0 = ruthroff_impedance(elements[0].spec, omega).z
        return z0, elements[1:]
    return complex(chain.source_impedance), elements


def environment_admittance(chain: EnvironmentChain, omega: float) -> Immittance:
    """Admittance seen looking back from the SQUID plane, including the
    resonance capacitor's j*omega*C term.
    """
    if omega <= 0:
        raise DomainError("angular frequency must be positive")
    z0, elements = _base_impedance(chain, omega)
    m = cascade(element_abcd(el, omega) for el in elements)
    # Looking back through the (reciprocal) chain: flip of the forward
    # cascade applied to the terminating impedance.
    den = m.d * z0 + m.b
    if abs(den) == 0.0:
        raise SingularValueError(
            "environment shows zero impedance at omega=%.6g rad/s" % omega
        )
    y_back = (m.c * z0 + m.a) / den
    return admittance(y_back + 1j * omega * chain.shunt_capacitance)


def environment_admittance_values(chain: EnvironmentChain, omegas):
    """Vectorized environment admittance over a frequency grid.

    Returns
    -------
    (values, faults) : (complex ndarray, dict[int, str])
        Admittances with NaN at faulted points; faults map grid index to
        a reason string (transformer poles, zero-impedance points).
    """
    omegas = np.asarray(omegas, dtype=float)
    faults: dict[int, str] = {}

    elements = chain.elements
    if elements and isinstance(elements[0], RuthroffTransformer):
        z0, pole = ruthroff_impedance_values(elements[0].spec, omegas)
        rest = elements[1:]
        for i in np.nonzero(pole)[0]:
            faults[int(i)] = (
                "transformer pole (cutoff %.6g Hz)"
                % elements[0].spec.cutoff_hz
            )
    else:
        z0 = np.full(omegas.shape, complex(chain.source_impedance))
        rest = elements

    a = np.ones_like(z0)
    b = np.zeros_like(z0)
    c = np.zeros_like(z0)
    d = np.ones_like(z0)
    for el in rest:
        if isinstance(el, TransmissionLine):
            theta = omegas * el.length / el.velocity
            ea = np.cos(theta)
            eb = 1j * el.z_c * np.sin(theta)
            ec = 1j * np.sin(theta) / el.z_c
            ed = ea
        elif isinstance(el, SeriesInductor):
            ea = np.ones_like(omegas)
            eb = 1j * omegas * el.inductance
            ec = np.zeros_like(z0)
            ed = ea
        elif isinstance(el, SeriesCapacitor):
            ea = np.ones_like(omegas)
            eb = 1.0 / (1j * omegas * el.capacitance)
            ec = np.zeros_like(z0)
            ed = ea
        elif isinstance(el, ShuntCapacitor):
            ea = np.ones_like(omegas)
            eb = np.zeros_like(z0)
            ec = 1j * omegas * el.capacitance
            ed = ea
        elif isinstance(el, SeriesTunedReactance):
            ea = np.ones_like(omegas)
            eb = 1j * el.reactance(omegas)
            ec = np.zeros_like(z0)
            ed = ea
        else:
            raise UsageError("element %r has no two-port representation" % (el,))
        a, b, c, d = a * ea + b * ec, a * eb + b * ed, c * ea + d * ec, c * eb + d * ed

    den = d * z0 + b
    bad = ~np.isfinite(den) | (np.abs(den) == 0.0)
    y = np.empty_like(z0)
    ok = ~bad
    y[ok] = (c[ok] * z0[ok] + a[ok]) / den[ok]
    y[bad] = complex(math.nan, math.nan)
    for i in np.nonzero(bad)[0]:
        faults.setdefault(int(i), "environment impedance singular")
    y = y + 1j * omegas * chain.shunt_capacitance
    return y, faults


def environment_impedance(chain: EnvironmentChain, omega: float) -> Immittance:
    """Impedance form of :func:`environment_admittance`."""
    return environment_admittance(chain, omega).invert()


def reactance_slope(chain: EnvironmentChain, omega0: float) -> float:
    """Slope of the environment reactance d Im(Z_ext)/d omega at omega0,
    in henries, by central finite difference with step 1e-5*omega0.
    """
    if omega0 <= 0:
        raise DomainError("angular frequency must be positive")
    h = 1e-5 * omega0
    try:
        z_hi = environment_impedance(chain, omega0 + h).z
        z_lo = environment_impedance(chain, omega0 - h).z
    except PoleError as exc:
        raise PoleError(
            "transformer pole within the finite-difference stencil around "
            "omega=%.6g rad/s" % omega0,
            cutoff_hz=exc.cutoff_hz,
        ) from exc
    return (z_hi.imag - z_lo.imag) / (2.0 * h)
