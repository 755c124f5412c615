"""The published reference amplifier design.

A fully specified worked example of the model: a 50 pH SQUID shunted by
7.036 pF (bare resonance almost exactly 6 GHz, Q ~ 3.3), biased at a
third of a flux quantum, pumped at 12 GHz, and matched to 50 ohm
through a Ruthroff coupled-line transformer plus a series element
setting the in-band reactance slope.  With the drive at 0.106 flux
quanta and a 1.45 nH slope the design holds about 22 dB with under
1 dB of ripple over the central 400 MHz.

Every numeric claim in the test suite and the README about "the
reference design" refers to the values below.
"""

from __future__ import annotations

import numpy as np

from .gain import AmplifierConfig
from .network import (
    CoupledLineSpec,
    EnvironmentChain,
    RuthroffTransformer,
    SeriesTunedReactance,
)
from .pumpistor import OperatingPoint, SquidSpec

# SQUID: inductance at zero bias and the shared shunt capacitance.
REFERENCE_L_J = 50e-12            # H
REFERENCE_C = 7.036e-12           # F

# Operating point.
REFERENCE_PHI_DC = 1.0 / 3.0      # flux quanta
REFERENCE_PHI_AC = 0.106          # flux quanta
REFERENCE_F_PUMP = 12.0e9         # Hz

# Coupled-line transformer (odd mode near 10 ohm; the large even/odd
# ratio keeps the closed-form two-winding model valid).
REFERENCE_Z_ODD = 10.0            # ohm
REFERENCE_Z_EVEN = 7140.0         # ohm
REFERENCE_LINE_LENGTH = 0.8e-3    # m
REFERENCE_LINE_VELOCITY = 1.0e8   # m/s

# Matching element: series reactance slope, zero at the band center.
REFERENCE_SLOPE = 1.45e-9         # H
REFERENCE_SOURCE_IMPEDANCE = 50.0  # ohm

# Evaluation defaults.
REFERENCE_F_CENTER = 6.0e9        # Hz (half the pump)
REFERENCE_BAND_HALF_WIDTH = 0.2e9  # Hz (ripple band each side of center)

_TWO_PI = 2.0 * np.pi


def reference_squid() -> SquidSpec:
    return SquidSpec.from_inductance(REFERENCE_L_J, REFERENCE_C)


def reference_operating_point(phi_ac: float = REFERENCE_PHI_AC,
                              phi_dc: float = REFERENCE_PHI_DC
                              ) -> OperatingPoint:
    return OperatingPoint.from_flux_fractions(
        phi_dc, phi_ac, _TWO_PI * REFERENCE_F_PUMP)


def reference_transformer() -> CoupledLineSpec:
    return CoupledLineSpec(
        z_odd=REFERENCE_Z_ODD,
        z_even=REFERENCE_Z_EVEN,
        length=REFERENCE_LINE_LENGTH,
        odd_mode_velocity=REFERENCE_LINE_VELOCITY,
        z_high=REFERENCE_SOURCE_IMPEDANCE,
    )


def reference_environment(reactance_slope: float = REFERENCE_SLOPE
                          ) -> EnvironmentChain:
    elements = [RuthroffTransformer(reference_transformer())]
    if reactance_slope > 0.0:
        elements.append(SeriesTunedReactance(
            slope=reactance_slope,
            center_omega=_TWO_PI * REFERENCE_F_CENTER,
        ))
    return EnvironmentChain(
        source_impedance=REFERENCE_SOURCE_IMPEDANCE,
        elements=tuple(elements),
        shunt_capacitance=REFERENCE_C,
    )


def reference_amplifier(reactance_slope: float = REFERENCE_SLOPE,
                        phi_ac: float = REFERENCE_PHI_AC,
                        phi_dc: float = REFERENCE_PHI_DC
                        ) -> AmplifierConfig:
    return AmplifierConfig(
        squid=reference_squid(),
        operating_point=reference_operating_point(phi_ac, phi_dc),
        environment=reference_environment(reactance_slope),
    )


def reference_grid(points: int = 1601,
                   f_min: float = 4.0e9,
                   f_max: float = 8.0e9) -> np.ndarray:
    """Signal angular-frequency grid covering the useful band."""
    return _TWO_PI * np.linspace(f_min, f_max, points)


def reference_band() -> tuple:
    """Ripple-evaluation band: center +/- 200 MHz, in rad/s."""
    lo = REFERENCE_F_CENTER - REFERENCE_BAND_HALF_WIDTH
    hi = REFERENCE_F_CENTER + REFERENCE_BAND_HALF_WIDTH
    return (_TWO_PI * lo, _TWO_PI * hi)
