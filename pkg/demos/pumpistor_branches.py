#!/usr/bin/env python3
"""Small-signal picture of the flux-pumped SQUID.

Three elements describe the SQUID seen from the signal port: a static
inductance L0 set by the DC flux bias, and a pumped branch (L1 in
series with a complex X) that only exists while the AC flux drive is
on.  Two things matter for an amplifier:

  * Re(X) < 0 whenever the idler load is dissipative — that negative
    resistance is the gain mechanism;
  * both L1 and X scale with (1/phi_ac)^2, so the branch disappears
    smoothly as the drive is turned down.

Run it:  python3 demos/pumpistor_branches.py
"""

import math

import numpy as np

from jpaforge import (OperatingPoint, SquidSpec, bare_resonance,
                      pumpistor_elements)

TWO_PI = 2 * math.pi


def main():
    squid = SquidSpec.from_inductance(50e-12, 7.036e-12)
    print("SQUID: L_J = %.1f pH, shunt C = %.3f pF"
          % (squid.zero_bias_inductance * 1e12,
             squid.shunt_capacitance * 1e12))

    print("\nstatic inductance vs DC flux bias (pump off):")
    print("%12s  %10s  %12s" % ("phi_dc/phi0", "L0 (pH)", "f_res (GHz)"))
    for frac in (0.1, 0.2, 1 / 3, 0.4, 0.45):
        op = OperatingPoint.from_flux_fractions(frac, 0.02, TWO_PI * 12e9)
        elems = pumpistor_elements(squid, op, TWO_PI * 6e9, 0.0j)
        omega0, _ = bare_resonance(squid, op.flux_dc, 12.5)
        print("%12.3f  %10.2f  %12.4f"
              % (frac, elems.l0 * 1e12, omega0 / TWO_PI / 1e9))
    print("at one third of a flux quantum L0 is exactly 2 L_J.")

    # pumped branch at the reference bias, resistive idler load
    op_ref = 1 / 3
    y_idler = 1.0 / 12.5 + 0.0j
    print("\npumped branch at phi_dc/phi0 = 1/3, idler load 12.5 ohm:")
    print("%10s  %10s  %14s" % ("phi_ac", "L1 (pH)", "X (ohm)"))
    for phi_ac in (0.212, 0.106, 0.053):
        op = OperatingPoint.from_flux_fractions(op_ref, phi_ac,
                                                TWO_PI * 12e9)
        e = pumpistor_elements(squid, op, TWO_PI * 6e9, y_idler)
        print("%10.3f  %10.1f  %7.3f%+7.3fj"
              % (phi_ac, e.l1 * 1e12, e.x.real, e.x.imag))
    print("halving the drive quadruples both L1 and X; Re(X) stays")
    print("negative, which is where the reflection gain comes from.")


if __name__ == "__main__":
    main()
