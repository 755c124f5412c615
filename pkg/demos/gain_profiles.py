#!/usr/bin/env python3
"""Shaping the gain profile with reactance slope.

A bare resonator gives a Lorentzian gain peak: tall and narrow, with
the usual fixed gain-bandwidth trade.  Adding a series element with
the right reactance-vs-frequency slope in front of the SQUID detunes
the match symmetrically about the center, which flattens the top of
the profile.  Push the slope further and the passband splits into two
peaks.  This script sweeps that knob on the reference design.

Run it:  python3 demos/gain_profiles.py [--plot]
"""

import argparse

import numpy as np

from jpaforge import (apply_parameters, gain_sweep, reference_amplifier,
                      reference_band, reference_grid, sweep)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--plot", action="store_true",
                    help="write gain_profiles.png")
    args = ap.parse_args()

    grid = reference_grid(1601)
    band = reference_band()
    slopes = [0.0, 0.7e-9, 1.45e-9, 2.2e-9]

    rows = sweep(reference_amplifier(reactance_slope=0.0),
                 "reactance_slope", slopes, grid, level_db=19.0,
                 band=band)

    print("reference design, reactance slope swept at fixed drive:\n")
    print("%11s %10s %12s %10s  %s"
          % ("slope (nH)", "peak (dB)", "bw@19 (MHz)", "ripple", "class"))
    for row in rows:
        m = row.metrics
        print("%11.2f %10.2f %12.1f %9.2f   %s"
              % (row.value * 1e9, m.peak_gain_db,
                 m.bandwidth_at_level_hz / 1e6, m.ripple_db,
                 m.profile_class))

    print("\nthe profile walks lorentzian -> flattened -> double_peaked")
    print("as the slope rises; 1.45 nH is the flat point for this")
    print("circuit, with ~0.5-0.6 GHz of 19 dB-class bandwidth.")

    if args.plot:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        fig, ax = plt.subplots(figsize=(6.5, 4))
        base = reference_amplifier(reactance_slope=0.0)
        for slope in slopes:
            cfg = apply_parameters(base, {"reactance_slope": slope})
            curve = gain_sweep(cfg, grid)
            ax.plot(curve.omegas() / (2 * np.pi) / 1e9, curve.gains_db(),
                    label="%.2f nH" % (slope * 1e9))
        ax.set_xlabel("frequency (GHz)")
        ax.set_ylabel("gain (dB)")
        ax.set_xlim(5.0, 7.0)
        ax.legend(title="reactance slope")
        fig.tight_layout()
        fig.savefig("gain_profiles.png", dpi=120)
        print("wrote gain_profiles.png")


if __name__ == "__main__":
    main()
