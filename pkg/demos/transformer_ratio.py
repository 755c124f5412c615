#!/usr/bin/env python3
"""Impedance-transformation curve of the coupled-line transformer.

The transformer is two tightly coupled lines, paralleled at the low
end and stacked in series at the high end.  At low frequency that
divides the source impedance by four (50 ohm looks like 12.5), which
is the whole point: a lower load impedance raises the resonator's
loaded bandwidth.  The section is resonant, though — at the half-wave
frequency the response has a pole, and well before that the ratio
stops being a flat 4.

Run it:  python3 demos/transformer_ratio.py [--plot]
"""

import argparse

import numpy as np

from jpaforge import (CoupledLineSpec, ruthroff_impedance_values,
                      ruthroff_pole_angle, to_angular)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--plot", action="store_true",
                    help="write transformer_ratio.png")
    args = ap.parse_args()

    spec = CoupledLineSpec(z_odd=10.0, z_even=7140.0, length=0.8e-3,
                           odd_mode_velocity=1.0e8, z_high=50.0)
    print("coupled-line transformer: z_odd %.0f ohm, z_even %.0f ohm, "
          "%.1f mm" % (spec.z_odd, spec.z_even, spec.length * 1e3))
    print("first pole (cutoff): %.1f GHz" % (spec.cutoff_hz / 1e9))
    print("pole electrical angle located at %.9f rad (pi is %.9f)\n"
          % (ruthroff_pole_angle(spec.z_high, spec.z_odd), np.pi))

    freqs = np.linspace(0.5e9, 70e9, 2000)
    z_ext, poles = ruthroff_impedance_values(spec, to_angular(freqs))
    ratio = np.abs(spec.z_high / z_ext)

    print("%8s  %12s  %10s" % ("f (GHz)", "Z_ext (ohm)", "|ratio|"))
    for f_ghz in (1, 5, 10, 20, 30, 40, 50, 60, 62):
        k = int(np.argmin(np.abs(freqs - f_ghz * 1e9)))
        z = z_ext[k]
        print("%8.1f  %6.2f%+6.2fj  %10.3f"
              % (freqs[k] / 1e9, z.real, z.imag, ratio[k]))

    print("\nlow-frequency ratio %.4f (the 4:1 limit); note the curve"
          % ratio[0])
    print("is not monotone — it climbs to %.1f near %.0f GHz before"
          % (np.nanmax(ratio), freqs[np.nanargmax(ratio)] / 1e9))
    print("collapsing toward the %.1f GHz pole." % (spec.cutoff_hz / 1e9))
    if poles.any():
        print("grid points flagged on the pole: %d" % poles.sum())

    if args.plot:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        fig, ax = plt.subplots(figsize=(6, 4))
        ax.plot(freqs / 1e9, ratio)
        ax.axvline(spec.cutoff_hz / 1e9, ls="--", c="gray")
        ax.axhline(4.0, ls=":", c="gray")
        ax.set_xlabel("frequency (GHz)")
        ax.set_ylabel("|Z_high / Z_ext|")
        ax.set_title("transformation ratio of the coupled-line section")
        fig.tight_layout()
        fig.savefig("transformer_ratio.png", dpi=120)
        print("wrote transformer_ratio.png")


if __name__ == "__main__":
    main()
