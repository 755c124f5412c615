#!/usr/bin/env python3
"""Hot/cold noise calibration: from PSD-vs-temperature to photons.

Terminate the amplifier input with a variable-temperature load and the
output spectral density is linear in the load's Planck occupancy:
slope gives the gain, intercept the system noise temperature.  This
script synthesizes such a data set (with a little measurement noise),
fits it, and converts the result to added photons against the
standard quantum limit.

Run it:  python3 demos/noise_calibration.py
"""

import numpy as np

from jpaforge import (NoiseDataset, added_photons, fit_noise,
                      noise_forward, planck_occupancy_temperature,
                      sql_temperature, to_angular)


def main():
    f_signal = 6.0e9
    omega = to_angular(f_signal)
    gain_true, t_sys_true = 100.0, 0.38     # 20 dB, 380 mK

    temps = (0.05, 0.1, 0.3, 0.7, 1.3, 2.4, 4.2)
    rng = np.random.default_rng(6)
    psd = tuple(
        noise_forward(omega, t, gain_true, t_sys_true)
        * (1.0 + 0.005 * rng.standard_normal())
        for t in temps)

    print("synthetic calibration at %.1f GHz (true: G = %.0f, "
          "T_sys = %.0f mK)\n" % (f_signal / 1e9, gain_true,
                                  t_sys_true * 1e3))
    print("%8s  %12s  %12s" % ("T (K)", "occupancy (K)", "PSD (K)"))
    for t, s in zip(temps, psd):
        print("%8.2f  %12.4f  %12.2f"
              % (t, planck_occupancy_temperature(omega, t), s))

    result = fit_noise(NoiseDataset(
        omega, temps, psd, weights=tuple(1.0 / s ** 2 for s in psd)))

    print("\nfit: gain %.2f (%.2f dB), T_sys %.1f +/- %.1f mK, "
          "residual %.2f K"
          % (result.gain, 10 * np.log10(result.gain),
             result.t_sys * 1e3, result.t_sys_std_error * 1e3,
             result.residual_rms))
    print("quantum limit at this frequency: T_SQL = %.1f mK "
          "(half a photon)" % (sql_temperature(omega) * 1e3))
    print("added photons: %.2f  (an ideal phase-preserving amplifier "
          "adds 0.50)" % result.n_add)
    print("sanity: added_photons(T_SQL) = %.2f"
          % added_photons(sql_temperature(omega), omega))


if __name__ == "__main__":
    main()
