"""Reflection gain, sweep faults, metrics extraction, and profile
classification."""

import math
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from jpaforge import (
    AmplifierConfig,
    EnvironmentChain,
    GainCurve,
    NoBandwidthError,
    OperatingPoint,
    OscillationThresholdError,
    SquidSpec,
    UsageError,
    classify_profile,
    gain_metrics,
    gain_sweep,
    gbw_product,
    reference_amplifier,
    reference_grid,
    reflection_gain,
)

TWO_PI = 2 * math.pi
W_PUMP = TWO_PI * 12.0e9


def flat_environment_config(z=12.5, c=0.0, phi_ac=0.05, phi_dc=1 / 3):
    """Resistive source (optionally with the resonating shunt C)."""
    squid = SquidSpec.from_inductance(50e-12, c)
    op = OperatingPoint.from_flux_fractions(phi_dc, phi_ac, W_PUMP)
    env = EnvironmentChain(source_impedance=z, shunt_capacitance=c)
    return AmplifierConfig(squid=squid, operating_point=op, environment=env)


# ------------------------------------------------------ reflection gain

def test_direct_substitution_example():
    g = reflection_gain(0.08 + 0j, -0.072 + 0j)
    assert g == pytest.approx(19.0, rel=1e-12)
    assert 20 * math.log10(abs(g)) == pytest.approx(25.58, abs=0.005)


def test_lossless_load_reflects_unit_power():
    # purely imaginary Y_A against a real source: |G| = 1
    for b in (-0.3, -0.01, 0.02, 5.0):
        g = reflection_gain(0.02 + 0j, complex(0.0, b))
        assert abs(g) == pytest.approx(1.0, rel=1e-12)


def test_matched_passive_load_absorbs():
    assert reflection_gain(0.02 + 0j, 0.02 + 0j) == 0.0


def test_vanishing_denominator_is_oscillation_threshold():
    with pytest.raises(OscillationThresholdError):
        reflection_gain(0.02 + 0j, -0.02 - 0j)


# ----------------------------------------------------------- gain sweep

def test_empty_grid_is_usage_error():
    with pytest.raises(UsageError):
        gain_sweep(flat_environment_config(), np.array([]))


def test_capacitance_mismatch_rejected():
    squid = SquidSpec.from_inductance(50e-12, 7.0e-12)
    op = OperatingPoint.from_flux_fractions(1 / 3, 0.05, W_PUMP)
    env = EnvironmentChain(source_impedance=12.5,
                           shunt_capacitance=5.0e-12)
    with pytest.raises(UsageError):
        AmplifierConfig(squid=squid, operating_point=op, environment=env)


def test_pump_off_unitarity_flat_environment():
    cfg = flat_environment_config(phi_ac=1e-6)
    curve = gain_sweep(cfg, TWO_PI * np.linspace(4e9, 8e9, 101))
    assert len(curve) == 101
    np.testing.assert_allclose(np.abs(curve.gains()), 1.0, atol=1e-4)


def test_pump_off_unitarity_through_reference_network():
    """|G| = 1 with the pump off even behind the full transformer and
    matching chain (the environment is lossless)."""
    cfg = reference_amplifier(phi_ac=1e-6)
    curve = gain_sweep(cfg, reference_grid(201))
    assert len(curve) == 201
    np.testing.assert_allclose(np.abs(curve.gains()), 1.0, atol=1e-4)


def test_signal_idler_symmetry_with_constant_environment():
    cfg = flat_environment_config(z=12.5, c=0.0, phi_ac=0.06)
    delta = np.linspace(0.05e9, 2.5e9, 60)
    w_lo = W_PUMP / 2 - TWO_PI * delta
    w_hi = W_PUMP / 2 + TWO_PI * delta
    g_lo = gain_sweep(cfg, w_lo[::-1]).gains_db()[::-1]
    g_hi = gain_sweep(cfg, w_hi).gains_db()
    assert np.max(np.abs(g_lo - g_hi)) < 1e-6


def test_points_past_the_pump_are_recorded_not_dropped():
    cfg = flat_environment_config()
    grid = TWO_PI * np.array([5.0e9, 11.0e9, 12.5e9, 13.0e9])
    curve = gain_sweep(cfg, grid)
    assert len(curve) == 2
    assert len(curve.faults) == 2
    assert all("idler" in f.reason for f in curve.faults)
    assert [f.omega for f in curve.faults] == [TWO_PI * 12.5e9,
                                               TWO_PI * 13.0e9]


def test_parallel_sweep_matches_serial_bitwise():
    cfg = reference_amplifier()
    grid = reference_grid(257)
    serial = gain_sweep(cfg, grid, jobs=1)
    parallel = gain_sweep(cfg, grid, jobs=4)
    assert serial.points == parallel.points
    assert serial.faults == parallel.faults


def test_gain_rises_with_pump_drive_below_threshold():
    peaks = []
    for phi_ac in (0.04, 0.07, 0.10, 0.106):
        cfg = reference_amplifier(reactance_slope=0.0, phi_ac=phi_ac)
        curve = gain_sweep(cfg, reference_grid(401))
        peaks.append(float(np.max(curve.gains_db())))
    assert peaks == sorted(peaks)
    assert peaks[0] > 0.5           # visible gain even at weak drive
    assert peaks[-1] > 20.0


# -------------------------------------------------------------- metrics

def test_gbw_checkpoint_20db_200mhz_exact():
    assert gbw_product(20.0, 200e6) == 2.0e9


def test_gbw_checkpoint_17db_450mhz():
    assert gbw_product(17.0, 450e6) == pytest.approx(3.19e9, rel=2e-3)
    assert gbw_product(17.0, 450e6) > 3.0e9


def test_flat_curve_has_zero_ripple_and_full_band():
    w = TWO_PI * np.linspace(5e9, 7e9, 64)
    curve = GainCurve.from_gain_db(w, np.full(64, 20.0))
    m = gain_metrics(curve, 10.0)
    assert m.ripple_db == 0.0
    assert m.peak_gain_db == pytest.approx(20.0, abs=1e-12)
    assert m.bandwidth_at_level_hz == pytest.approx(2e9, rel=1e-9)


def test_level_above_peak_raises():
    w = TWO_PI * np.linspace(5e9, 7e9, 64)
    curve = GainCurve.from_gain_db(w, np.full(64, 15.0))
    with pytest.raises(NoBandwidthError):
        gain_metrics(curve, 18.0)


def test_bandwidth_interpolates_crossings():
    # triangle in dB: 0 at the edges, 12 dB at the center
    f = np.linspace(5e9, 7e9, 201)
    g = 12.0 * (1 - np.abs(f - 6e9) / 1e9)
    curve = GainCurve.from_gain_db(TWO_PI * f, g)
    m = gain_metrics(curve, 6.0)
    # crossings at 5.5 and 6.5 GHz exactly
    assert m.bandwidth_at_level_hz == pytest.approx(1e9, rel=1e-9)


def test_bandwidth_sums_disjoint_intervals():
    f = np.linspace(5e9, 7e9, 2001)
    g = (np.exp(-((f - 5.5e9) / 0.1e9) ** 2)
         + np.exp(-((f - 6.5e9) / 0.1e9) ** 2)) * 10.0
    curve = GainCurve.from_gain_db(TWO_PI * f, g)
    m = gain_metrics(curve, 5.0)
    # two symmetric bumps: each crosses 5 dB at +/- sigma*sqrt(ln 2)
    width_one = 2 * 0.1e9 * math.sqrt(math.log(2.0))
    assert m.bandwidth_at_level_hz == pytest.approx(2 * width_one,
                                                    rel=1e-4)


def test_peak_refinement_beats_the_grid():
    # place the true vertex off-grid; parabolic refinement recovers it
    f0 = 6.0123e9
    f = np.linspace(5e9, 7e9, 101)          # 20 MHz spacing
    g = 20.0 - ((f - f0) / 0.5e9) ** 2 * 40.0
    curve = GainCurve.from_gain_db(TWO_PI * f, g)
    m = gain_metrics(curve, 10.0)
    assert abs(m.peak_frequency / TWO_PI - f0) < 1e5   # well under spacing
    assert m.peak_gain_db == pytest.approx(20.0, abs=1e-6)


def test_ripple_respects_declared_band():
    f = np.linspace(5e9, 7e9, 401)
    g = np.where(np.abs(f - 6e9) < 0.2e9, 20.0, 5.0)
    curve = GainCurve.from_gain_db(TWO_PI * f, g)
    m_full = gain_metrics(curve, 4.0)
    m_band = gain_metrics(curve, 4.0,
                          band=(TWO_PI * 5.85e9, TWO_PI * 6.15e9))
    assert m_full.ripple_db == pytest.approx(15.0)
    assert m_band.ripple_db == 0.0


def test_coarse_grid_warns():
    f = np.linspace(5e9, 7e9, 41)           # 50 MHz spacing
    g = 20.0 / (1 + ((f - 6e9) / 0.08e9) ** 2)
    curve = GainCurve.from_gain_db(TWO_PI * f, g)
    with pytest.warns(UserWarning):
        gain_metrics(curve, 3.0)


def test_curve_requires_increasing_grid():
    with pytest.raises(UsageError):
        GainCurve.from_gain_db(TWO_PI * np.array([6e9, 5e9]), [1.0, 2.0])


# ------------------------------------------------------- classification

def lorentzian_db(f, f0=6e9, gamma=0.3e9, peak_db=20.0):
    power = 10 ** (peak_db / 10) / (1 + ((f - f0) / gamma) ** 2)
    return 10 * np.log10(power)


def test_synthetic_lorentzian_classifies():
    f = np.linspace(4e9, 8e9, 301)
    curve = GainCurve.from_gain_db(TWO_PI * f, lorentzian_db(f))
    assert classify_profile(curve) == "lorentzian"


def test_two_peaks_with_deep_valley_classify():
    f = np.linspace(4e9, 8e9, 801)
    power = (10 ** 2.0 / (1 + ((f - 5.7e9) / 0.15e9) ** 2)
             + 10 ** 2.0 / (1 + ((f - 6.3e9) / 0.15e9) ** 2))
    curve = GainCurve.from_gain_db(TWO_PI * f, 10 * np.log10(power))
    assert classify_profile(curve) == "double_peaked"


def test_flat_top_classifies_flattened():
    # 8th-order Butterworth-like magnitude: too flat for a Lorentzian,
    # no twin peaks either
    f = np.linspace(4e9, 8e9, 801)
    power = 10 ** 2.0 / (1 + ((f - 6e9) / 0.5e9) ** 8) + 1.0
    curve = GainCurve.from_gain_db(TWO_PI * f, 10 * np.log10(power))
    assert classify_profile(curve) == "flattened"


def test_sparse_curve_is_usage_error():
    f = np.linspace(4e9, 8e9, 16)
    curve = GainCurve.from_gain_db(TWO_PI * f, lorentzian_db(f))
    with pytest.raises(UsageError):
        classify_profile(curve)


@given(offset=st.floats(-30.0, 30.0))
def test_classification_ignores_db_offset(offset):
    f = np.linspace(4e9, 8e9, 201)
    curve = GainCurve.from_gain_db(TWO_PI * f, lorentzian_db(f) + offset)
    assert classify_profile(curve) == "lorentzian"


def test_reference_design_produces_flat_band():
    curve = gain_sweep(reference_amplifier(), reference_grid())
    with warnings.catch_warnings():
        warnings.simplefilter("error")      # grid is dense enough
        m = gain_metrics(curve, 19.0,
                         band=(TWO_PI * 5.8e9, TWO_PI * 6.2e9))
    assert m.profile_class == "flattened"
    assert m.peak_gain_db > 20.0
    assert m.ripple_db < 1.0
    assert m.bandwidth_at_level_hz > 0.4e9
