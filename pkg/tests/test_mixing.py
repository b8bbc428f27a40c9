"""Decay measurement, envelope fitting, commuted fields, and spectra."""

import numpy as np
import numpy.testing as npt
import pytest

from phasemix import (
    DecayReport,
    FitError,
    MomentCalculator,
    actionangle_evaluator,
    fit_decay,
    q_fourier_spectrum,
    spatial_grid,
    sup_phi_t,
    vector_field_norms,
)


def test_fit_decay_pure_power_law():
    t = np.linspace(1.0, 1000.0, 4000)
    report = DecayReport(times=t, sup_values=3.0 * t**-2.0, tail_slopes=np.zeros_like(t))
    fitted = fit_decay(report, (1.0, 1000.0))
    npt.assert_allclose(fitted.slope, -2.0, atol=1e-10)
    assert fitted.residual < 1e-10


def test_fit_decay_oscillating():
    # t**-1 * (2 + sin t): the envelope rule must recover the -1 exponent
    # even though raw values oscillate by a factor of 3.
    t = np.linspace(1.0, 1000.0, 20000)
    report = DecayReport(
        times=t, sup_values=(2.0 + np.sin(t)) / t, tail_slopes=np.zeros_like(t)
    )
    fitted = fit_decay(report, (1.0, 1000.0))
    npt.assert_allclose(fitted.slope, -1.0, atol=0.05)


def test_fit_decay_envelope_monotone():
    t = np.linspace(1.0, 200.0, 2000)
    report = DecayReport(
        times=t, sup_values=(2.0 + np.sin(t)) / t, tail_slopes=np.zeros_like(t)
    )
    fitted = fit_decay(report, (1.0, 200.0))
    assert np.all(np.diff(fitted.envelope) <= 0.0)


def test_fit_decay_needs_points():
    t = np.linspace(1.0, 5.0, 10)
    report = DecayReport(times=t, sup_values=1.0 / t, tail_slopes=np.zeros_like(t))
    with pytest.raises(FitError):
        fit_decay(report, (1.0, 5.0))


def test_sup_phi_t_rejects_bad_times(params, chart, f0):
    calc = MomentCalculator(
        actionangle_evaluator(chart, params, f0), params, 0.5, n_quad=128
    )
    grid = spatial_grid(params, 0.5, 51)
    with pytest.raises(ValueError):
        sup_phi_t(calc, grid, np.array([1.0, 1.0]))


def test_sup_phi_t_threads_match_serial(params, chart, f0, monkeypatch):
    calc = MomentCalculator(
        actionangle_evaluator(chart, params, f0), params, 0.5, n_quad=128
    )
    grid = spatial_grid(params, 0.5, 101)
    times = np.array([1.0, 2.0, 3.0, 4.0])
    serial = sup_phi_t(calc, grid, times)
    monkeypatch.setenv("PHASEMIX_THREADS", "4")
    threaded = sup_phi_t(calc, grid, times)
    npt.assert_allclose(threaded.sup_values, serial.sup_values, rtol=0.0)
    npt.assert_allclose(threaded.tail_slopes, serial.tail_slopes, rtol=0.0)


def test_commuted_fields_stay_bounded(chart, params, f0):
    base = vector_field_norms(chart, params, f0, 0.0)
    probe = vector_field_norms(chart, params, f0, 50.0)
    assert probe.sup[1] <= 2.0 * base.sup[1]
    assert probe.sup[2] <= 2.0 * base.sup[2]


def test_commuted_field_t0_matches_dk(chart, params, f0):
    # At t = 0 the field Y reduces to -d_K, so |Yf| equals the plain
    # K-derivative sup.
    base = vector_field_norms(chart, params, f0, 0.0)
    npt.assert_allclose(base.sup[1], base.dk_sup, rtol=1e-12)


def test_vector_field_fd_validation_trips(chart, params, f0):
    from phasemix.mixing import FDValidationError

    with pytest.raises(FDValidationError):
        # A grotesquely large step cannot pass step-halving validation.
        vector_field_norms(chart, params, f0, 100.0, dq=0.3, dk=0.012)


def test_spectrum_modulus_conserved(chart, params, f0):
    k_mid = 0.5 * (f0.h_min + f0.h_max)
    s0 = q_fourier_spectrum(chart, params, f0, 0.0, k_mid)
    s1 = q_fourier_spectrum(chart, params, f0, 7.0, k_mid)
    npt.assert_allclose(
        np.abs(s1.coefficients), np.abs(s0.coefficients), atol=1e-14
    )


def test_spectrum_phase_advance(chart, params, f0):
    k_mid = 0.5 * (f0.h_min + f0.h_max)
    t = 7.0
    s0 = q_fourier_spectrum(chart, params, f0, 0.0, k_mid)
    s1 = q_fourier_spectrum(chart, params, f0, t, k_mid)
    c = float(chart.c_of_k(k_mid))
    ratio = s1.coefficients[f0.m] / s0.coefficients[f0.m]
    expected = np.exp(1j * f0.m * c * t)
    npt.assert_allclose(ratio, expected, atol=1e-12)


def test_spectrum_content_is_single_mode(chart, params, f0):
    # The built-in data has only modes 0 and m in the angle.
    k_mid = 0.5 * (f0.h_min + f0.h_max)
    s = q_fourier_spectrum(chart, params, f0, 0.0, k_mid, k_max=6)
    mags = np.abs(s.coefficients)
    assert mags[0] > 0 and mags[f0.m] > 0
    others = np.delete(mags, [0, f0.m])
    assert np.max(others) < 1e-14


def test_spectrum_g_relation(chart, params, f0):
    k_mid = 0.5 * (f0.h_min + f0.h_max)
    s = q_fourier_spectrum(chart, params, f0, 0.0, k_mid)
    modes = np.arange(1, s.g_coefficients.size + 1)
    npt.assert_allclose(
        s.g_coefficients * (1j * modes), s.coefficients[1:], atol=1e-15
    )


def test_spectrum_resolution_guard(chart, params, f0):
    with pytest.raises(ValueError):
        q_fourier_spectrum(chart, params, f0, 0.0, 1.0, k_max=8, n_q=16)
