"""Multi-exponential fitting on synthetic and phonon-free signals."""

import numpy as np
import pytest

from pathint import (BathSpec, FitTerm, RateFit, fit_exponentials,
                     evaluate_fit, residual_trace, run_polarization,
                     build_h0_case1)
from pathint.trace import PolarizationTrace
from pathint.units import HBAR_MEV_PS


def synthetic_trace(terms, dt=0.05, n=800, meta=None):
    times = dt * np.arange(1, n + 1)
    fit = RateFit(terms=tuple(terms), window=(0, 0), residual=0.0)
    return PolarizationTrace(times=times, values=evaluate_fit(fit, times),
                            meta=meta or {})


TWO_TERMS = (FitTerm(amplitude=0.6 + 0.1j, energy=-0.5, rate=80.0),
             FitTerm(amplitude=0.4 - 0.2j, energy=0.52, rate=110.0))


class TestSyntheticRecovery:
    def test_two_term_exact_recovery(self):
        trace = synthetic_trace(TWO_TERMS)
        fit = fit_exponentials(trace, 2, window=(0.0, 40.0))
        for ref, got in zip(TWO_TERMS, fit.terms):
            assert got.energy == pytest.approx(ref.energy, abs=1e-9)
            assert got.rate == pytest.approx(ref.rate, abs=1e-6)
            assert got.amplitude == pytest.approx(ref.amplitude, abs=1e-9)
        assert fit.residual < 1e-12

    def test_terms_sorted_by_energy(self):
        fit = fit_exponentials(synthetic_trace(TWO_TERMS), 2,
                               window=(0.0, 40.0))
        assert fit.energies[0] < fit.energies[1]

    def test_single_term(self):
        term = FitTerm(amplitude=1.0 + 0.0j, energy=1.3, rate=40.0)
        fit = fit_exponentials(synthetic_trace([term]), 1, window=(0.0, 40.0))
        assert fit.terms[0].energy == pytest.approx(1.3, abs=1e-10)
        assert fit.terms[0].rate == pytest.approx(40.0, abs=1e-7)

    def test_phase_rotation_covariance(self):
        """Multiplying the signal by a global phase rotates amplitudes only."""
        base = synthetic_trace(TWO_TERMS)
        rotated = PolarizationTrace(times=base.times,
                                    values=base.values * np.exp(0.7j),
                                    meta={})
        fa = fit_exponentials(base, 2, window=(0.0, 40.0))
        fb = fit_exponentials(rotated, 2, window=(0.0, 40.0))
        assert np.allclose(fb.energies, fa.energies, atol=1e-9)
        assert np.allclose(fb.rates, fa.rates, atol=1e-6)
        assert np.allclose(fb.amplitudes, fa.amplitudes * np.exp(0.7j),
                           atol=1e-8)

    def test_window_restriction(self):
        """Fitting a late window still recovers the global parameters."""
        trace = synthetic_trace(TWO_TERMS)
        fit = fit_exponentials(trace, 2, window=(15.0, 40.0))
        assert np.allclose(fit.energies, [t.energy for t in TWO_TERMS],
                           atol=1e-8)
        assert np.allclose(fit.amplitudes, [t.amplitude for t in TWO_TERMS],
                           atol=1e-6)


class TestValidation:
    def test_window_too_small(self):
        trace = synthetic_trace(TWO_TERMS)
        with pytest.raises(ValueError, match="samples"):
            fit_exponentials(trace, 2, window=(0.0, 0.5))

    def test_default_window_uses_memory_time(self):
        trace = synthetic_trace(TWO_TERMS, meta={"L": 300, "dt": 0.05})
        fit = fit_exponentials(trace, 2)
        assert fit.window[0] == pytest.approx(15.0)   # L dt = 15 > 0.3 t_end
        assert fit.window[1] == pytest.approx(trace.times[-1])

    def test_default_window_floor(self):
        trace = synthetic_trace(TWO_TERMS, meta={"L": 20, "dt": 0.05})
        fit = fit_exponentials(trace, 2)
        assert fit.window[0] == pytest.approx(12.0)   # 0.3 t_end > L dt
        assert fit.window[1] == pytest.approx(trace.times[-1])


class TestResidualTrace:
    def test_zero_for_exact_model(self):
        trace = synthetic_trace(TWO_TERMS)
        fit = fit_exponentials(trace, 2, window=(0.0, 40.0))
        delta = residual_trace(trace, fit)
        assert np.max(np.abs(delta.values)) < 1e-10

    def test_rms_consistent_with_residual_trace(self):
        rng = np.random.default_rng(7)
        trace = synthetic_trace(TWO_TERMS)
        noisy = PolarizationTrace(
            times=trace.times,
            values=trace.values + 1e-6 * rng.normal(size=len(trace)),
            meta={})
        fit = fit_exponentials(noisy, 2, window=(0.0, 40.0))
        delta = residual_trace(noisy, fit)
        mask = (noisy.times >= fit.window[0]) & (noisy.times <= fit.window[1])
        rms = np.sqrt(np.mean(np.abs(delta.values[mask])**2))
        assert fit.residual == pytest.approx(rms, rel=1e-6)

    def test_disjoint_window_rejected(self):
        trace = synthetic_trace(TWO_TERMS)
        fit = RateFit(terms=TWO_TERMS, window=(100.0, 200.0), residual=0.0)
        with pytest.raises(ValueError):
            residual_trace(trace, fit)


class TestPhononFreeRates:
    def test_zero_coupling_rabi_frequencies(self):
        """Without phonons the fitted lines sit at +-g with zero width."""
        bath = BathSpec(0.0, 4600.0, 5.65, 50.0, (3.3,))
        system = build_h0_case1(0.0, 0.0, 0.1)
        trace = run_polarization(system, bath, 0.05, 8, 400, 0.0, 1, 1)
        fit = fit_exponentials(trace, 2, window=(1.0, 20.0))
        assert np.allclose(fit.energies, [-0.1, 0.1], atol=1e-10)
        assert np.max(np.abs(fit.rates)) < 1e-7
        assert np.allclose(fit.amplitudes, [0.5, 0.5], atol=1e-9)

    def test_omega_property_roundtrip(self):
        term = FitTerm(amplitude=1.0, energy=0.7, rate=50.0)
        assert term.omega == pytest.approx(
            (0.7 - 0.05j) / HBAR_MEV_PS, rel=1e-15)
