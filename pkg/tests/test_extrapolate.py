"""Power-law extrapolation to the infinite-memory limit."""

import numpy as np
import pytest

from pathint import (Extrapolation, FitTerm, ParameterFamily, RateFit,
                     extrapolation_error, extrapolated_trace, power_law_fit,
                     evaluate_fit)
from pathint.trace import PolarizationTrace


def power_family(v_inf, alpha, beta, ls=(8, 10, 12, 14, 16)):
    vals = np.array([v_inf + alpha * l**-beta for l in ls], dtype=float)
    return ParameterFamily(tuple(ls), vals, "gamma")


class TestPowerLawFit:
    def test_exact_recovery_fixed_beta(self):
        ext = power_law_fit(power_family(3.7, -50.0, 2.0), beta=2.0)
        assert ext.value_inf == pytest.approx(3.7, abs=1e-12)
        assert ext.alpha == pytest.approx(-50.0, abs=1e-9)

    def test_exact_recovery_free_beta(self):
        ext = power_law_fit(power_family(1.25, 20.0, 1.7), beta=None)
        assert ext.beta == pytest.approx(1.7, abs=1e-5)
        assert ext.value_inf == pytest.approx(1.25, abs=1e-5)

    def test_constant_family(self):
        ext = power_law_fit(power_family(2.0, 0.0, 2.0), beta=2.0)
        assert ext.value_inf == pytest.approx(2.0, abs=1e-13)
        assert ext.alpha == pytest.approx(0.0, abs=1e-10)

    def test_linear_in_values(self):
        fam1 = power_family(1.0, -8.0, 2.0)
        fam2 = ParameterFamily(fam1.l_values, 3.0 * fam1.values, "g")
        e1 = power_law_fit(fam1, beta=2.0)
        e2 = power_law_fit(fam2, beta=2.0)
        assert e2.value_inf == pytest.approx(3.0 * e1.value_inf, rel=1e-12)

    def test_complex_values(self):
        fam = ParameterFamily(
            (6, 8, 10, 12),
            np.array([0.5 + 0.1j + (2 - 1j) * l**-2.0 for l in (6, 8, 10, 12)]),
            "amplitude")
        ext = power_law_fit(fam, beta=2.0)
        assert ext.value_inf == pytest.approx(0.5 + 0.1j, abs=1e-12)

    def test_error_estimate_nan_for_three_points(self):
        ext = power_law_fit(power_family(1.0, 1.0, 2.0, ls=(8, 10, 12)),
                            beta=2.0)
        assert np.isnan(ext.error_estimate)

    def test_free_beta_needs_four_points(self):
        with pytest.raises(ValueError):
            power_law_fit(power_family(1.0, 1.0, 2.0, ls=(8, 10, 12)),
                          beta=None)


class TestFamilyValidation:
    def test_too_few_points(self):
        with pytest.raises(ValueError):
            ParameterFamily((8, 10), np.zeros(2), "g")

    def test_non_increasing(self):
        with pytest.raises(ValueError):
            ParameterFamily((8, 10, 10), np.zeros(3), "g")

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            ParameterFamily((8, 10, 12), np.zeros(4), "g")


class TestErrorEstimate:
    def test_zero_on_exact_power_law(self):
        err = extrapolation_error(power_family(4.0, -30.0, 2.0), beta=2.0)
        assert err < 1e-10

    def test_positive_on_perturbed_data(self):
        fam = power_family(4.0, -30.0, 2.0)
        vals = fam.values.copy()
        vals[-1] += 1e-3
        err = extrapolation_error(
            ParameterFamily(fam.l_values, vals, "g"), beta=2.0)
        assert err > 1e-4

    def test_uses_last_four_points_only(self):
        fam = power_family(4.0, -30.0, 2.0, ls=(4, 6, 8, 10, 12, 14))
        vals = fam.values.copy()
        vals[0] = 99.0          # outside the 4-point window
        err = extrapolation_error(
            ParameterFamily(fam.l_values, vals, "g"), beta=2.0)
        assert err < 1e-10

    def test_needs_four_points(self):
        with pytest.raises(ValueError):
            extrapolation_error(power_family(1.0, 1.0, 2.0, ls=(8, 10, 12)))


class TestExtrapolatedTrace:
    @staticmethod
    def _family_of_traces(ls, dt=0.05, n=600):
        """Synthetic single-line signals whose amplitude follows an exact
        power law in L at fixed frequency; no short-time remainder."""
        times = dt * np.arange(1, n + 1)
        traces, fits = [], []
        for l in ls:
            amp = 0.8 + 0.2j + (0.3 - 0.1j) * l**-2.0
            term = FitTerm(amplitude=amp, energy=0.4, rate=30.0)
            fit = RateFit(terms=(term,), window=(5.0, times[-1]),
                          residual=0.0)
            traces.append(PolarizationTrace(
                times=times, values=evaluate_fit(fit, times),
                meta={"L": l, "dt": dt}))
            fits.append(fit)
        return traces, fits

    def test_recovers_limit_model(self):
        ls = (8, 10, 12, 14)
        traces, fits = self._family_of_traces(ls)
        ext = extrapolated_trace(traces, fits, l_values=ls, beta=2.0)
        term_inf = FitTerm(amplitude=0.8 + 0.2j, energy=0.4, rate=30.0)
        ref = evaluate_fit(RateFit((term_inf,), (0, 0), 0.0), ext.times)
        assert np.max(np.abs(ext.values - ref)) < 1e-10
        assert ext.meta["engine"] == "extrapolated"

    def test_keeps_short_time_remainder(self):
        ls = (8, 10, 12, 14)
        traces, fits = self._family_of_traces(ls)
        bump = np.exp(-traces[-1].times * 8.0)          # decays before the fit
        perturbed = traces[:-1] + [PolarizationTrace(
            times=traces[-1].times, values=traces[-1].values + bump,
            meta=traces[-1].meta)]
        ext = extrapolated_trace(perturbed, fits, l_values=ls, beta=2.0)
        base = extrapolated_trace(traces, fits, l_values=ls, beta=2.0)
        assert np.allclose(ext.values - base.values, bump, atol=1e-10)

    def test_requires_matching_lengths(self):
        ls = (8, 10, 12, 14)
        traces, fits = self._family_of_traces(ls)
        with pytest.raises(ValueError):
            extrapolated_trace(traces[:-1], fits, l_values=ls)

    def test_requires_same_term_count(self):
        ls = (8, 10, 12)
        traces, fits = self._family_of_traces(ls)
        bad = RateFit(terms=fits[0].terms * 2, window=fits[0].window,
                      residual=0.0)
        with pytest.raises(ValueError):
            extrapolated_trace(traces, [bad] + list(fits[1:]), l_values=ls)
