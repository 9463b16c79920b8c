"""Multi-exponential fitting of the long-time polarization.

The model is P(t) = sum_j C_j exp(-i w_j t) with complex frequencies
w_j = E_j / hbar - i G_j / hbar, i.e. energy E_j (meV) and dephasing rate
G_j (ueV).  Initial estimates come from a linear-prediction (Prony) solve
on the uniformly sampled window, refined by Levenberg-Marquardt on the
stacked real/imaginary residuals.
"""

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial
from scipy.linalg import toeplitz
from scipy.optimize import least_squares

from .trace import PolarizationTrace
from .units import HBAR_MEV_PS

__all__ = ["FitTerm", "RateFit", "FitError", "fit_exponentials",
           "residual_trace", "evaluate_fit"]


class FitError(RuntimeError):
    """Fit did not converge; carries the best parameters found so far."""

    def __init__(self, message, best=None, residual=None):
        super().__init__(message)
        self.best = best
        self.residual = residual


@dataclass(frozen=True)
class FitTerm:
    """One decaying-oscillation component."""

    amplitude: complex          # C_j
    energy: float               # Re(hbar w_j), meV
    rate: float                 # -Im(hbar w_j), ueV

    @property
    def omega(self) -> complex:
        """Complex angular frequency in 1/ps."""
        return (self.energy - 1j * self.rate * 1e-3) / HBAR_MEV_PS


@dataclass(frozen=True)
class RateFit:
    """Fitted components, sorted by energy ascending."""

    terms: tuple
    window: tuple
    residual: float

    @property
    def rates(self) -> np.ndarray:
        return np.array([t.rate for t in self.terms])

    @property
    def energies(self) -> np.ndarray:
        return np.array([t.energy for t in self.terms])

    @property
    def amplitudes(self) -> np.ndarray:
        return np.array([t.amplitude for t in self.terms])


def evaluate_fit(fit: RateFit, times: np.ndarray) -> np.ndarray:
    """Model values sum_j C_j exp(-i w_j t) on an arbitrary grid."""
    t = np.asarray(times, dtype=float)
    out = np.zeros(t.shape, dtype=complex)
    for term in fit.terms:
        out += term.amplitude * np.exp(-1j * term.omega * t)
    return out


def _prony_initial(t, y, n_terms):
    """Linear-prediction estimate of complex frequencies and amplitudes."""
    dt = t[1] - t[0]
    m = n_terms
    # y[n] = sum_i a_i y[n-i]: least-squares linear prediction
    lhs = toeplitz(y[m - 1:-1], y[:m][::-1])
    pred, *_ = np.linalg.lstsq(lhs, y[m:], rcond=None)
    coeffs = np.empty(m + 1, dtype=complex)
    coeffs[m] = 1.0
    coeffs[:m] = -pred[::-1]
    roots = polynomial.polyroots(coeffs)
    roots = roots[np.abs(roots) > 1e-12]
    if roots.size < m:
        # degenerate prediction; pad with unit-circle placeholders
        roots = np.concatenate([roots, np.ones(m - roots.size, complex)])
    omega = 1j * np.log(roots[:m]) / dt
    basis = np.exp(-1j * np.outer(t - t[0], omega))
    amp_local, *_ = np.linalg.lstsq(basis, y, rcond=None)
    amps = amp_local * np.exp(-1j * omega * t[0])
    return amps, omega


def fit_exponentials(trace: PolarizationTrace, n_terms: int,
                     window: tuple = None) -> RateFit:
    """Fit ``n_terms`` complex exponentials to the windowed trace.

    The window defaults to [max(memory time, 0.3 t_end), t_end], where the
    memory time L*dt is taken from the trace metadata when present.  The
    window must contain at least 10 * n_terms samples.
    """
    t_all = trace.times
    y_all = trace.values
    t_end = t_all[-1]
    if window is None:
        mem = trace.meta.get("L", 0) * trace.meta.get("dt", 0.0)
        window = (max(mem, 0.3 * t_end), t_end)
    w0, w1 = window
    mask = (t_all >= w0) & (t_all <= w1)
    t = t_all[mask]
    y = y_all[mask]
    if t.size < 10 * n_terms:
        raise ValueError(
            f"window [{w0:g}, {w1:g}] holds {t.size} samples; "
            f"need at least {10 * n_terms}")

    amps, omega = _prony_initial(t, y, n_terms)

    t0 = t[0]
    amps_loc = amps * np.exp(-1j * omega * t0)

    def unpack(x):
        c = x[0::4] + 1j * x[1::4]
        w = x[2::4] + 1j * x[3::4]
        return c, w

    def residuals(x):
        c, w = unpack(x)
        model = np.exp(-1j * np.outer(t - t0, w)) @ c
        r = model - y
        return np.concatenate([r.real, r.imag])

    x0 = np.empty(4 * n_terms)
    x0[0::4] = amps_loc.real
    x0[1::4] = amps_loc.imag
    x0[2::4] = omega.real
    x0[3::4] = omega.imag
    sol = least_squares(residuals, x0, method="lm", xtol=1e-14, ftol=1e-14,
                        gtol=1e-14, max_nfev=20000)
    c_loc, w = unpack(sol.x)
    res = residuals(sol.x).reshape(2, -1)
    rms = np.sqrt(np.mean(res[0]**2 + res[1]**2))
    c = c_loc * np.exp(1j * w * t0)
    order = np.argsort(w.real)
    terms = tuple(
        FitTerm(amplitude=complex(c[i]),
                energy=float(w[i].real * HBAR_MEV_PS),
                rate=float(-w[i].imag * HBAR_MEV_PS * 1e3))
        for i in order)
    fit = RateFit(terms=terms, window=(float(w0), float(w1)),
                  residual=float(rms))
    if not sol.success:
        raise FitError(f"least-squares did not converge: {sol.message}",
                       best=fit, residual=float(rms))
    return fit


def residual_trace(trace: PolarizationTrace, fit: RateFit) -> PolarizationTrace:
    """Pointwise trace minus fitted model over the full grid."""
    w0, w1 = fit.window
    if w0 > trace.times[-1] or w1 < trace.times[0]:
        raise ValueError("fit window does not overlap the trace grid")
    model = evaluate_fit(fit, trace.times)
    return PolarizationTrace(times=trace.times, values=trace.values - model,
                             meta={**trace.meta, "residual_of": fit.window})
