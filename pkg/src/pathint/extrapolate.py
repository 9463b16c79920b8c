"""Power-law extrapolation of fitted parameters to the infinite-memory limit.

Fitted quantities converge as value(L) = value(inf) + alpha * L^(-beta)
with beta very close to 2; beta is fixed at 2 by default and may be left
free as a diagnostic.  The error estimate compares two sub-extrapolations
built from the last four family points.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .fit import RateFit, FitTerm, evaluate_fit, residual_trace
from .trace import PolarizationTrace
from .units import HBAR_MEV_PS

__all__ = ["ParameterFamily", "Extrapolation", "power_law_fit",
           "extrapolation_error", "extrapolated_trace"]


@dataclass(frozen=True)
class ParameterFamily:
    """One fitted parameter sampled over increasing memory lengths L."""

    l_values: tuple
    values: np.ndarray = field(repr=False)
    parameter_name: str = ""

    def __post_init__(self):
        ls = tuple(int(l) for l in self.l_values)
        if len(ls) < 3:
            raise ValueError("need at least 3 family points")
        if any(b <= a for a, b in zip(ls, ls[1:])):
            raise ValueError("L values must be strictly increasing")
        vals = np.asarray(self.values)
        if vals.shape != (len(ls),):
            raise ValueError("values must match l_values in length")
        object.__setattr__(self, "l_values", ls)
        object.__setattr__(self, "values", vals)


@dataclass(frozen=True)
class Extrapolation:
    """Result of the power-law fit value(L) = value_inf + alpha L^(-beta)."""

    value_inf: complex
    alpha: complex
    beta: float
    error_estimate: float


def _linear_fit(ls, values, beta):
    design = np.column_stack([np.ones(len(ls)), np.asarray(ls, float)**-beta])
    coef, *_ = np.linalg.lstsq(design, values, rcond=None)
    resid = values - design @ coef
    return coef[0], coef[1], np.sqrt(np.mean(np.abs(resid)**2))


def power_law_fit(family: ParameterFamily, beta=2.0) -> Extrapolation:
    """Fit the power law; ``beta=None`` frees the exponent.

    With beta fixed the problem is linear (works for complex values); a
    free beta runs a 1-D search with an inner linear solve and needs at
    least 4 points.
    """
    ls = family.l_values
    values = family.values
    if beta is None:
        if len(ls) < 4:
            raise ValueError("free-beta fit needs at least 4 points")
        res = minimize_scalar(lambda b: _linear_fit(ls, values, b)[2],
                              bounds=(0.25, 8.0), method="bounded",
                              options={"xatol": 1e-10})
        beta = float(res.x)
    v_inf, alpha, _ = _linear_fit(ls, values, beta)
    err = extrapolation_error(family, beta=beta) if len(ls) >= 4 \
        else float("nan")
    if np.iscomplexobj(values):
        return Extrapolation(complex(v_inf), complex(alpha), beta, err)
    return Extrapolation(float(v_inf.real), float(alpha.real), beta, err)


def extrapolation_error(family: ParameterFamily, beta=2.0) -> float:
    """Spread between two 3-point sub-extrapolations of the last 4 points.

    One uses the last three points, the other the first point and the last
    two; the absolute difference of their limits is the error estimate.
    """
    if len(family.l_values) < 4:
        raise ValueError("error estimate needs at least 4 points")
    ls = family.l_values[-4:]
    vals = family.values[-4:]
    v_a, *_ = _linear_fit(ls[1:], vals[1:], beta)
    v_b, *_ = _linear_fit((ls[0], ls[2], ls[3]),
                          np.concatenate([[vals[0]], vals[2:]]), beta)
    return float(abs(v_a - v_b))


def _term_arrays(fits):
    n_terms = {len(f.terms) for f in fits}
    if len(n_terms) != 1:
        raise ValueError("all fits must have the same number of terms")
    amps = np.array([[t.amplitude for t in f.terms] for f in fits])
    energies = np.array([[t.energy for t in f.terms] for f in fits])
    rates = np.array([[t.rate for t in f.terms] for f in fits])
    return amps, energies, rates


def extrapolated_trace(traces, fits, l_values=None,
                       beta=2.0) -> PolarizationTrace:
    """Infinite-memory trace: extrapolated exponentials plus the
    L-independent short-time remainder of the largest-L run.

    Per-term amplitudes are phase-aligned at the largest-L fit's window
    start before componentwise extrapolation; the remainder Delta P is the
    largest-L trace minus its own fitted model.
    """
    if len(traces) != len(fits) or len(fits) < 3:
        raise ValueError("need matching traces and fits, at least 3")
    if l_values is None:
        l_values = [tr.meta["L"] for tr in traces]
    amps, energies, rates = _term_arrays(fits)
    t_ref = fits[-1].window[0]
    omegas = (energies - 1j * rates * 1e-3) / HBAR_MEV_PS
    aligned = amps * np.exp(-1j * omegas * t_ref)

    n_terms = amps.shape[1]
    terms_inf = []
    for jt in range(n_terms):
        a_inf = power_law_fit(ParameterFamily(
            l_values, aligned[:, jt], f"C_{jt}"), beta=beta).value_inf
        e_inf = power_law_fit(ParameterFamily(
            l_values, energies[:, jt], f"E_{jt}"), beta=beta).value_inf
        g_inf = power_law_fit(ParameterFamily(
            l_values, rates[:, jt], f"G_{jt}"), beta=beta).value_inf
        w_inf = (e_inf - 1j * g_inf * 1e-3) / HBAR_MEV_PS
        terms_inf.append(FitTerm(amplitude=complex(a_inf * np.exp(1j * w_inf * t_ref)),
                                 energy=float(e_inf), rate=float(g_inf)))
    fit_inf = RateFit(terms=tuple(terms_inf), window=fits[-1].window,
                      residual=float("nan"))

    base = traces[-1]
    delta = residual_trace(base, fits[-1])
    values = evaluate_fit(fit_inf, base.times) + delta.values
    meta = {**base.meta, "engine": "extrapolated", "l_family": tuple(l_values)}
    return PolarizationTrace(times=base.times, values=values, meta=meta)
