"""Acoustic-phonon bath: spectral densities, correlation and cumulant
functions, and the recursive table of discrete memory-kernel cumulants.

The bath is a 3D continuum of longitudinal acoustic phonons with linear
dispersion, coupled to Gaussian-confined excitons through the deformation
potential.  Everything here reduces to one-dimensional frequency integrals
over the closed-form spectral density

    J_bb'(w) = J0 * w^3 * exp(-w^2 l^2 / v^2) * [sinc(w d / v) if b != b']

with the pair confinement length l^2 = (l_b^2 + l_b'^2) / 4.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from .units import HBAR_SI, EV_SI, bose_occupation, sinc

__all__ = [
    "BathSpec",
    "CumulantTable",
    "QuadratureError",
    "spectral_density",
    "correlation_function",
    "cumulant_function",
    "build_cumulant_table",
]

# absolute quadrature tolerance; the Gaussian cutoff makes [0, w_cut] exact
# to far below this level
QUAD_ABS_TOL = 1e-12
QUAD_LIMIT = 2000

# w_cut = 12 v/l puts the exp(-w^2 l^2 / v^2) tail below 1e-62
CUTOFF_FACTOR = 12.0


class QuadratureError(RuntimeError):
    """Raised when an adaptive frequency integral fails to converge."""


@dataclass(frozen=True)
class BathSpec:
    """Material and thermodynamic parameters of the phonon bath.

    Parameters
    ----------
    deformation_diff:
        Difference of conduction and valence band deformation potentials,
        in eV.  Enters all bath quantities squared, so the sign is
        irrelevant.
    sound_velocity:
        Longitudinal sound velocity in m/s.
    mass_density:
        Mass density in g/cm^3.
    temperature:
        Bath temperature in K, strictly positive.
    confinement_lengths:
        Gaussian confinement length of each dot in nm; the tuple length
        sets the number of bath coupling channels.
    dot_separation:
        Center-to-center dot distance in nm (zero for a single dot).
    """

    deformation_diff: float
    sound_velocity: float
    mass_density: float
    temperature: float
    confinement_lengths: tuple = (3.3,)
    dot_separation: float = 0.0

    def __post_init__(self):
        if self.sound_velocity <= 0:
            raise ValueError("sound_velocity must be positive")
        if self.mass_density <= 0:
            raise ValueError("mass_density must be positive")
        if self.temperature <= 0:
            raise ValueError("temperature must be positive")
        if self.dot_separation < 0:
            raise ValueError("dot_separation must be >= 0")
        lengths = tuple(float(l) for l in self.confinement_lengths)
        if not lengths or any(l <= 0 for l in lengths):
            raise ValueError("confinement_lengths must be positive")
        object.__setattr__(self, "confinement_lengths", lengths)

    @property
    def n_baths(self) -> int:
        return len(self.confinement_lengths)

    @property
    def prefactor(self) -> float:
        """J0 = (Dc-Dv)^2 / (4 pi^2 rho hbar v^5), in ps^2."""
        dd = self.deformation_diff * EV_SI
        rho = self.mass_density * 1000.0          # kg/m^3
        v = self.sound_velocity
        j0_si = dd**2 / (4 * np.pi**2 * rho * HBAR_SI * v**5)  # s^2
        return j0_si * 1e24

    def pair_length_time(self, b: int, bp: int) -> float:
        """l/v for the bath pair (b, b'), in ps, with l^2=(l_b^2+l_b'^2)/4."""
        lb = self.confinement_lengths[b]
        lbp = self.confinement_lengths[bp]
        l_nm = np.sqrt((lb**2 + lbp**2) / 4.0)
        return l_nm * 1e-9 / self.sound_velocity * 1e12

    @property
    def separation_time(self) -> float:
        """d/v in ps."""
        return self.dot_separation * 1e-9 / self.sound_velocity * 1e12

    def cutoff(self, b: int, bp: int) -> float:
        """Upper quadrature limit for the pair (b, b'), in 1/ps."""
        return CUTOFF_FACTOR / self.pair_length_time(b, bp)


@dataclass(frozen=True)
class CumulantTable:
    """Discrete memory-kernel cumulants K_bb'(s) for lags s = 0..L.

    ``entries`` has shape (B, B, L+1) with B the number of bath channels;
    it is symmetric in the first two axes by construction.
    """

    step: float
    neighbors: int
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=complex)
        if e.shape != (e.shape[0], e.shape[0], self.neighbors + 1):
            raise ValueError("entries must have shape (B, B, L+1)")
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)

    @property
    def n_baths(self) -> int:
        return self.entries.shape[0]


def spectral_density(spec: BathSpec, b: int, bp: int, omega: float) -> float:
    """Phonon spectral density J_bb'(omega), omega in 1/ps, result in 1/ps.

    Cross pairs (b != b') carry the interference factor sinc(omega d / v).
    """
    omega = np.asarray(omega, dtype=float)
    if np.any(omega < 0):
        raise ValueError("omega must be >= 0")
    lt = spec.pair_length_time(b, bp)
    val = spec.prefactor * omega**3 * np.exp(-(omega * lt) ** 2)
    if b != bp:
        val = val * sinc(omega * spec.separation_time)
    if val.ndim == 0:
        return float(val)
    return val


def _quad_complex(func, a, b, label):
    """Adaptive quadrature of a complex-valued integrand with error check."""
    parts = []
    for part in (np.real, np.imag):
        val, err = quad(lambda w: part(func(w)), a, b,
                        epsabs=QUAD_ABS_TOL, epsrel=1e-11, limit=QUAD_LIMIT)
        if err > 1e3 * max(QUAD_ABS_TOL, 1e-11 * abs(val)):
            raise QuadratureError(
                f"{label}: quadrature error estimate {err:.3e} exceeds "
                f"tolerance (value {val:.6e}, interval [{a:g}, {b:g}])")
        parts.append(val)
    return parts[0] + 1j * parts[1]


def correlation_function(spec: BathSpec, b: int, bp: int, t: float) -> complex:
    """Bath correlation function D_bb'(t) = int_0^inf J(w) D(w, t) dw.

    D(w, t) = (N_w + 1) e^{-i w |t|} + N_w e^{i w |t|}; depends on |t| only.
    """
    if not np.isfinite(t):
        raise ValueError("t must be finite")
    at = abs(t)
    temp = spec.temperature

    def integrand(w):
        j = spectral_density(spec, b, bp, w)
        n = bose_occupation(w, temp) if w > 0 else 0.0
        return j * ((n + 1) * np.exp(-1j * w * at) + n * np.exp(1j * w * at))

    return _quad_complex(integrand, 0.0, spec.cutoff(b, bp),
                         f"correlation_function(b={b}, b'={bp}, t={t})")


def cumulant_function(spec: BathSpec, b: int, bp: int, t: float) -> complex:
    """Continuous cumulant C_bb'(t), the double time integral of -D/2.

    The inner time integral is done in closed form: since D_bb'(tau) is even
    in tau, the double integral over [0,t]^2 equals 2 int_0^t (t-tau) D(tau)
    dtau, and int_0^t (t-tau) e^{-i w tau} dtau = (1 - e^{-iwt} - iwt)/w^2.
    Only the frequency integral is evaluated numerically.
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    if t == 0:
        return 0.0 + 0.0j
    temp = spec.temperature

    def integrand(w):
        j = spectral_density(spec, b, bp, w)
        n = bose_occupation(w, temp) if w > 0 else 0.0
        wt = w * t
        g_minus = (1.0 - np.exp(-1j * wt) - 1j * wt) / w**2
        g_plus = (1.0 - np.exp(1j * wt) + 1j * wt) / w**2
        return -j * ((n + 1) * g_minus + n * g_plus)

    return _quad_complex(integrand, 0.0, spec.cutoff(b, bp),
                         f"cumulant_function(b={b}, b'={bp}, t={t})")


def build_cumulant_table(spec: BathSpec, dt: float, L: int) -> CumulantTable:
    """Build K_bb'(s) for s = 0..L from the continuous cumulant function.

    Seeded by K(0) = C(dt); higher lags follow the recursion

        K(s) = [C((s+1) dt) - (s+1) K(0) - 2 sum_{h<s} (s+1-h) K(h)] / 2,

    equivalent to requiring that the n x n grid sum of K(|a-b|) reproduces
    C(n dt) for every n <= L+1.  Cross elements (b != b') are filled for
    multi-dot baths, including the unphysical-but-required s = 0 element.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if L < 1:
        raise ValueError("L must be >= 1")
    nb = spec.n_baths
    entries = np.zeros((nb, nb, L + 1), dtype=complex)
    for b in range(nb):
        for bp in range(b, nb):
            c_vals = np.array([cumulant_function(spec, b, bp, n * dt)
                               for n in range(1, L + 2)])
            k = np.zeros(L + 1, dtype=complex)
            k[0] = c_vals[0]
            for s in range(1, L + 1):
                acc = c_vals[s] - (s + 1) * k[0]
                for h in range(1, s):
                    acc -= 2 * (s + 1 - h) * k[h]
                k[s] = 0.5 * acc
            entries[b, bp] = k
            entries[bp, b] = k
    return CumulantTable(step=dt, neighbors=L, entries=entries)
