"""System Hamiltonians, the phonon-free step matrix, and the channel-to-bath
coupling map.

Channels are indexed 0..J-1 with channel 0 always the cavity-photon state,
which never couples to phonons.  The coupling weight matrix w[channel, bath]
selects which bath each excitonic channel feels.
"""

from dataclasses import dataclass, field

import numpy as np

from .units import HBAR_MEV_PS

__all__ = ["SystemSpec", "StepMatrix", "build_h0_case1", "build_h0_case2",
           "step_matrix"]

_HERMITICITY_TOL = 1e-12


@dataclass(frozen=True)
class SystemSpec:
    """Finite-dimensional system: H0 (meV) and the bath coupling weights."""

    h0: np.ndarray = field(repr=False)
    coupling_weights: np.ndarray = field(repr=False)

    def __post_init__(self):
        h0 = np.asarray(self.h0, dtype=complex)
        w = np.asarray(self.coupling_weights, dtype=float)
        if h0.ndim != 2 or h0.shape[0] != h0.shape[1]:
            raise ValueError("h0 must be a square matrix")
        if np.max(np.abs(h0 - h0.conj().T)) > _HERMITICITY_TOL:
            raise ValueError("h0 must be Hermitian")
        if w.ndim != 2 or w.shape[0] != h0.shape[0]:
            raise ValueError("coupling_weights must have one row per channel")
        if np.any(w[0] != 0.0):
            raise ValueError("channel 0 (cavity) must not couple to any bath")
        h0.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "h0", h0)
        object.__setattr__(self, "coupling_weights", w)

    @property
    def dim(self) -> int:
        return self.h0.shape[0]

    @property
    def n_baths(self) -> int:
        return self.coupling_weights.shape[1]


@dataclass(frozen=True)
class StepMatrix:
    """M = exp(-i H0 dt / hbar); unitary since H0 is Hermitian."""

    m: np.ndarray = field(repr=False)
    dt: float = 0.0

    def __post_init__(self):
        m = np.asarray(self.m, dtype=complex)
        m.setflags(write=False)
        object.__setattr__(self, "m", m)


def build_h0_case1(omega_x: float, omega_c: float, g: float) -> SystemSpec:
    """Single dot + cavity: 2x2 H0 in the |0> (cavity), |1> (exciton) basis.

    Energies in meV.
    """
    h0 = np.array([[omega_c, g], [g, omega_x]], dtype=complex)
    w = np.array([[0.0], [1.0]])
    return SystemSpec(h0=h0, coupling_weights=w)


def build_h0_case2(omega1: float, omega2: float, omega_c: float,
                   g1: float, g2: float) -> SystemSpec:
    """Two dots + cavity: 3x3 H0 in the |0>, |1>, |2> basis, cavity-mediated.

    Energies in meV.  Each dot couples to its own bath channel of a shared
    phonon bath.
    """
    h0 = np.array([[omega_c, g1, g2],
                   [g1, omega1, 0.0],
                   [g2, 0.0, omega2]], dtype=complex)
    w = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    return SystemSpec(h0=h0, coupling_weights=w)


def step_matrix(spec: SystemSpec, dt: float) -> StepMatrix:
    """Matrix exponential exp(-i H0 dt / hbar) via eigen-decomposition.

    Exact for Hermitian H0 at any dimension.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    evals, evecs = np.linalg.eigh(spec.h0)
    phases = np.exp(-1j * evals * dt / HBAR_MEV_PS)
    m = (evecs * phases) @ evecs.conj().T
    return StepMatrix(m=m, dt=dt)
