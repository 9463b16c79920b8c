"""System Hamiltonians and the phonon-free step matrix."""

import numpy as np
import pytest

from pathint import (SystemSpec, build_h0_case1, build_h0_case2, step_matrix)
from pathint.units import HBAR_MEV_PS


class TestBuilders:
    def test_case1_matrix(self):
        spec = build_h0_case1(1.5, 0.5, 0.1)
        assert np.array_equal(spec.h0, [[0.5, 0.1], [0.1, 1.5]])
        assert np.array_equal(spec.coupling_weights, [[0.0], [1.0]])
        assert spec.dim == 2 and spec.n_baths == 1

    def test_case2_matrix(self):
        spec = build_h0_case2(1.0, 2.0, 0.5, 0.3, 0.4)
        assert np.array_equal(spec.h0, [[0.5, 0.3, 0.4],
                                        [0.3, 1.0, 0.0],
                                        [0.4, 0.0, 2.0]])
        assert np.array_equal(spec.coupling_weights,
                              [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])

    def test_case2_degenerate_eigenvalues(self):
        """Equal couplings at zero detuning give 0, +-sqrt(2) g."""
        g = 0.08
        spec = build_h0_case2(0.0, 0.0, 0.0, g, g)
        evals = np.linalg.eigvalsh(spec.h0)
        assert evals == pytest.approx(
            [-np.sqrt(2) * g, 0.0, np.sqrt(2) * g], abs=1e-14)

    def test_case2_dark_state(self):
        """The antisymmetric exciton combination decouples from the cavity."""
        g = 0.08
        spec = build_h0_case2(0.0, 0.0, 0.0, g, g)
        dark = np.array([0.0, 1.0, -1.0]) / np.sqrt(2)
        assert np.max(np.abs(spec.h0 @ dark)) < 1e-15

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError):
            SystemSpec(h0=np.array([[0.0, 1.0], [0.0, 0.0]]),
                       coupling_weights=np.array([[0.0], [1.0]]))

    def test_rejects_coupled_cavity(self):
        with pytest.raises(ValueError):
            SystemSpec(h0=np.zeros((2, 2)),
                       coupling_weights=np.array([[1.0], [1.0]]))


class TestStepMatrix:
    def test_unitary(self, resonant_case2):
        m = step_matrix(resonant_case2, 0.07).m
        assert np.allclose(m @ m.conj().T, np.eye(3), atol=1e-14)

    def test_semigroup(self, resonant_case1):
        m1 = step_matrix(resonant_case1, 0.1).m
        m2 = step_matrix(resonant_case1, 0.2).m
        assert np.allclose(m1 @ m1, m2, atol=1e-14)

    def test_resonant_two_level_closed_form(self):
        """At zero detuning the 2x2 step matrix is a pure Rabi rotation."""
        g, dt = 0.1, 0.3
        m = step_matrix(build_h0_case1(0.0, 0.0, g), dt).m
        phi = g * dt / HBAR_MEV_PS
        expected = np.array([[np.cos(phi), -1j * np.sin(phi)],
                             [-1j * np.sin(phi), np.cos(phi)]])
        assert np.allclose(m, expected, atol=1e-14)

    def test_detuned_phases(self):
        """Zero coupling: diagonal phases exp(-i E dt / hbar)."""
        m = step_matrix(build_h0_case1(1.2, 0.4, 0.0), 0.5).m
        assert m[0, 0] == pytest.approx(np.exp(-0.5j * 0.4 / HBAR_MEV_PS))
        assert m[1, 1] == pytest.approx(np.exp(-0.5j * 1.2 / HBAR_MEV_PS))
        assert abs(m[0, 1]) == 0.0

    def test_rejects_nonpositive_step(self, resonant_case1):
        with pytest.raises(ValueError):
            step_matrix(resonant_case1, 0.0)
