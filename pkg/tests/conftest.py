"""Shared fixtures: reference bath/system parameters used across the suite."""

import numpy as np
import pytest

from pathint import BathSpec, build_h0_case1, build_h0_case2


@pytest.fixture(scope="session")
def gaas_bath():
    """Single-dot GaAs bath at 50 K."""
    return BathSpec(deformation_diff=-6.5, sound_velocity=4600.0,
                    mass_density=5.65, temperature=50.0,
                    confinement_lengths=(3.3,))


@pytest.fixture(scope="session")
def two_dot_bath():
    """Two identical dots, 5 nm apart, same material."""
    return BathSpec(deformation_diff=-6.5, sound_velocity=4600.0,
                    mass_density=5.65, temperature=50.0,
                    confinement_lengths=(3.3, 3.3), dot_separation=5.0)


@pytest.fixture(scope="session")
def resonant_case1():
    """Zero-detuning dot-cavity system, g = 100 ueV."""
    return build_h0_case1(0.0, 0.0, 0.1)


@pytest.fixture(scope="session")
def resonant_case2():
    """Degenerate two-dot-cavity system, g1 = g2 = 80 ueV."""
    return build_h0_case2(0.0, 0.0, 0.0, 0.08, 0.08)


@pytest.fixture
def rng():
    return np.random.default_rng(20260825)
