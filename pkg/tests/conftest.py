"""Pytest configuration and shared fixtures."""

import matplotlib
import numpy as np
import pytest

from cavity_decay.dielectric import ComplexPermittivity, DielectricModel
from cavity_decay.green_sphere import CavityGeometry


def pytest_configure(config):
    """Configure pytest with custom settings."""
    # Use non-interactive backend for matplotlib to avoid GUI issues in tests
    matplotlib.use("Agg")


@pytest.fixture
def lossy_eps() -> ComplexPermittivity:
    """Absorbing medium used across the Green-tensor tests."""
    return ComplexPermittivity(2.0, 0.5)


@pytest.fixture
def lossless_eps() -> ComplexPermittivity:
    return ComplexPermittivity(2.0, 0.0)


@pytest.fixture
def fixed_damping_model() -> DielectricModel:
    """Lorentz medium of the published figures: omega_P = 0.46, gamma = 0.05."""
    return DielectricModel.fixed_damping_lorentz(1.0, 0.46, 0.05)


@pytest.fixture
def small_cavity() -> CavityGeometry:
    return CavityGeometry.fraction_of_wavelength(0.02)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)
