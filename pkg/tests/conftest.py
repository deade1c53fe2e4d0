"""
Shared fixtures: the 800-element 30 GHz reference UCA and small arrays for fast checks
"""
import pytest

from models.schemas import SPEED_OF_LIGHT, ArrayGeometry, ArrayLayout


@pytest.fixture(scope="session")
def reference_uca() -> ArrayGeometry:
    return ArrayGeometry(layout=ArrayLayout.UCA, n=800, wavelength_m=SPEED_OF_LIGHT / 30e9, radius_m=0.64)


@pytest.fixture(scope="session")
def small_uca() -> ArrayGeometry:
    return ArrayGeometry.half_wavelength_uca(128, 0.01)


@pytest.fixture(scope="session")
def small_ula() -> ArrayGeometry:
    return ArrayGeometry.half_wavelength_ula(64, 0.01)


@pytest.fixture(scope="session")
def small_cylinder() -> ArrayGeometry:
    return ArrayGeometry(layout=ArrayLayout.CYLINDRICAL, n=64, wavelength_m=0.01, radius_m=0.05,
                         spacing_m=0.005, ring_half_count=2)
