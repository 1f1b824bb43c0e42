import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from steklov_bounds import SurfaceMetric, StarDomain, steklov_spectrum


@pytest.fixture(scope="session")
def plane():
    return SurfaceMetric.plane()


@pytest.fixture(scope="session")
def sphere():
    return SurfaceMetric.sphere()


@pytest.fixture(scope="session")
def tanh_surface():
    return SurfaceMetric.tanh()


@pytest.fixture(scope="session")
def paraboloid():
    return SurfaceMetric.paraboloid()


@pytest.fixture(scope="session")
def pert_domain():
    """The workhorse perturbed disc R = 1 + 0.2 cos(2 theta)."""
    return StarDomain([1.0, 0.0, 0.2])


@pytest.fixture(scope="session")
def pert_spectrum(plane, pert_domain):
    """Converged spectrum of the perturbed disc, shared across tests."""
    return steklov_spectrum(plane, pert_domain, 8)
