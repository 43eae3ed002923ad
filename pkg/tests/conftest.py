import pytest

from icec.atomdata import load_species_registry
from icec.channels import default_surfaces
from icec.engine import IcecModel
from icec.quadrature import RadialGrid
from icec.constants import ANGSTROM


@pytest.fixture(scope="session")
def surfaces():
    return default_surfaces()


@pytest.fixture(scope="session")
def species():
    return load_species_registry()


@pytest.fixture(scope="session")
def grid():
    return RadialGrid(10.0 * ANGSTROM)


@pytest.fixture(scope="session")
def model(surfaces, species, grid):
    """Shared default model; states are cached across tests."""
    return IcecModel(surfaces=surfaces, species=species, grid=grid)
