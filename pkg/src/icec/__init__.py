"""Vibrationally resolved interatomic Coulombic electron capture in (HeNe)+."""

__version__ = "0.1.0"

from .atomdata import AtomicSpecies, PhotoTable, load_pi_table, load_species_registry  # noqa: E402
from .channels import TransitionChannel, transition_catalog  # noqa: E402
from .engine import ElectronTransferParams, IcecModel, SpectrumResult  # noqa: E402
from .morse import MorseSurface, VibState  # noqa: E402
from .quadrature import RadialGrid  # noqa: E402
