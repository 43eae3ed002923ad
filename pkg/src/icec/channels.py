"""Electronic surfaces of (HeNe)+, acceptor/donor roles and energy conservation."""

from __future__ import annotations

from dataclasses import dataclass

from .constants import MASS_HE, MASS_NE, reduced_mass
from .errors import ConfigurationError
from .morse import MorseSurface

ENERGY_TRANSFER = "energy_transfer"
ELECTRON_TRANSFER = "electron_transfer"
MECHANISMS = frozenset({ENERGY_TRANSFER, ELECTRON_TRANSFER})

# label: (R_e [A], D_e [cm-1], omega_e [cm-1], E at R_e [hartree], charged atom at R -> inf)
SURFACE_PARAMETERS = {
    "X": (1.43, 5200.0, 911.0, -130.94349, "Ne"),
    "A": (2.42, 283.0, 152.0, -130.92176, "Ne"),
    "B": (2.66, 343.0, 152.0, -130.80754, "He"),
}

# (initial, final, mechanisms)
CATALOG = (
    ("X", "B", MECHANISMS),
    ("B", "X", MECHANISMS),
    ("A", "B", frozenset({ENERGY_TRANSFER})),
    ("B", "A", frozenset({ENERGY_TRANSFER})),
)


def default_surfaces(mu=None, overrides=None):
    mu = reduced_mass(MASS_HE, MASS_NE) if mu is None else mu
    table = dict(SURFACE_PARAMETERS)
    for label, values in (overrides or {}).items():
        table[label] = values
    return {label: MorseSurface.from_spectroscopic(label, r, d, w, e, mu, charge)
            for label, (r, d, w, e, charge) in table.items()}


@dataclass(frozen=True)
class TransitionChannel:
    """initial -> final surface; the cation ``acceptor`` captures, ``donor`` is ionized.

    ``weight`` multiplies every cross section of the channel (electronic
    degeneracy factor, 1 by default).
    """

    initial: MorseSurface
    final: MorseSurface
    acceptor: object
    donor: object
    mechanisms: frozenset
    weight: float = 1.0

    def __post_init__(self):
        if self.initial.label == self.final.label:
            raise ConfigurationError("channel needs two different surfaces")
        if not self.mechanisms or not self.mechanisms <= MECHANISMS:
            raise ConfigurationError(f"invalid mechanisms {sorted(self.mechanisms)}")
        if self.initial.asymptote and self.initial.asymptote != self.acceptor.name:
            raise ConfigurationError(
                f"{self.name}: charge sits on {self.initial.asymptote} initially, acceptor is {self.acceptor.name}")
        if self.final.asymptote and self.final.asymptote != self.donor.name:
            raise ConfigurationError(
                f"{self.name}: charge ends on {self.final.asymptote}, donor is {self.donor.name}")

    @property
    def name(self):
        return f"{self.initial.label}-{self.final.label}"

    @property
    def delta_ip(self):
        """IP of the neutral formed by capture minus IP of the donor."""
        return self.acceptor.ip - self.donor.ip

    def has(self, mechanism):
        return mechanism in self.mechanisms


def transition_catalog(surfaces, species, weights=None):
    weights = weights or {}
    out = []
    for ini, fin, mech in CATALOG:
        try:
            s_i, s_f = surfaces[ini], surfaces[fin]
            acceptor, donor = species[s_i.asymptote], species[s_f.asymptote]
        except KeyError as exc:
            raise ConfigurationError(f"channel {ini}-{fin}: missing surface or species {exc}") from None
        out.append(TransitionChannel(s_i, s_f, acceptor, donor, mech, weights.get(f"{ini}-{fin}", 1.0)))
    return out


def find_channel(catalog, name):
    key = name.strip().upper()
    for ch in catalog:
        if ch.name == key:
            return ch
    raise ConfigurationError(f"unknown channel {name!r}; choose from {', '.join(c.name for c in catalog)}")


def outgoing_energy(channel, epsilon, e_i, e_f):
    """Kinetic energy of the emitted electron; vibrational energies relative to
    each surface's own dissociation limit.  Values <= 0 mean the channel is closed."""
    return epsilon + channel.delta_ip - (e_f - e_i)


def max_dissociation_energy(channel, epsilon, e_i):
    """Largest final-state energy (relative to its asymptote) with epsilon' >= 0."""
    return epsilon + channel.delta_ip + e_i
