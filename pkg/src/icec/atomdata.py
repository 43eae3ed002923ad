"""Atomic partners: ionization potentials, photoionization tables, photorecombination."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from ._toml import load_toml
from .constants import ANGSTROM, C_LIGHT, EV, MB
from .errors import ConfigurationError, ExtrapolationError, TableParseError, ThresholdError

HEADER = ["photon_energy_eV", "sigma_Mb"]


@dataclass(frozen=True, eq=False)
class PhotoTable:
    """Photoionization cross section samples, photon energy [hartree] -> sigma [bohr^2]."""

    energy: np.ndarray
    sigma: np.ndarray
    provenance: str = ""

    def __post_init__(self):
        if len(self.energy) < 2 or len(self.energy) != len(self.sigma):
            raise ValueError("photoionization table needs at least two matching rows")
        if np.any(np.diff(self.energy) <= 0):
            raise ValueError("photon energies must be strictly increasing")
        if np.any(self.sigma < 0):
            raise ValueError("cross sections must be non-negative")

    def __len__(self):
        return len(self.energy)

    def __call__(self, omega):
        """Log-log linear interpolation; exact at nodes, no extrapolation."""
        e, s = self.energy, self.sigma
        if not e[0] <= omega <= e[-1]:
            raise ExtrapolationError(
                f"photon energy {omega / EV:.4f} eV outside table range "
                f"[{e[0] / EV:.4f}, {e[-1] / EV:.4f}] eV")
        i = int(np.searchsorted(e, omega))
        if e[i] == omega:
            return float(s[i])
        s0, s1 = s[i - 1], s[i]
        if s0 == 0.0 or s1 == 0.0:
            t = (omega - e[i - 1]) / (e[i] - e[i - 1])
            return float(s0 + t * (s1 - s0))
        t = math.log(omega / e[i - 1]) / math.log(e[i] / e[i - 1])
        return float(math.exp(math.log(s0) + t * math.log(s1 / s0)))

    def many(self, omega):
        """Vectorized ``__call__`` for an array of photon energies."""
        omega = np.asarray(omega, dtype=float)
        if omega.size == 0:
            return np.zeros_like(omega)
        if omega.min() < self.energy[0] or omega.max() > self.energy[-1]:
            bad = omega[(omega < self.energy[0]) | (omega > self.energy[-1])][0]
            return np.array([self(bad)])  # raises with a precise message
        if np.any(self.sigma == 0):
            return np.array([self(w) for w in omega.ravel()]).reshape(omega.shape)
        out = np.exp(np.interp(np.log(omega), np.log(self.energy), np.log(self.sigma)))
        hit = np.searchsorted(self.energy, omega).clip(max=len(self.energy) - 1)
        exact = self.energy[hit] == omega
        out[exact] = self.sigma[hit[exact]]
        return out


def load_pi_table(path):
    """Read a ``photon_energy_eV,sigma_Mb`` CSV file; ``#`` lines are comments."""
    path = Path(path)
    comments, rows = [], []
    header_seen = False
    with open(path, encoding="utf-8", newline="") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            if text.startswith("#"):
                comments.append(text.lstrip("#").strip())
                continue
            fields = next(csv.reader([text]))
            if not header_seen:
                if [f.strip() for f in fields] != HEADER:
                    raise TableParseError(path, lineno, f"expected header {','.join(HEADER)}")
                header_seen = True
                continue
            if len(fields) != 2:
                raise TableParseError(path, lineno, f"expected 2 columns, got {len(fields)}")
            try:
                energy, sigma = float(fields[0]), float(fields[1])
            except ValueError:
                raise TableParseError(path, lineno, f"non-numeric row {text!r}") from None
            if not (math.isfinite(energy) and math.isfinite(sigma)):
                raise TableParseError(path, lineno, "non-finite value")
            if sigma < 0:
                raise TableParseError(path, lineno, f"negative cross section {sigma}")
            if rows and energy <= rows[-1][1]:
                raise TableParseError(path, lineno, "photon energies must be strictly increasing")
            rows.append((lineno, energy, sigma))
    if not header_seen:
        raise TableParseError(path, 1, "missing header")
    if len(rows) < 2:
        raise TableParseError(path, rows[-1][0] if rows else 1, "need at least two rows")
    energy = np.array([r[1] for r in rows]) * EV
    sigma = np.array([r[2] for r in rows]) * MB
    provenance = " ".join(comments) or str(path)
    return PhotoTable(energy, sigma, provenance)


@dataclass(frozen=True, eq=False)
class AtomicSpecies:
    name: str
    ip: float
    g_neutral: int
    g_ion: int
    r_cov: float
    pi_table: PhotoTable = field(repr=False)
    orbital_degeneracy: int = 1

    def __post_init__(self):
        if not (self.ip > 0 and self.r_cov > 0):
            raise ConfigurationError(f"{self.name}: IP and covalent radius must be positive")
        if self.orbital_degeneracy < 1 or self.g_neutral < 1 or self.g_ion < 1:
            raise ConfigurationError(f"{self.name}: degeneracies must be >= 1")
        if self.pi_table.energy[0] < self.ip * (1 - 1e-12):
            raise ConfigurationError(f"{self.name}: photoionization table starts below the IP")


def pi_cross_section(species, omega, per_orbital=False):
    if omega < species.ip:
        raise ThresholdError(
            f"{species.name}: photon energy {omega / EV:.4f} eV below IP {species.ip / EV:.4f} eV")
    sigma = species.pi_table(omega)
    return sigma / species.orbital_degeneracy if per_orbital else sigma


def pi_cross_sections(species, omega, per_orbital=False):
    omega = np.asarray(omega, dtype=float)
    if omega.size and omega.min() < species.ip:
        pi_cross_section(species, float(omega.min()))
    sigma = species.pi_table.many(omega)
    return sigma / species.orbital_degeneracy if per_orbital else sigma


def _milne_factor(species, epsilon):
    omega = epsilon + species.ip
    k = math.sqrt(2.0 * epsilon)
    return species.g_neutral / species.g_ion * (omega / (C_LIGHT * k)) ** 2


def pr_cross_section(acceptor_neutral, epsilon):
    """Photorecombination onto the cation of ``acceptor_neutral`` by detailed balance.

    The photon carries epsilon + IP; sigma_PR = (g_n/g_ion) (omega/(c k))^2 sigma_PI(omega).
    """
    if not epsilon > 0:
        raise ThresholdError("photorecombination needs a positive electron energy")
    omega = epsilon + acceptor_neutral.ip
    return _milne_factor(acceptor_neutral, epsilon) * pi_cross_section(acceptor_neutral, omega)


def pi_from_pr(acceptor_neutral, epsilon, sigma_pr):
    """Inverse Milne relation: the photoionization cross section at epsilon + IP."""
    return sigma_pr / _milne_factor(acceptor_neutral, epsilon)


def gaussian_width(species, alpha=1.6):
    if not alpha > 0:
        raise ConfigurationError("Gaussian width scale alpha must be positive")
    return alpha * species.r_cov


def load_species_registry(path=None):
    """Species keyed by name from a TOML registry; relative table paths resolve
    against the registry's directory.  ``None`` loads the packaged He/Ne data."""
    if path is None:
        ref = resources.files("icec") / "data" / "species.toml"
        with resources.as_file(ref) as p:
            return _read_registry(Path(p))
    return _read_registry(Path(path))


_REGISTRY_KEYS = {"name", "ip_eV", "g_neutral", "g_ion", "r_cov_angstrom", "orbital_degeneracy", "pi_table_path"}


def _read_registry(path):
    doc = load_toml(path)
    out = {}
    for entry in doc.get("species", []):
        unknown = set(entry) - _REGISTRY_KEYS
        missing = _REGISTRY_KEYS - set(entry)
        if unknown or missing:
            raise ConfigurationError(
                f"{path}: species entry {entry.get('name', '?')}: "
                f"unknown keys {sorted(unknown)}, missing keys {sorted(missing)}")
        table_path = Path(entry["pi_table_path"])
        if not table_path.is_absolute():
            table_path = path.parent / table_path
        out[entry["name"]] = AtomicSpecies(
            name=entry["name"],
            ip=entry["ip_eV"] * EV,
            g_neutral=int(entry["g_neutral"]),
            g_ion=int(entry["g_ion"]),
            r_cov=entry["r_cov_angstrom"] * ANGSTROM,
            pi_table=load_pi_table(table_path),
            orbital_degeneracy=int(entry["orbital_degeneracy"]),
        )
    if not out:
        raise ConfigurationError(f"{path}: no species defined")
    return out
