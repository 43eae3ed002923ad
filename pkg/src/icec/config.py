"""Run configuration: TOML file -> validated :class:`RunConfig`.

Schema (every table and key optional, unknown keys are rejected)::

    [system]
    reduced_mass_me = 6088.63          # default from He-4 / Ne-20.1797 masses
    species_registry = "species.toml"  # relative to the config file

    [surfaces.X]                       # override any surface parameter
    r_e_angstrom = 1.43
    d_e_cm = 5200.0
    omega_e_cm = 911.0
    e_min_hartree = -130.94349
    asymptote = "Ne"

    [grid]
    r_box_angstrom = 10.0
    points = 3000
    panels = 600

    [electron_transfer]
    alpha = 1.6
    c_bar = 1.0
    d_hartree = 1.0                   # or d_eV
    ell_max = 200
    term_tol = 1e-8
    calibrated = false
    r_cov_angstrom = { He = 0.28, Ne = 0.58 }

    [channels]
    weights = { "A-B" = 1.0 }

    [run]
    energies = "0:8:0.01"             # eV, start:stop:step, start excluded
    temperatures_K = [15, 77, 298]
    format = "csv"
    output = "out.csv"

    [validate]
    dvr_points = 3000

The environment variable ``ICEC_CONFIG`` names a default file.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._toml import load_toml
from .atomdata import load_species_registry
from .channels import SURFACE_PARAMETERS, default_surfaces
from .constants import ANGSTROM, EV, MASS_HE, MASS_NE, reduced_mass
from .errors import ConfigurationError
from .quadrature import RadialGrid

ENV_VAR = "ICEC_CONFIG"
FORMATS = ("csv", "json")
DEFAULT_TEMPERATURES = (15.0, 77.0, 298.0)
# plotted ranges: He+ captures in B-X / B-A, Ne+ in X-B / A-B
DEFAULT_ENERGIES = {"B-X": "0:8:0.01", "B-A": "0:8:0.01", "X-B": "3:8:0.01", "A-B": "3:8:0.01"}

_SCHEMA = {
    "system": {"reduced_mass_me", "species_registry"},
    "surfaces": None,
    "grid": {"r_box_angstrom", "points", "panels"},
    "electron_transfer": {"alpha", "c_bar", "d_hartree", "d_eV", "ell_max", "term_tol", "calibrated",
                          "r_cov_angstrom"},
    "channels": {"weights"},
    "run": {"energies", "temperatures_K", "format", "output"},
    "validate": {"dvr_points"},
}
_SURFACE_KEYS = ("r_e_angstrom", "d_e_cm", "omega_e_cm", "e_min_hartree", "asymptote")


def parse_energy_grid(text):
    """``start:stop:step`` in eV -> array start + k*step, k = 1..n, last point <= stop.

    The start point itself is excluded so that a grid beginning at 0 never
    evaluates the 1/epsilon divergence at epsilon = 0.
    """
    try:
        start, stop, step = (float(x) for x in str(text).split(":"))
    except ValueError:
        raise ConfigurationError(f"energy grid {text!r}: expected start:stop:step") from None
    if not (step > 0 and stop > start >= 0):
        raise ConfigurationError(f"energy grid {text!r}: need 0 <= start < stop and step > 0")
    n = int(math.floor((stop - start) / step + 1e-9))
    if n < 1:
        raise ConfigurationError(f"energy grid {text!r} is empty")
    return start + step * np.arange(1, n + 1)


@dataclass
class RunConfig:
    reduced_mass: float = field(default_factory=lambda: reduced_mass(MASS_HE, MASS_NE))
    species_registry: Path | None = None
    surfaces: dict = field(default_factory=lambda: {k: v for k, v in SURFACE_PARAMETERS.items()})
    r_box: float = 10.0 * ANGSTROM
    grid_points: int = 3000
    panels: int = 600
    alpha: float = 1.6
    c_bar: float = 1.0
    d: float = 1.0
    ell_max: int = 200
    term_tol: float = 1e-8
    calibrated: bool = False
    r_cov: dict = field(default_factory=dict)
    channel_weights: dict = field(default_factory=dict)
    energies: str | None = None
    temperatures: tuple = DEFAULT_TEMPERATURES
    format: str = "csv"
    output: str | None = None
    dvr_points: int = 3000
    source: str = "<defaults>"

    def __post_init__(self):
        self.validate()

    def validate(self):
        positive = dict(reduced_mass=self.reduced_mass, r_box=self.r_box, alpha=self.alpha, d=self.d,
                        term_tol=self.term_tol)
        for name, value in positive.items():
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ConfigurationError(f"{name} must be a positive number, got {value!r}")
        if self.c_bar < 0:
            raise ConfigurationError("c_bar must be non-negative")
        for name in ("grid_points", "panels", "ell_max", "dvr_points"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or value < (0 if name == "ell_max" else 1):
                raise ConfigurationError(f"{name} must be a positive integer, got {value!r}")
        if self.format not in FORMATS:
            raise ConfigurationError(f"format must be one of {FORMATS}, got {self.format!r}")
        if any(not (t >= 0) for t in self.temperatures):
            raise ConfigurationError("temperatures must be non-negative")
        if self.energies is not None:
            parse_energy_grid(self.energies)
        for label, row in self.surfaces.items():
            r, d, w = row[:3]
            if not (r > 0 and d > 0 and w > 0):
                raise ConfigurationError(f"surface {label}: R_e, D_e, omega_e must be positive")
        for name, r in self.r_cov.items():
            if not r > 0:
                raise ConfigurationError(f"covalent radius of {name} must be positive")
        for name, w in self.channel_weights.items():
            if not w >= 0:
                raise ConfigurationError(f"channel weight {name} must be non-negative")

    # -- derived objects ----------------------------------------------------

    def build_surfaces(self):
        return default_surfaces(self.reduced_mass, self.surfaces)

    def build_species(self):
        species = load_species_registry(self.species_registry)
        for name, r in self.r_cov.items():
            if name not in species:
                raise ConfigurationError(f"r_cov override for unknown species {name!r}")
            species[name] = dataclasses.replace(species[name], r_cov=r * ANGSTROM)
        return species

    def build_grid(self):
        return RadialGrid(self.r_box, n_points=self.grid_points, panels=self.panels)

    def build_model(self):
        from .engine import IcecModel

        return IcecModel(surfaces=self.build_surfaces(), species=self.build_species(), grid=self.build_grid(),
                         alpha=self.alpha, c_bar=self.c_bar, d=self.d, ell_max=self.ell_max,
                         term_tol=self.term_tol, calibrated=self.calibrated, weights=self.channel_weights)

    def energy_grid(self, channel_name):
        return parse_energy_grid(self.energies or DEFAULT_ENERGIES[channel_name])

    def physics_parameters(self):
        """Everything that can change a computed number, in I/O units."""
        return {
            "reduced_mass_me": self.reduced_mass,
            "species_registry": str(self.species_registry) if self.species_registry else "packaged",
            "surfaces": {k: list(v) for k, v in sorted(self.surfaces.items())},
            "r_box_angstrom": float(f"{self.r_box / ANGSTROM:.12g}"),
            "grid_points": self.grid_points,
            "panels": self.panels,
            "alpha": self.alpha,
            "c_bar": self.c_bar,
            "d_eV": float(f"{self.d / EV:.12g}"),
            "ell_max": self.ell_max,
            "term_tol": self.term_tol,
            "calibrated": self.calibrated,
            "r_cov_angstrom": dict(sorted(self.r_cov.items())),
            "channel_weights": dict(sorted(self.channel_weights.items())),
        }

    def digest(self):
        blob = json.dumps(self.physics_parameters(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _check_keys(section, allowed, where):
    unknown = set(section) - set(allowed)
    if unknown:
        raise ConfigurationError(f"{where}: unknown keys {sorted(unknown)}")


def load_config(path=None):
    """Read ``path`` (or ``$ICEC_CONFIG``); no file means built-in defaults."""
    if path is None:
        path = os.environ.get(ENV_VAR) or None
    if path is None:
        return RunConfig()
    path = Path(path)
    if not path.is_file():
        raise ConfigurationError(f"config file {path} not found")
    try:
        doc = load_toml(path)
    except Exception as exc:  # tomllib.TOMLDecodeError and friends
        raise ConfigurationError(f"{path}: {exc}") from None
    _check_keys(doc, _SCHEMA, str(path))
    kw = {"source": str(path)}

    sec = doc.get("system", {})
    _check_keys(sec, _SCHEMA["system"], f"{path} [system]")
    if "reduced_mass_me" in sec:
        kw["reduced_mass"] = float(sec["reduced_mass_me"])
    if "species_registry" in sec:
        reg = Path(sec["species_registry"])
        kw["species_registry"] = reg if reg.is_absolute() else path.parent / reg

    surfaces = {k: v for k, v in SURFACE_PARAMETERS.items()}
    for label, row in doc.get("surfaces", {}).items():
        _check_keys(row, _SURFACE_KEYS, f"{path} [surfaces.{label}]")
        base = SURFACE_PARAMETERS.get(label)
        if base is None and set(row) != set(_SURFACE_KEYS):
            raise ConfigurationError(f"{path}: new surface {label} needs all of {_SURFACE_KEYS}")
        merged = list(base) if base else [None] * 5
        for i, key in enumerate(_SURFACE_KEYS):
            if key in row:
                merged[i] = row[key] if key == "asymptote" else float(row[key])
        surfaces[label] = tuple(merged)
    kw["surfaces"] = surfaces

    sec = doc.get("grid", {})
    _check_keys(sec, _SCHEMA["grid"], f"{path} [grid]")
    if "r_box_angstrom" in sec:
        kw["r_box"] = float(sec["r_box_angstrom"]) * ANGSTROM
    if "points" in sec:
        kw["grid_points"] = sec["points"]
    if "panels" in sec:
        kw["panels"] = sec["panels"]

    sec = doc.get("electron_transfer", {})
    _check_keys(sec, _SCHEMA["electron_transfer"], f"{path} [electron_transfer]")
    if "d_hartree" in sec and "d_eV" in sec:
        raise ConfigurationError(f"{path}: give d_hartree or d_eV, not both")
    for key, attr in (("alpha", "alpha"), ("c_bar", "c_bar"), ("term_tol", "term_tol")):
        if key in sec:
            kw[attr] = float(sec[key])
    if "d_hartree" in sec:
        kw["d"] = float(sec["d_hartree"])
    if "d_eV" in sec:
        kw["d"] = float(sec["d_eV"]) * EV
    if "ell_max" in sec:
        kw["ell_max"] = sec["ell_max"]
    if "calibrated" in sec:
        kw["calibrated"] = bool(sec["calibrated"])
    if "r_cov_angstrom" in sec:
        kw["r_cov"] = {k: float(v) for k, v in sec["r_cov_angstrom"].items()}

    sec = doc.get("channels", {})
    _check_keys(sec, _SCHEMA["channels"], f"{path} [channels]")
    if "weights" in sec:
        kw["channel_weights"] = {k.upper(): float(v) for k, v in sec["weights"].items()}

    sec = doc.get("run", {})
    _check_keys(sec, _SCHEMA["run"], f"{path} [run]")
    if "energies" in sec:
        kw["energies"] = str(sec["energies"])
    if "temperatures_K" in sec:
        kw["temperatures"] = tuple(float(t) for t in sec["temperatures_K"])
    if "format" in sec:
        kw["format"] = sec["format"]
    if "output" in sec:
        kw["output"] = sec["output"]

    sec = doc.get("validate", {})
    _check_keys(sec, _SCHEMA["validate"], f"{path} [validate]")
    if "dvr_points" in sec:
        kw["dvr_points"] = sec["dvr_points"]

    return RunConfig(**kw)
