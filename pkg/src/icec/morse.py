"""Morse oscillator: analytic bound levels, box-discretized continuum, matrix elements."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.special import eval_genlaguerre, gammaln

from . import _numerov
from .constants import ANGSTROM, CM
from .errors import ConfigurationError, ConvergenceError, DomainError
from .quadrature import RadialGrid

BOUND = "bound"
BOX = "box-dissociative"

ROOT_TOL = 1e-12  # hartree


@dataclass(frozen=True)
class MorseSurface:
    """One electronic potential curve, all quantities in atomic units.

    ``asymptote`` names the atom that carries the positive charge at R -> inf.
    """

    label: str
    r_e: float
    d_e: float
    omega_e: float
    e_min: float
    mu: float
    asymptote: str = ""

    def __post_init__(self):
        for name in ("r_e", "d_e", "omega_e", "mu"):
            if not getattr(self, name) > 0:
                raise ConfigurationError(f"surface {self.label}: {name} must be positive")
        if self.lam <= 0.5:
            raise ConfigurationError(
                f"surface {self.label}: 2*D_e/omega_e = {self.lam:.4g} <= 1/2, no bound states")

    @classmethod
    def from_spectroscopic(cls, label, r_e_angstrom, d_e_cm, omega_e_cm, e_min, mu, asymptote=""):
        return cls(label, r_e_angstrom * ANGSTROM, d_e_cm * CM, omega_e_cm * CM, e_min, mu, asymptote)

    @property
    def a(self):
        """Range parameter [1/bohr]."""
        return self.omega_e * math.sqrt(self.mu / (2.0 * self.d_e))

    @property
    def lam(self):
        return 2.0 * self.d_e / self.omega_e

    def __call__(self, r):
        return morse_potential(self, r)


def morse_potential(surface, r):
    """Potential measured from the well minimum."""
    return surface.d_e * (1.0 - np.exp(-surface.a * (np.asarray(r) - surface.r_e))) ** 2


def bound_state_count(surface):
    return int(math.floor(surface.lam - 0.5)) + 1


def bound_energy(surface, n):
    """Level energy above the well minimum."""
    x = surface.omega_e * (n + 0.5)
    return x - x * x / (4.0 * surface.d_e)


@dataclass(frozen=True, eq=False)
class VibState:
    """A vibrational state sampled on ``grid.points`` and on the quadrature nodes.

    Box-dissociative states carry ``dos``, the density of box levels at their
    energy, which converts box normalization to energy normalization.
    """

    surface: MorseSurface
    kind: str
    index: int
    energy_rel_min: float
    grid: RadialGrid
    amplitude: np.ndarray = field(repr=False)
    nodal: np.ndarray = field(repr=False)
    dos: float | None = None
    box_unreliable: bool = False
    _evaluate: Callable = field(default=None, repr=False)

    @property
    def energy_rel_asymptote(self):
        return self.energy_rel_min - self.surface.d_e

    @property
    def is_bound(self):
        return self.kind == BOUND

    def __call__(self, r):
        return self._evaluate(np.asarray(r, dtype=float))

    def on(self, grid):
        """Values on the quadrature nodes of another grid with the same box."""
        if grid == self.grid:
            return self.nodal
        return self(grid.nodes)


def _analytic_bound(surface, n, r):
    lam, a = surface.lam, surface.a
    s = lam - n - 0.5
    z = 2.0 * lam * np.exp(-a * (r - surface.r_e))
    lognorm = 0.5 * (math.log(a * 2.0 * s) + gammaln(n + 1) - gammaln(2.0 * lam - n))
    lag = eval_genlaguerre(n, 2.0 * s, z)
    with np.errstate(divide="ignore"):
        env = np.exp(lognorm + s * np.log(z) - 0.5 * z)
    return env * lag


def bound_state(surface, n, grid):
    """Normalized analytic Morse level ``n`` on the box (0, grid.r_box]."""
    count = bound_state_count(surface)
    if not 0 <= n < count:
        raise DomainError(f"surface {surface.label} has bound levels 0..{count - 1}, got {n}")
    raw = _analytic_bound(surface, n, grid.nodes)
    scale = 1.0 / math.sqrt(grid.integrate(raw * raw))

    def evaluate(r, _s=surface, _n=n, _c=scale):
        return _c * _analytic_bound(_s, _n, r)

    return VibState(
        surface=surface,
        kind=BOUND,
        index=n,
        energy_rel_min=bound_energy(surface, n),
        grid=grid,
        amplitude=evaluate(grid.points),
        nodal=scale * raw,
        box_unreliable=(n == count - 1),
        _evaluate=evaluate,
    )


def bound_states(surface, grid):
    return [bound_state(surface, n, grid) for n in range(bound_state_count(surface))]


@lru_cache(maxsize=32)
def _fine_potential(surface, grid):
    return morse_potential(surface, grid.fine)


def box_levels(surface, grid, first, last):
    """Dirichlet box eigenvalues with global indices first..last (0 = lowest)."""
    v = _fine_potential(surface, grid)
    two_mu, h = 2.0 * surface.mu, grid.h_fine
    e_lo = 0.0
    e_hi = surface.d_e + 1.0
    while _numerov.count_below(v, e_hi, two_mu, h) <= last:
        e_hi *= 2.0
        if e_hi > 1e6:
            raise ConvergenceError(f"cannot bracket box level {last} of {surface.label}", (e_lo, e_hi))
    levels = _numerov.eigenvalues(v, two_mu, h, first, last, e_lo, e_hi, ROOT_TOL)
    if np.any(np.diff(levels) <= 0):
        raise ConvergenceError(f"box levels of {surface.label} not strictly increasing", (e_lo, e_hi))
    return levels


def _box_wavefunction(surface, grid, energy):
    psi = _numerov.wavefunction(_fine_potential(surface, grid), energy, 2.0 * surface.mu, grid.h_fine)
    psi[-1] = 0.0
    return psi


def density_of_states(energies, j):
    """rho(E_j) = 2/|E_{j+1} - E_{j-1}|, one-sided 1/|spacing| at the end points."""
    e = np.asarray(energies, dtype=float)
    if len(e) < 3:
        raise DomainError("density of states needs at least three levels")
    if not 0 <= j < len(e):
        raise DomainError(f"level index {j} out of range")
    if j == 0:
        return 1.0 / abs(e[1] - e[0])
    if j == len(e) - 1:
        return 1.0 / abs(e[-1] - e[-2])
    return 2.0 / abs(e[j + 1] - e[j - 1])


def densities(energies):
    e = np.asarray(energies, dtype=float)
    if len(e) < 3:
        raise DomainError("density of states needs at least three levels")
    rho = np.empty_like(e)
    rho[1:-1] = 2.0 / np.abs(e[2:] - e[:-2])
    rho[0] = 1.0 / abs(e[1] - e[0])
    rho[-1] = 1.0 / abs(e[-1] - e[-2])
    return rho


def dissociative_states(surface, grid, e_max=None, count=None):
    """Box-normalized continuum states (energy above D_e) with psi(R_box) = 0.

    Either ``e_max`` (kinetic energy release, relative to the asymptote) or
    ``count`` selects how many are built.  With ``e_max`` the first level above
    it is included as well so every returned state has a two-sided density.
    """
    if (e_max is None) == (count is None):
        raise ValueError("give exactly one of e_max or count")
    v = _fine_potential(surface, grid)
    first = _numerov.count_below(v, surface.d_e, 2.0 * surface.mu, grid.h_fine)
    if count is None:
        e_top = surface.d_e + max(e_max, 0.0)
        last = _numerov.count_below(v, e_top, 2.0 * surface.mu, grid.h_fine)
        last = max(last, first + 2)
    else:
        if count < 3:
            raise DomainError("need at least three box states")
        last = first + count - 1
    energies = box_levels(surface, grid, first, last)
    rho = densities(energies)
    m = grid.oversample
    fine_to_nodes = grid.to_nodes
    states = []
    for j, (e, dos) in enumerate(zip(energies, rho)):
        psi = _box_wavefunction(surface, grid, e)
        nodal = fine_to_nodes @ psi
        scale = 1.0 / math.sqrt(grid.integrate(nodal * nodal))
        states.append(VibState(
            surface=surface,
            kind=BOX,
            index=j,
            energy_rel_min=float(e),
            grid=grid,
            amplitude=scale * psi[m::m],
            nodal=scale * nodal,
            dos=float(dos),
            _evaluate=_BoxEvaluator(surface, grid, float(e), scale),
        ))
    return states


@dataclass(frozen=True)
class _BoxEvaluator:
    surface: MorseSurface
    grid: RadialGrid
    energy: float
    scale: float

    def __call__(self, r):
        from .quadrature import lagrange_matrix

        psi = _box_wavefunction(self.surface, self.grid, self.energy)
        flat = np.atleast_1d(r).ravel()
        out = lagrange_matrix(self.grid.fine, self.grid.h_fine, flat) @ psi
        return self.scale * out.reshape(np.shape(r))


@lru_cache(maxsize=8)
def _refined(grid, level):
    return grid.refined(2 ** level)


def weighted_matrix_element(bra, ket, weight=None, rtol=1e-6, max_refine=4):
    """<bra| w(R) |ket> by composite Gauss-Legendre quadrature over the box.

    Panels are doubled until two successive estimates agree to ``rtol``
    (relative, with an absolute floor of ``rtol`` times the Cauchy-Schwarz scale).
    """
    if bra.grid.r_box != ket.grid.r_box:
        raise DomainError("states live on different boxes")
    grid = bra.grid

    def estimate(g):
        x = g.nodes
        w = np.ones_like(x) if weight is None else weight(x)
        b, k = bra.on(g), ket.on(g)
        scale = math.sqrt(g.integrate(b * b * np.abs(w)) * g.integrate(k * k * np.abs(w)))
        return g.integrate(b * w * k), scale

    prev, scale = estimate(grid)
    for level in range(1, max_refine + 1):
        cur, scale = estimate(_refined(grid, level))
        if abs(cur - prev) <= rtol * max(abs(cur), scale * rtol, 1e-300):
            return prev if level == 1 else cur
        prev = cur
    raise ConvergenceError("matrix element did not converge under panel refinement", (prev, cur))
