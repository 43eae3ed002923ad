"""ICEC cross sections with vibrational resolution.

Two routes compute the same numbers.  The module-level functions
(:func:`sigma_energy_transfer`, :func:`sigma_electron_transfer`) evaluate one
vibronic transition with adaptive quadrature; :class:`IcecModel` precomputes
the radial integrands for all final states of an initial level and evaluates
whole energy scans from them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import trapezoid

from . import _partial_waves
from .atomdata import gaussian_width, load_species_registry, pi_cross_section, pi_cross_sections, pr_cross_section
from .channels import (ELECTRON_TRANSFER, ENERGY_TRANSFER, default_surfaces, find_channel,
                       max_dissociation_energy, outgoing_energy, transition_catalog)
from .constants import ANGSTROM, C_LIGHT, K_B
from .errors import DomainError
from .morse import BOX, bound_states, dissociative_states, morse_potential, weighted_matrix_element
from .quadrature import RadialGrid

ET_PREFACTOR = 3.0 * C_LIGHT**4 / (4.0 * math.pi)
EL_PREFACTOR = 32.0 * math.pi
DISPLAY_FRACTION = 1e-3
SUPPORT_CUTOFF = 1e-14


@dataclass(frozen=True)
class ElectronTransferParams:
    """Gaussian widths of the accepting/donating orbitals and the J_l^2 model.

    ``c_bar`` and ``d`` are fit parameters; the defaults are placeholders
    (``calibrated`` False) and absolute electron-transfer magnitudes scale with them.
    """

    a_acceptor: float
    a_donor: float
    c_bar: float = 1.0
    d: float = 1.0
    ell_max: int = 200
    term_tol: float = 1e-8
    calibrated: bool = False

    def __post_init__(self):
        if not (self.a_acceptor > 0 and self.a_donor > 0 and self.d > 0):
            raise DomainError("Gaussian widths and d must be positive")
        if self.c_bar < 0 or self.ell_max < 0:
            raise DomainError("c_bar and ell_max must be non-negative")


def s_ad(r, a_acceptor, a_donor):
    """Overlap of two normalized s-type Gaussians of widths a_acceptor, a_donor at distance r."""
    s2 = a_acceptor**2 + a_donor**2
    return (a_acceptor * a_donor / s2) ** 1.5 * np.exp(-np.square(r) / (2.0 * s2))


def k2_av(r, epsilon, epsilon_prime, params):
    return (params.a_acceptor + r) ** 2 * epsilon + (params.a_donor + r) ** 2 * epsilon_prime


def j_ell_abs(ell, r, epsilon, epsilon_prime, params):
    """Positive root of C_bar exp(-|eps'-eps|/d) exp(-l(l+1)/K_AV^2)."""
    c = params.c_bar * math.exp(-abs(epsilon_prime - epsilon) / params.d)
    return np.sqrt(c * np.exp(-ell * (ell + 1) / k2_av(r, epsilon, epsilon_prime, params)))


def energy_transfer_formula(sigma_pr, sigma_pi_donor, omega, omega_donor, m_r3):
    """(3c^4/4pi) sigma_PR sigma_PI(omega_D) / (omega^3 omega_D) |<f|R^-3|i>|^2, atomic units."""
    return ET_PREFACTOR * sigma_pr * sigma_pi_donor / (omega**3 * omega_donor) * m_r3 * m_r3


def electron_transfer_formula(epsilon, epsilon_prime, partial_wave_sum):
    """32 pi (eps^3 eps')^(-1/2) sum_l (2l+1) |<f|S_AD J_l / R|i>|^2, atomic units."""
    return EL_PREFACTOR / np.sqrt(epsilon**3 * epsilon_prime) * partial_wave_sum


def _energies(channel, epsilon, nu_i, nu_f):
    eps_p = outgoing_energy(channel, epsilon, nu_i.energy_rel_asymptote, nu_f.energy_rel_asymptote)
    return eps_p, epsilon + channel.acceptor.ip


def sigma_energy_transfer(channel, epsilon, nu_i, nu_f):
    """Dipole-dipole (virtual photon) contribution for one vibronic transition."""
    if not channel.has(ENERGY_TRANSFER):
        return 0.0
    eps_p, omega = _energies(channel, epsilon, nu_i, nu_f)
    if eps_p <= 0 or epsilon <= 0:
        return 0.0
    omega_d = eps_p + channel.donor.ip  # omega - (E_f - E_i)
    m = weighted_matrix_element(nu_f, nu_i, lambda r: r**-3.0)
    pr = pr_cross_section(channel.acceptor, epsilon)
    pi = pi_cross_section(channel.donor, omega_d, per_orbital=True)
    return channel.weight * energy_transfer_formula(pr, pi, omega, omega_d, m)


def sigma_electron_transfer(channel, epsilon, nu_i, nu_f, params):
    """Orbital-overlap contribution; every partial wave is its own radial integral."""
    if not channel.has(ELECTRON_TRANSFER):
        return 0.0
    eps_p, _ = _energies(channel, epsilon, nu_i, nu_f)
    if eps_p <= 0 or epsilon <= 0:
        return 0.0
    total = 0.0
    for ell in range(params.ell_max + 1):
        m = weighted_matrix_element(
            nu_f, nu_i,
            lambda r, _l=ell: s_ad(r, params.a_acceptor, params.a_donor)
            * j_ell_abs(_l, r, epsilon, eps_p, params) / r)
        term = (2 * ell + 1) * m * m
        total += term
        if ell > 0 and term <= params.term_tol * total:
            break
    return channel.weight * float(electron_transfer_formula(epsilon, eps_p, total))


@dataclass
class SpectrumResult:
    """Outgoing-electron spectrum at fixed incoming energy (atomic units).

    ``sticks``: rows (epsilon', sigma) for bound finals.  ``continuum``: rows
    (epsilon', dsigma/dE) for box-dissociative finals, ascending in epsilon';
    ``continuum_weights`` holds 1/rho per row so that sum(dsigma/dE * weight)
    is the bound-dissociative total.
    """

    channel: str
    epsilon: float
    nu_i: int
    sticks: np.ndarray
    continuum: np.ndarray
    continuum_weights: np.ndarray
    sigma_total_bb: float
    sigma_total_bd: float
    pr_reference: float
    display_threshold: float
    stick_levels: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))

    @property
    def closed(self):
        return len(self.sticks) == 0 and len(self.continuum) == 0

    def trapezoid_bd(self):
        if len(self.continuum) < 2:
            return float(np.sum(self.continuum[:, 1] * self.continuum_weights))
        return float(trapezoid(self.continuum[:, 1], self.continuum[:, 0]))


@dataclass
class _Transitions:
    """Per (channel, initial level) radial data for every final state."""

    e_i: float
    e_f: np.ndarray
    is_box: np.ndarray
    dos: np.ndarray
    m3: np.ndarray
    base: np.ndarray
    r: np.ndarray
    n_finals: int


class IcecModel:
    """Cross sections for the (HeNe)+ channels on one radial grid.

    States are built lazily and cached; box-dissociative states are extended
    automatically when a larger kinetic energy release becomes reachable.
    """

    def __init__(self, surfaces=None, species=None, grid=None, alpha=1.6, c_bar=1.0, d=1.0,
                 ell_max=200, term_tol=1e-8, calibrated=False, weights=None):
        self.surfaces = surfaces or default_surfaces()
        self.species = species or load_species_registry()
        self.grid = grid or RadialGrid(10.0 * ANGSTROM)
        self.catalog = transition_catalog(self.surfaces, self.species, weights)
        self.alpha = alpha
        self._et = dict(c_bar=c_bar, d=d, ell_max=ell_max, term_tol=term_tol, calibrated=calibrated)
        self._bound = {}
        self._box = {}
        self._trans = {}

    def channel(self, name):
        return find_channel(self.catalog, name)

    def params(self, channel):
        return ElectronTransferParams(
            gaussian_width(channel.acceptor, self.alpha), gaussian_width(channel.donor, self.alpha), **self._et)

    # -- states ------------------------------------------------------------

    def bound_states(self, surface):
        if surface.label not in self._bound:
            self._bound[surface.label] = bound_states(surface, self.grid)
        return self._bound[surface.label]

    def initial_states(self, surface):
        """Bound levels usable as initial states (the box-unreliable top level dropped)."""
        return [s for s in self.bound_states(surface) if not s.box_unreliable]

    def initial_state(self, surface, n):
        states = self.bound_states(surface)
        if not 0 <= n < len(states):
            raise DomainError(f"surface {surface.label} has bound levels 0..{len(states) - 1}, got {n}")
        if states[n].box_unreliable:
            raise DomainError(
                f"level {n} is the highest bound level of {surface.label}; it is not confined by "
                "the box and is excluded as an initial state")
        return states[n]

    def box_states(self, surface, e_max):
        cached = self._box.get(surface.label)
        if cached is not None and cached[0] >= e_max:
            return cached[1]
        e_build = max(e_max, 1.25 * cached[0] if cached else 0.0, 0.05 * surface.d_e)
        states = dissociative_states(surface, self.grid, e_max=e_build)
        self._box[surface.label] = (e_build, states)
        return states

    def prepare(self, channel, epsilon_max):
        """Build every final state reachable up to ``epsilon_max``."""
        e_top = max(max_dissociation_energy(channel, epsilon_max, s.energy_rel_asymptote)
                    for s in self.initial_states(channel.initial))
        self.box_states(channel.final, e_top)

    # -- transition data ---------------------------------------------------

    def _transitions(self, channel, nu_i, e_max):
        box = self.box_states(channel.final, e_max)
        key = (channel.name, nu_i.index)
        cached = self._trans.get(key)
        finals = self.bound_states(channel.final) + box
        if cached is not None and cached.n_finals == len(finals) and cached.base.shape[0] == len(finals):
            return cached
        g = self.grid
        x, w = g.nodes, g.weights
        psi_i = nu_i.nodal
        phi = np.array([s.nodal for s in finals])
        m3 = phi @ (w * psi_i * x**-3.0)
        par = self.params(channel)
        kernel = psi_i * s_ad(x, par.a_acceptor, par.a_donor) / x
        support = np.abs(kernel) > SUPPORT_CUTOFF * np.abs(kernel).max()
        lo, hi = np.flatnonzero(support)[[0, -1]]
        sl = slice(lo, hi + 1)
        kernel = w[sl] * kernel[sl]
        data = _Transitions(
            e_i=nu_i.energy_rel_asymptote,
            e_f=np.array([s.energy_rel_asymptote for s in finals]),
            is_box=np.array([s.kind == BOX for s in finals]),
            dos=np.array([s.dos if s.dos is not None else 1.0 for s in finals]),
            m3=m3,
            base=np.ascontiguousarray(phi[:, sl] * kernel),
            r=np.ascontiguousarray(x[sl]),
            n_finals=len(finals),
        )
        self._trans[key] = data
        return data

    def state_resolved(self, channel, epsilon, nu_i):
        """Per-final-state cross sections at one incoming energy.

        Returns a dict of arrays over the final states (bound first, then box):
        ``eps_prime``, ``sigma_en``, ``sigma_el``, ``is_box``, ``dos``, ``open``.
        """
        if not epsilon > 0:
            raise DomainError("incoming electron energy must be positive")
        e_max = max_dissociation_energy(channel, epsilon, nu_i.energy_rel_asymptote)
        t = self._transitions(channel, nu_i, e_max)
        eps_p = epsilon + channel.delta_ip - (t.e_f - t.e_i)
        is_open = eps_p > 0
        sigma_en = np.zeros(t.n_finals)
        sigma_el = np.zeros(t.n_finals)
        rows = np.flatnonzero(is_open)
        if len(rows):
            if channel.has(ENERGY_TRANSFER):
                omega = epsilon + channel.acceptor.ip
                omega_d = eps_p[rows] + channel.donor.ip
                pr = pr_cross_section(channel.acceptor, epsilon)
                pi = pi_cross_sections(channel.donor, omega_d, per_orbital=True)
                sigma_en[rows] = energy_transfer_formula(pr, pi, omega, omega_d, t.m3[rows])
            if channel.has(ELECTRON_TRANSFER):
                par = self.params(channel)
                sums, _ = _partial_waves.partial_wave_sums(
                    t.base, t.r, rows, epsilon, eps_p, par.a_acceptor, par.a_donor, par.ell_max, par.term_tol)
                c = par.c_bar * np.exp(-np.abs(eps_p[rows] - epsilon) / par.d)
                sigma_el[rows] = electron_transfer_formula(epsilon, eps_p[rows], c * sums)
        sigma_en *= channel.weight
        sigma_el *= channel.weight
        return dict(eps_prime=eps_p, sigma_en=sigma_en, sigma_el=sigma_el, is_box=t.is_box,
                    dos=t.dos, open=is_open)

    # -- observables ---------------------------------------------------------

    def total_cross_section(self, channel, epsilon, nu_i, mechanisms=None):
        """(sigma_bb, sigma_bd) summed over open final states.

        Box states enter as a plain sum: the energy-normalized integrand
        sigma_j * rho_j integrated with spacing 1/rho_j.
        """
        if isinstance(nu_i, int):
            nu_i = self.initial_state(channel.initial, nu_i)
        elif nu_i.box_unreliable:
            self.initial_state(channel.initial, nu_i.index)
        r = self.state_resolved(channel, epsilon, nu_i)
        sigma = _select(r, mechanisms)
        return float(np.sum(sigma[~r["is_box"]])), float(np.sum(sigma[r["is_box"]]))

    def boltzmann_weights(self, surface, temperature):
        states = self.initial_states(surface)
        e = np.array([s.energy_rel_min for s in states])
        if temperature < 0:
            raise DomainError("temperature must be non-negative")
        if temperature == 0:
            w = np.zeros(len(states))
            w[0] = 1.0
            return states, w
        w = np.exp(-(e - e[0]) / (K_B * temperature))
        return states, w / w.sum()

    def thermal_cross_section(self, channel, epsilon, temperature, parts=False):
        """Boltzmann average of the total over confined initial levels."""
        states, w = self.boltzmann_weights(channel.initial, temperature)
        bb = bd = 0.0
        for s, wi in zip(states, w):
            if wi == 0.0:
                continue
            b1, b2 = self.total_cross_section(channel, epsilon, s)
            bb += wi * b1
            bd += wi * b2
        return (bb, bd) if parts else bb + bd

    def pr_reference(self, channel, epsilon):
        return pr_cross_section(channel.acceptor, epsilon)

    def spectrum(self, channel, epsilon, nu_i):
        if isinstance(nu_i, int):
            nu_i = self.initial_state(channel.initial, nu_i)
        r = self.state_resolved(channel, epsilon, nu_i)
        sigma = r["sigma_en"] + r["sigma_el"]
        opened, box = r["open"], r["is_box"]
        stick_idx = np.flatnonzero(opened & ~box)
        cont_idx = np.flatnonzero(opened & box)
        sticks = np.column_stack([r["eps_prime"][stick_idx], sigma[stick_idx]])
        cont = np.column_stack([r["eps_prime"][cont_idx], sigma[cont_idx] * r["dos"][cont_idx]])
        weights = 1.0 / r["dos"][cont_idx]
        order = np.argsort(cont[:, 0], kind="stable")
        cont, weights = cont[order], weights[order]
        pr = self.pr_reference(channel, epsilon)
        return SpectrumResult(
            channel=channel.name,
            epsilon=epsilon,
            nu_i=nu_i.index,
            sticks=sticks.reshape(-1, 2),
            continuum=cont.reshape(-1, 2),
            continuum_weights=weights,
            sigma_total_bb=float(np.sum(sigma[stick_idx])),
            sigma_total_bd=float(np.sum(sigma[cont_idx])),
            pr_reference=pr,
            display_threshold=DISPLAY_FRACTION * pr,
            stick_levels=stick_idx,
        )

    def reflection_principle_spectrum(self, channel, epsilon, nu_i, samples=4000):
        """Classical projection of |nu_i|^2 onto the repulsive wall of the final surface.

        Each R with V_final(R) above the dissociation limit maps to
        E_f = V_final(R) - D_e and then to epsilon'; the density
        |nu_i(R)|^2 [exp(-R^2/(2(a_A^2+a_D^2)))/R]^2 is carried over with the
        Jacobian 1/|dV/dR|.  Returns rows (epsilon', intensity) ascending in
        epsilon' over the open range, normalized to unit peak.
        """
        if not channel.has(ELECTRON_TRANSFER):
            raise DomainError(f"{channel.name}: reflection estimate uses the electron-transfer kernel")
        if isinstance(nu_i, int):
            nu_i = self.initial_state(channel.initial, nu_i)
        par = self.params(channel)
        fin = channel.final
        fine = np.linspace(self.grid.r_box / len(self.grid.points), self.grid.r_box, 20 * samples)
        e_f = morse_potential(fin, fine) - fin.d_e
        eps_p = outgoing_energy(channel, epsilon, nu_i.energy_rel_asymptote, e_f)
        dens = nu_i(fine) ** 2
        keep = (dens > 1e-8 * dens.max()) & (e_f > 0) & (eps_p > 0)
        if not keep.any():
            return np.zeros((0, 2))
        r = np.linspace(fine[keep][0], fine[keep][-1], samples)
        ex = np.exp(-fin.a * (r - fin.r_e))
        dv = 2.0 * fin.d_e * fin.a * (1.0 - ex) * ex
        if np.any(dv >= 0) and np.any(dv <= 0):
            raise DomainError(f"{fin.label} potential is not monotone over the reflected support of level {nu_i.index}")
        s2 = par.a_acceptor**2 + par.a_donor**2
        kernel = (np.exp(-r**2 / (2.0 * s2)) / r) ** 2
        intensity = nu_i(r) ** 2 * kernel / np.abs(dv)
        e_f = morse_potential(fin, r) - fin.d_e
        eps_p = outgoing_energy(channel, epsilon, nu_i.energy_rel_asymptote, e_f)
        ok = (eps_p > 0) & (e_f > 0)
        out = np.column_stack([eps_p[ok], intensity[ok]])
        out = out[np.argsort(out[:, 0], kind="stable")]
        if len(out) and out[:, 1].max() > 0:
            out[:, 1] /= out[:, 1].max()
        return out


def _select(r, mechanisms):
    if mechanisms is None:
        return r["sigma_en"] + r["sigma_el"]
    out = np.zeros_like(r["sigma_en"])
    if ENERGY_TRANSFER in mechanisms:
        out = out + r["sigma_en"]
    if ELECTRON_TRANSFER in mechanisms:
        out = out + r["sigma_el"]
    return out
