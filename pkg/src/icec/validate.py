"""Oracle suite behind ``icec validate``.

Every check returns a :class:`Check`; the suite never raises for a failed
comparison, only for configuration errors (raised before anything runs).
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .atomdata import pi_cross_section, pi_from_pr, pr_cross_section
from .constants import CM, EV
from .dvr import dvr_eigen
from .morse import bound_energy, bound_state_count, bound_states, dissociative_states, weighted_matrix_element

ORTHO_STATES = 200


@dataclass
class Check:
    name: str
    passed: bool
    measured: float
    tolerance: float
    detail: str = ""
    seconds: float = 0.0

    def line(self):
        flag = "PASS" if self.passed else "FAIL"
        extra = f"  ({self.detail})" if self.detail else ""
        return f"[{flag}] {self.name}: measured {self.measured:.3e}, tolerance {self.tolerance:.1e}{extra}"


def check_dvr(surfaces, r_box, n_points, tol_cm=0.1):
    """Analytic levels vs sine-DVR, every level except each surface's highest."""
    worst, where = 0.0, ""
    for label, s in sorted(surfaces.items()):
        count = bound_state_count(s)
        w, _, _ = dvr_eigen(s, r_box, n_points, n_states=count)
        for n in range(count - 1):
            dev = abs(w[n] - bound_energy(s, n)) / CM
            if dev > worst:
                worst, where = dev, f"{label} n={n}"
    return Check("DVR vs analytic bound energies", worst < tol_cm, worst, tol_cm, f"worst at {where}")


def check_orthonormality(surfaces, grid, n_states=ORTHO_STATES, tol=1e-6):
    """Gram matrix of confined bound states plus box states on each surface."""
    worst, where = 0.0, ""
    for label, s in sorted(surfaces.items()):
        bound = [b for b in bound_states(s, grid) if not b.box_unreliable]
        box = dissociative_states(s, grid, count=n_states - len(bound))
        phi = np.array([st.nodal for st in bound + box])
        gram = (phi * grid.weights) @ phi.T
        dev = float(np.abs(gram - np.eye(len(phi))).max())
        if dev > worst:
            worst, where = dev, f"surface {label}, {len(phi)} states"
    return Check("orthonormality (bound + box)", worst < tol, worst, tol, where)


def check_milne(species, tol=1e-12):
    worst = 0.0
    for sp in species.values():
        e = sp.pi_table.energy
        omegas = np.concatenate([e, np.sqrt(e[1:] * e[:-1])])
        for omega in omegas[omegas > sp.ip]:
            eps = omega - sp.ip
            back = pi_from_pr(sp, eps, pr_cross_section(sp, eps))
            ref = pi_cross_section(sp, omega)
            if ref > 0:
                worst = max(worst, abs(back / ref - 1.0))
    return Check("Milne roundtrip", worst < tol, worst, tol, ", ".join(sorted(species)))


def check_quadrature(model, tol=1e-6):
    """Matrix elements and one total cross section under doubled panel density."""
    from .engine import IcecModel

    surf = model.surfaces["X"]
    x0 = model.bound_states(surf)[0]
    m = weighted_matrix_element(x0, x0, lambda r: r**-3.0)
    fine = IcecModel(surfaces=model.surfaces, species=model.species, grid=model.grid.refined(),
                     alpha=model.alpha, **model._et)
    worst = 0.0
    for name, eps in (("B-X", 1.0), ("A-B", 5.0)):
        a = sum(model.total_cross_section(model.channel(name), eps * EV, 0))
        b = sum(fine.total_cross_section(fine.channel(name), eps * EV, 0))
        worst = max(worst, abs(b / a - 1.0))
    return Check("quadrature refinement", worst < tol and m > 0, worst, tol,
                 f"<X0|R^-3|X0> = {m:.6e} bohr^-3")


def check_box_edge(surfaces, grid, tol=1e-10):
    worst = 0.0
    for s in surfaces.values():
        for st in dissociative_states(s, grid, count=20):
            worst = max(worst, abs(st.amplitude[-1]) / np.abs(st.amplitude).max())
    return Check("box states vanish at R_box", worst < tol, worst, tol)


def run_suite(config):
    """Build everything from ``config`` first (configuration errors surface
    here), then run the checks."""
    model = config.build_model()
    surfaces, grid = model.surfaces, model.grid
    jobs = [
        lambda: check_dvr(surfaces, grid.r_box, config.dvr_points),
        lambda: check_orthonormality(surfaces, grid),
        lambda: check_milne(model.species),
        lambda: check_box_edge(surfaces, grid),
        lambda: check_quadrature(model),
    ]
    out = []
    for job in jobs:
        t0 = time.perf_counter()
        c = job()
        c.seconds = time.perf_counter() - t0
        out.append(c)
    return out
