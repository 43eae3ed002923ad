"""Sine discrete variable representation on (0, R_box] (Colbert-Miller, Dirichlet ends).

Used as an independent check of the Morse solvers; nothing in the cross-section
path depends on it.
"""

import numpy as np
from scipy.linalg import eigh, hankel, toeplitz
from scipy.sparse.linalg import eigsh

from .morse import morse_potential


def sine_dvr_hamiltonian(potential, mu, r_box, n):
    """Grid x_i = i*R_box/(n+1), i = 1..n, and the Hamiltonian matrix."""
    m = n + 1
    x = r_box * np.arange(1, m) / m
    c = np.pi**2 / (4.0 * mu * r_box**2)
    k = np.arange(1, 2 * m)
    inv = 1.0 / np.sin(np.pi * k / (2 * m)) ** 2
    sign = (-1.0) ** k
    # T_ij = c (-1)^(i-j) [1/sin^2(pi(i-j)/2m) - 1/sin^2(pi(i+j)/2m)], i != j
    diff = np.concatenate(([0.0], sign[: n - 1] * inv[: n - 1]))
    summ = sign[1 : 2 * n] * inv[1 : 2 * n]  # index i+j-2 -> k = i+j
    t = toeplitz(diff) - hankel(summ[:n], summ[n - 1 :])
    t *= c
    np.fill_diagonal(t, c * ((2 * m**2 + 1) / 3.0 - 1.0 / np.sin(np.pi * np.arange(1, m) / m) ** 2))
    h = t + np.diag(potential(x))
    return x, h


def dvr_oracle(surface, r_box, n=3000, n_states=None):
    """Lowest eigenpairs of the sine-DVR Hamiltonian of a Morse surface.

    Returns (energies above the well minimum, grid, wavefunctions) with
    wavefunctions as columns normalized to unit integral on the grid.
    ``n_states=None`` solves the full spectrum.
    """
    if n < 500:
        raise ValueError("DVR oracle needs at least 500 points")
    return dvr_eigen(surface, r_box, n, n_states)


def dvr_eigen(surface, r_box, n, n_states=None):
    """``dvr_oracle`` without the resolution guard (used to demonstrate under-resolution)."""
    x, h = sine_dvr_hamiltonian(lambda r: morse_potential(surface, r), surface.mu, r_box, n)
    if n_states is None or n_states > n // 4:
        w, v = eigh(h, subset_by_index=None if n_states is None else (0, n_states - 1))
    else:
        # shift-invert around the well bottom; all eigenvalues are positive
        w, v = eigsh(h, k=n_states, sigma=-surface.omega_e, which="LM")
        order = np.argsort(w)
        w, v = w[order], v[:, order]
    dx = x[1] - x[0]
    return w, x, v / np.sqrt(dx)
