"""Composite Gauss-Legendre quadrature on the radial box (0, R_box]."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import sparse

GL_ORDER = 10


def composite_gauss_legendre(a, b, panels, order=GL_ORDER):
    """Nodes and weights of an equal-panel composite Gauss-Legendre rule on [a, b]."""
    if panels < 1:
        raise ValueError("panels must be >= 1")
    x, w = leggauss(order)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def lagrange_matrix(x_fine, h, targets, stencil=8):
    """Sparse matrix interpolating samples on the uniform grid ``x_fine = k*h``
    (k = 0..M) onto ``targets`` with local Lagrange polynomials."""
    m = len(x_fine) - 1
    half = stencil // 2
    left = np.floor(targets / h).astype(int) - (half - 1)
    left = np.clip(left, 0, m + 1 - stencil)
    idx = left[:, None] + np.arange(stencil)[None, :]
    u = targets / h - left
    coef = np.ones((len(targets), stencil))
    for j in range(stencil):
        for k in range(stencil):
            if k != j:
                coef[:, j] *= (u - k) / (j - k)
    rows = np.repeat(np.arange(len(targets)), stencil)
    return sparse.csr_matrix((coef.ravel(), (rows, idx.ravel())), shape=(len(targets), m + 1))


@dataclass(frozen=True)
class RadialGrid:
    """Radial discretization shared by all states of a calculation.

    ``points`` is the uniform sampling grid R_k = k*R_box/n_points (k = 1..n_points)
    on which amplitudes are reported.  Matrix elements use the composite
    Gauss-Legendre ``nodes``/``weights``; box states are integrated on a uniform
    grid ``oversample`` times finer and interpolated onto the nodes.
    """

    r_box: float
    n_points: int = 3000
    panels: int = 600
    order: int = GL_ORDER
    oversample: int = 8

    def __post_init__(self):
        if self.r_box <= 0:
            raise ValueError("r_box must be positive")
        if self.n_points < 10 or self.panels < 1 or self.oversample < 1:
            raise ValueError("grid sizes must be positive (n_points >= 10)")

    @cached_property
    def points(self):
        return self.r_box * np.arange(1, self.n_points + 1) / self.n_points

    @cached_property
    def quadrature(self):
        return composite_gauss_legendre(0.0, self.r_box, self.panels, self.order)

    @property
    def nodes(self):
        return self.quadrature[0]

    @property
    def weights(self):
        return self.quadrature[1]

    @property
    def n_fine(self):
        return self.n_points * self.oversample

    @property
    def h_fine(self):
        return self.r_box / self.n_fine

    @cached_property
    def fine(self):
        """Uniform integration grid including R = 0."""
        return self.h_fine * np.arange(self.n_fine + 1)

    @cached_property
    def to_nodes(self):
        return lagrange_matrix(self.fine, self.h_fine, self.nodes)

    def refined(self, factor=2):
        """Same box and sampling, ``factor`` times as many quadrature panels."""
        return RadialGrid(self.r_box, self.n_points, self.panels * factor, self.order, self.oversample)

    def integrate(self, values):
        return float(np.dot(self.weights, values))
