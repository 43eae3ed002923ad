import numpy as np
import pytest

from icec.quadrature import RadialGrid, composite_gauss_legendre, lagrange_matrix


def test_gauss_legendre_polynomials_exact():
    x, w = composite_gauss_legendre(0.0, 3.0, panels=4, order=10)
    for k in range(20):
        assert np.dot(w, x**k) == pytest.approx(3.0 ** (k + 1) / (k + 1), rel=1e-13)


def test_gauss_legendre_nodes_inside_interval():
    x, w = composite_gauss_legendre(1.0, 2.0, panels=7)
    assert x.min() > 1.0 and x.max() < 2.0 and np.all(w > 0)
    assert w.sum() == pytest.approx(1.0, rel=1e-14)


def test_lagrange_interpolation_exact_for_degree_seven():
    h = 0.01
    fine = h * np.arange(401)
    targets = np.array([0.0005, 0.1234, 2.0, 3.9991, 4.0])
    poly = np.polynomial.Polynomial([0.3, -1.0, 0.5, 2.0, -0.7, 0.1, 0.02, -0.004])
    interp = lagrange_matrix(fine, h, targets) @ poly(fine)
    assert np.allclose(interp, poly(targets), rtol=1e-10, atol=1e-12)


def test_grid_layout():
    g = RadialGrid(10.0, n_points=100, panels=20, oversample=4)
    assert g.points[0] == pytest.approx(0.1) and g.points[-1] == pytest.approx(10.0)
    assert g.n_fine == 400 and g.h_fine == pytest.approx(0.025)
    assert len(g.nodes) == 20 * 10
    assert g.integrate(np.ones_like(g.nodes)) == pytest.approx(10.0, rel=1e-14)
    assert g.refined().panels == 40
