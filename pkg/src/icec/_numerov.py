"""Numerov shooting on a uniform grid starting at R = 0 with psi(0) = 0.

The grid includes both end points; ``v`` holds the potential at every point.
Amplitudes are rescaled on the fly because the solution grows by many
hundreds of e-folds through the inner classically forbidden region.
"""

import numpy as np
from numba import njit

_BIG = 1e100


@njit(cache=True)
def shoot(v, e, two_mu, h):
    """Return (number of sign changes on points 1..M, psi(M)/||psi||)."""
    h12 = h * h / 12.0
    m = v.shape[0] - 1
    p_prev = 0.0
    p = 1e-30
    f_prev = two_mu * (v[0] - e)
    f = two_mu * (v[1] - e)
    norm = p * p
    nodes = 0
    for k in range(1, m):
        f_next = two_mu * (v[k + 1] - e)
        p_next = (2.0 * (1.0 + 5.0 * h12 * f) * p - (1.0 - h12 * f_prev) * p_prev) / (1.0 - h12 * f_next)
        if p_next * p < 0.0:
            nodes += 1
        norm += p_next * p_next
        if abs(p_next) > _BIG:
            p_next /= _BIG
            p /= _BIG
            norm /= _BIG * _BIG
        p_prev = p
        p = p_next
        f_prev = f
        f = f_next
    return nodes, p / np.sqrt(norm * h)


@njit(cache=True)
def wavefunction(v, e, two_mu, h):
    """Unnormalized solution on all grid points."""
    h12 = h * h / 12.0
    m = v.shape[0] - 1
    psi = np.zeros(m + 1)
    psi[1] = 1e-30
    for k in range(1, m):
        fp = two_mu * (v[k - 1] - e)
        f = two_mu * (v[k] - e)
        fn = two_mu * (v[k + 1] - e)
        psi[k + 1] = (2.0 * (1.0 + 5.0 * h12 * f) * psi[k] - (1.0 - h12 * fp) * psi[k - 1]) / (1.0 - h12 * fn)
        if abs(psi[k + 1]) > _BIG:
            for j in range(k + 2):
                psi[j] /= _BIG
    return psi


@njit(cache=True)
def count_below(v, e, two_mu, h):
    return shoot(v, e, two_mu, h)[0]


@njit(cache=True)
def eigenvalues(v, two_mu, h, first, last, e_lo, e_hi, tol):
    """Dirichlet eigenvalues with global indices first..last (inclusive).

    Sturm bisection on the node count isolates each level (every evaluation
    tightens the brackets of all targets); inside its bracket psi(R_box) has
    opposite signs at the ends and the root is finished by Illinois regula falsi.
    ``e_lo`` must lie below eigenvalue ``first`` and ``e_hi`` above ``last``.
    """
    n = last - first + 1
    lo = np.full(n, e_lo)
    hi = np.full(n, e_hi)
    out = np.empty(n)
    for t in range(n):
        # isolate: stop once the bracket is narrow relative to the level energy
        while hi[t] - lo[t] > max(1e-6 * hi[t], tol):
            mid = 0.5 * (lo[t] + hi[t])
            c = shoot(v, mid, two_mu, h)[0]
            for s in range(t, n):
                if first + s < c:
                    if mid < hi[s]:
                        hi[s] = mid
                elif mid > lo[s]:
                    lo[s] = mid
        a = lo[t]
        b = hi[t]
        fa = shoot(v, a, two_mu, h)[1]
        fb = shoot(v, b, two_mu, h)[1]
        side = 0
        x = 0.5 * (a + b)
        for _ in range(100):
            if b - a <= tol:
                break
            x = (a * fb - b * fa) / (fb - fa)
            if not (a < x < b):
                x = 0.5 * (a + b)
            fx = shoot(v, x, two_mu, h)[1]
            if fx == 0.0:
                a = b = x
                break
            if (fx > 0.0) == (fb > 0.0):
                b, fb = x, fx
                if side == 1:
                    fa *= 0.5
                side = 1
            else:
                a, fa = x, fx
                if side == -1:
                    fb *= 0.5
                side = -1
            if abs(fx) < 1e-14:
                break
        out[t] = x
    return out
