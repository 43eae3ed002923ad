import numpy as np
from numba import njit


@njit(cache=True)
def partial_wave_sums(base, r, rows, eps, eps_p, a_acc, a_don, ell_max, term_tol):
    """sum_l (2l+1) [sum_n base[f, n] exp(-l(l+1) / (2 K_n^2))]^2 for f in ``rows``.

    K_n^2 = (a_acc + r_n)^2 eps + (a_don + r_n)^2 eps_p[f].  The square root of
    the partial-wave model for J_l^2 enters the radial integral, hence the 2 K^2.
    Returns (sums, highest l used) per requested row.
    """
    nr = r.shape[0]
    out = np.zeros(rows.shape[0])
    lmax_used = np.zeros(rows.shape[0], dtype=np.int64)
    q = np.empty(nr)
    step = np.empty(nr)
    g = np.empty(nr)
    for i in range(rows.shape[0]):
        f = rows[i]
        ep = eps_p[f]
        abs_sum = 0.0
        k2_max = 0.0
        for n in range(nr):
            k2 = (a_acc + r[n]) ** 2 * eps + (a_don + r[n]) ** 2 * ep
            if k2 > k2_max:
                k2_max = k2
            q[n] = np.exp(-1.0 / k2)  # exp(-2l / (2K^2)) per unit l
            step[n] = 1.0
            g[n] = 1.0
            abs_sum += abs(base[f, n])
        total = 0.0
        ell = 0
        while True:
            m = 0.0
            for n in range(nr):
                m += base[f, n] * g[n]
            total += (2 * ell + 1) * m * m
            if ell >= ell_max:
                break
            ell += 1
            # g_n(l) = exp(-l(l+1)/(2K^2)) = g_n(l-1) * exp(-l/K^2)
            env = 0.0
            for n in range(nr):
                step[n] *= q[n]
                g[n] *= step[n]
                if g[n] > env:
                    env = g[n]
            bound = (2 * ell + 1) * (env * abs_sum) ** 2
            if ell * ell > k2_max and bound <= term_tol * total:
                break
        out[i] = total
        lmax_used[i] = ell
    return out, lmax_used
