"""Pure-Python filter-factor solvers.

These are the fallback twins of the compiled kernels in ``_kernels.pyx``;
both implement the identical algorithms:

* ``sweep_solve``: per-node sequential Illinois bracketing on the
  precomputed per-order components, carrying the running-minimum factor
  as the upper bracket for later nodes.
* ``naive_solve``: element-wise Illinois bracketing that rebuilds the
  full filtered solution V diag(f^(p_i^2)) V^-1 u every iteration (the
  baseline the micro-benchmark compares against).

Both return a feasible factor: on convergence or iteration exhaustion the
lower (feasible) bracket end is taken.
"""

import math

BIG_NEG = -1e300


def margin(rho, mx, my, mz, bx, by, bz, E, gamma, eps, sigma_min,
           use_entropy):
    """Minimum constraint margin of one state; NaN counts as -inf-like."""
    if not (rho == rho and E == E):   # NaN guard
        return BIG_NEG
    m = rho - eps
    if rho <= 0.0:
        return m if m == m else BIG_NEG
    ke = 0.5 * (mx * mx + my * my + mz * mz) / rho
    me = 0.5 * (bx * bx + by * by + bz * bz)
    P = (gamma - 1.0) * (E - ke - me)
    if not P == P:
        return BIG_NEG
    if P - eps < m:
        m = P - eps
    if use_entropy:
        sig = P * rho ** (-gamma)
        if not sig == sig:
            return BIG_NEG
        if sig - sigma_min - eps < m:
            m = sig - sigma_min - eps
    return m


def _node_margin(comps, j, f, nord, gamma, eps, sigma_min, use_entropy):
    s = [0.0] * 8
    for k in range(nord):
        ck = f ** (k * k)
        row = comps[k, j]
        for c in range(8):
            s[c] += ck * row[c]
    return margin(s[0], s[1], s[2], s[3], s[4], s[5], s[6], s[7],
                  gamma, eps, sigma_min, use_entropy)


def illinois(g, a, ga, b, gb, tol, max_iter):
    """Illinois root bracketing with g(a) > 0 >= g(b); returns the
    feasible end a and the iteration count."""
    side = 0
    it = 0
    while (b - a) > tol and it < max_iter:
        denom = ga - gb
        if denom > 0.0:
            c = (a * (-gb) + b * ga) / denom
            if not (a < c < b):
                c = 0.5 * (a + b)
        else:
            c = 0.5 * (a + b)
        gc = g(c)
        it += 1
        if gc > 0.0:
            a, ga = c, gc
            if side == 1:
                gb *= 0.5
            side = 1
        else:
            b, gb = c, gc
            if side == -1:
                ga *= 0.5
            side = -1
    return a, it, (b - a) <= tol


def sweep_solve(comps, gamma, eps, sigma_min, use_entropy, tol, max_iter):
    """Sequential per-node solve on per-order components.

    comps: (p+1, n, 8) array with comps[k] the order-k component field.
    Returns (f, max node iterations, number of nodes solved, converged).
    """
    nord, n, _ = comps.shape
    f = 1.0
    max_it = 0
    solved = 0
    converged = True
    for j in range(n):
        gb = _node_margin(comps, j, f, nord, gamma, eps, sigma_min,
                          use_entropy)
        if gb > 0.0:
            continue
        m = comps[0, j]
        ga = margin(m[0], m[1], m[2], m[3], m[4], m[5], m[6], m[7],
                    gamma, eps, sigma_min, use_entropy)

        def g(x, _j=j):
            return _node_margin(comps, _j, x, nord, gamma, eps, sigma_min,
                                use_entropy)

        a, it, conv = illinois(g, 0.0, ga, f, gb, tol, max_iter)
        converged &= conv
        f = a
        solved += 1
        if it > max_it:
            max_it = it
    return f, max_it, solved, converged


def _filtered_margin_all(u, V, Vinv, ords, f, gamma, eps, sigma_min,
                         use_entropy):
    n = u.shape[0]
    # modal = Vinv @ u, scaled, back-transformed; rebuilt in full each call
    modal = Vinv @ u
    for i in range(n):
        modal[i] *= f ** (ords[i] * ords[i])
    ut = V @ modal
    gmin = math.inf
    for j in range(n):
        s = ut[j]
        m = margin(s[0], s[1], s[2], s[3], s[4], s[5], s[6], s[7],
                   gamma, eps, sigma_min, use_entropy)
        if m < gmin:
            gmin = m
    return gmin


def naive_solve(u, V, Vinv, ords, gamma, eps, sigma_min, use_entropy, tol,
                max_iter):
    """Element-wise Illinois solve rebuilding the matrix-vector filtered
    solution every iteration.  Returns (f, iterations, converged)."""
    gb = _filtered_margin_all(u, V, Vinv, ords, 1.0, gamma, eps, sigma_min,
                              use_entropy)
    if gb > 0.0:
        return 1.0, 0, True
    ga = _filtered_margin_all(u, V, Vinv, ords, 0.0, gamma, eps, sigma_min,
                              use_entropy)

    def g(x):
        return _filtered_margin_all(u, V, Vinv, ords, x, gamma, eps,
                                    sigma_min, use_entropy)

    a, it, conv = illinois(g, 0.0, ga, 1.0, gb, tol, max_iter)
    return a, it, conv
