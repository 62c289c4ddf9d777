# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled filter-factor solvers (hot path of the adaptive filter).

Mirrors the algorithms in ``_kernels_py.py``; see that module for the
contract.  Selected automatically at import by ``mhdsem.efilter``.
"""

from libc.math cimport pow, isnan

import numpy as np

DEF BIG_NEG = -1e300


cdef inline double c_margin(double rho, double mx, double my, double mz,
                            double bx, double by, double bz, double E,
                            double gamma, double eps, double sigma_min,
                            bint use_entropy) noexcept nogil:
    cdef double m, ke, me, P, sig
    if isnan(rho) or isnan(E):
        return BIG_NEG
    m = rho - eps
    if rho <= 0.0:
        return m
    ke = 0.5 * (mx * mx + my * my + mz * mz) / rho
    me = 0.5 * (bx * bx + by * by + bz * bz)
    P = (gamma - 1.0) * (E - ke - me)
    if isnan(P):
        return BIG_NEG
    if P - eps < m:
        m = P - eps
    if use_entropy:
        sig = P * pow(rho, -gamma)
        if isnan(sig):
            return BIG_NEG
        if sig - sigma_min - eps < m:
            m = sig - sigma_min - eps
    return m


cdef inline double fpow_sq(double f, int k) noexcept nogil:
    # f ** (k*k) with 0**0 == 1
    cdef double r = 1.0
    cdef int i
    for i in range(k * k):
        r *= f
    return r


cdef double node_margin(const double[:, :, ::1] comps, Py_ssize_t j,
                        double f, int nord, double gamma, double eps,
                        double sigma_min, bint use_entropy) noexcept nogil:
    cdef double s[8]
    cdef double ck
    cdef int k, c
    for c in range(8):
        s[c] = 0.0
    for k in range(nord):
        ck = fpow_sq(f, k)
        for c in range(8):
            s[c] += ck * comps[k, j, c]
    return c_margin(s[0], s[1], s[2], s[3], s[4], s[5], s[6], s[7],
                    gamma, eps, sigma_min, use_entropy)


def sweep_solve(const double[:, :, ::1] comps, double gamma, double eps,
                double sigma_min, bint use_entropy, double tol,
                int max_iter):
    """Sequential per-node Illinois solve; see _kernels_py.sweep_solve."""
    cdef int nord = comps.shape[0]
    cdef Py_ssize_t n = comps.shape[1]
    cdef Py_ssize_t j
    cdef double f = 1.0
    cdef int max_it = 0, solved = 0, it, side, passes = 0
    cdef bint converged = True, dirty = True
    cdef double a, b, ga, gb, gc, cc, denom

    # The node margins are not monotone in f, so a node that was
    # feasible when it was visited can be violated at the smaller final
    # f; repeat the sweep until a full pass leaves every node feasible
    # (the second pass is a pure verification pass in the common case).
    with nogil:
        while dirty and passes < 25:
            dirty = False
            passes += 1
            for j in range(n):
                gb = node_margin(comps, j, f, nord, gamma, eps, sigma_min,
                                 use_entropy)
                if gb > 0.0:
                    continue
                dirty = True
                ga = c_margin(comps[0, j, 0], comps[0, j, 1], comps[0, j, 2],
                              comps[0, j, 3], comps[0, j, 4], comps[0, j, 5],
                              comps[0, j, 6], comps[0, j, 7],
                              gamma, eps, sigma_min, use_entropy)
                a = 0.0
                b = f
                side = 0
                it = 0
                while (b - a) > tol and it < max_iter:
                    denom = ga - gb
                    if denom > 0.0:
                        cc = (a * (-gb) + b * ga) / denom
                        if not (a < cc < b):
                            cc = 0.5 * (a + b)
                    else:
                        cc = 0.5 * (a + b)
                    gc = node_margin(comps, j, cc, nord, gamma, eps,
                                     sigma_min, use_entropy)
                    it += 1
                    if gc > 0.0:
                        a = cc
                        ga = gc
                        if side == 1:
                            gb *= 0.5
                        side = 1
                    else:
                        b = cc
                        gb = gc
                        if side == -1:
                            ga *= 0.5
                        side = -1
                if (b - a) > tol:
                    converged = False
                f = a
                solved += 1
                if it > max_it:
                    max_it = it
        if dirty:
            # last resort: the mean, feasible by precondition
            f = 0.0
    return f, max_it, solved, bool(converged)


cdef double filtered_margin_all(const double[:, ::1] u,
                                const double[:, ::1] V,
                                const double[:, ::1] Vinv,
                                const long[::1] ords,
                                double[:, ::1] modal, double[:, ::1] ut,
                                double f, double gamma, double eps,
                                double sigma_min,
                                bint use_entropy) noexcept nogil:
    cdef Py_ssize_t n = u.shape[0]
    cdef Py_ssize_t i, j, c
    cdef double acc, ck, m, gmin
    # modal = Vinv @ u, scaled by the filter coefficients
    for i in range(n):
        ck = fpow_sq(f, <int>ords[i])
        for c in range(8):
            acc = 0.0
            for j in range(n):
                acc += Vinv[i, j] * u[j, c]
            modal[i, c] = ck * acc
    # ut = V @ modal
    gmin = 1e308
    for i in range(n):
        for c in range(8):
            acc = 0.0
            for j in range(n):
                acc += V[i, j] * modal[j, c]
            ut[i, c] = acc
        m = c_margin(ut[i, 0], ut[i, 1], ut[i, 2], ut[i, 3], ut[i, 4],
                     ut[i, 5], ut[i, 6], ut[i, 7], gamma, eps, sigma_min,
                     use_entropy)
        if m < gmin:
            gmin = m
    return gmin


def naive_solve(const double[:, ::1] u, const double[:, ::1] V,
                const double[:, ::1] Vinv, const long[::1] ords,
                double gamma, double eps, double sigma_min,
                bint use_entropy, double tol, int max_iter):
    """Whole-element Illinois solve; see _kernels_py.naive_solve."""
    cdef Py_ssize_t n = u.shape[0]
    scratch1 = np.empty((n, 8))
    scratch2 = np.empty((n, 8))
    cdef double[:, ::1] modal = scratch1
    cdef double[:, ::1] ut = scratch2
    cdef double a, b, ga, gb, gc, cc, denom
    cdef int it = 0, side = 0
    cdef bint conv

    with nogil:
        gb = filtered_margin_all(u, V, Vinv, ords, modal, ut, 1.0, gamma,
                                 eps, sigma_min, use_entropy)
    if gb > 0.0:
        return 1.0, 0, True
    with nogil:
        ga = filtered_margin_all(u, V, Vinv, ords, modal, ut, 0.0, gamma,
                                 eps, sigma_min, use_entropy)
        a = 0.0
        b = 1.0
        while (b - a) > tol and it < max_iter:
            denom = ga - gb
            if denom > 0.0:
                cc = (a * (-gb) + b * ga) / denom
                if not (a < cc < b):
                    cc = 0.5 * (a + b)
            else:
                cc = 0.5 * (a + b)
            gc = filtered_margin_all(u, V, Vinv, ords, modal, ut, cc,
                                     gamma, eps, sigma_min, use_entropy)
            it += 1
            if gc > 0.0:
                a = cc
                ga = gc
                if side == 1:
                    gb *= 0.5
                side = 1
            else:
                b = cc
                gb = gc
                if side == -1:
                    ga *= 0.5
                side = -1
        conv = (b - a) <= tol
    return a, it, bool(conv)
