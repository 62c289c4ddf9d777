"""Filter-solve micro-benchmark.

Times the optimized sequential node sweep against the naive baseline
(which rebuilds the full filtered field every root-finding iteration)
on a synthetic population of elements whose means are admissible but
whose nodal values violate positivity at a controlled rate.  Both the
compiled and pure-Python kernel backends can be measured.
"""

import time

import numpy as np

from . import efilter, physics as ph
from .efilter import _K, _K_py, KERNEL_BACKEND
from .element import build_mode_groups, build_reference_element

BASE_PRIM = np.array([1.0, 0.1, -0.2, 0.05, 1.0, 0.5, 0.0, 1.0])


def make_bench_field(re, n_elements, violation_rate, g, seed=0,
                     amplitude=2.5):
    """Synthetic nodal field: smooth base state plus zero-mean nodal
    noise, scaled so roughly violation_rate of elements go inadmissible
    at some node while every element mean stays admissible."""
    rng = np.random.default_rng(seed)
    base = ph.prim_to_cons(BASE_PRIM, g)
    u = np.tile(base, (n_elements, re.n, 1))
    noise = rng.standard_normal((n_elements, re.n, 8))
    # remove the element mean so the mean state is untouched
    w = re.w / re.w.sum()
    noise -= np.einsum("enf,n->ef", noise, w)[:, None, :]
    amp = np.where(rng.random(n_elements) < violation_rate,
                   amplitude, 0.02)
    u += amp[:, None, None] * 0.3 * noise
    return u


def _violating(u, c, g):
    m = efilter.evaluate_constraints(u, c, g)
    return np.where(m.min(axis=1) <= 0.0)[0]


def _time_optimized(u, idx, ops, c, g, kern):
    t0 = time.perf_counter()
    factors = np.empty(len(idx))
    for j, e in enumerate(idx):
        ws = efilter.decompose_modes(u[e], ops)
        f, _, _, _ = kern.sweep_solve(ws.components, g.gamma, c.eps,
                                      0.0, False, efilter.DEFAULT_TOL,
                                      efilter.DEFAULT_MAX_ITER)
        factors[j] = f
    return time.perf_counter() - t0, factors


def _time_naive(u, idx, re, ords, c, g, kern):
    V = np.ascontiguousarray(re.V)
    Vinv = np.ascontiguousarray(re.Vinv)
    t0 = time.perf_counter()
    factors = np.empty(len(idx))
    for j, e in enumerate(idx):
        f, _, _ = kern.naive_solve(np.ascontiguousarray(u[e]), V, Vinv,
                                   ords, g.gamma, c.eps, 0.0, False,
                                   efilter.DEFAULT_TOL,
                                   efilter.DEFAULT_MAX_ITER)
        factors[j] = f
    return time.perf_counter() - t0, factors


def run_bench(p=3, n_elements=10000, violation_rate=0.2, seed=0,
              repeats=3, compare_backends=False):
    """Time optimized vs naive filter solves; returns a result dict.

    The reported times are the best of `repeats` passes over the same
    violating-element population; 'ratio' is optimized/naive.  Filtered
    states from both paths are verified admissible and their factors
    compared.
    """
    re = build_reference_element(p, 2)
    ops = build_mode_groups(re)
    g = ph.GasModel(5.0 / 3.0)
    c = efilter.ConstraintSet()
    u = make_bench_field(re, n_elements, violation_rate, g, seed=seed)
    idx = _violating(u, c, g)
    ords = np.ascontiguousarray(re.mode_order)

    kernels = {KERNEL_BACKEND: _K}
    if compare_backends and _K is not _K_py:
        kernels["python"] = _K_py

    result = {"p": p, "n_elements": n_elements,
              "violating": len(idx), "backend": KERNEL_BACKEND,
              "timings": {}}
    for name, kern in kernels.items():
        t_opt = min(_time_optimized(u, idx, ops, c, g, kern)[0]
                    for _ in range(repeats))
        t_nai = min(_time_naive(u, idx, re, ords, c, g, kern)[0]
                    for _ in range(repeats))
        result["timings"][name] = {
            "optimized_s": t_opt, "naive_s": t_nai,
            "ratio": t_opt / t_nai if t_nai > 0 else float("nan")}

    # agreement + feasibility check on a subsample
    _, f_opt = _time_optimized(u, idx[:50], ops, c, g, _K)
    _, f_nai = _time_naive(u, idx[:50], re, ords, c, g, _K)
    result["max_factor_diff"] = float(np.abs(f_opt - f_nai).max()) \
        if len(idx) else 0.0
    bad = 0
    for j, e in enumerate(idx[:50]):
        ws = efilter.decompose_modes(u[e], ops)
        for f in (f_opt[j], f_nai[j]):
            m = efilter.evaluate_constraints(
                efilter.filtered_eval(ws, f), c, g)
            if not (m > -1e-12).all():
                bad += 1
    result["infeasible_filtered"] = bad
    return result


def format_bench(result):
    lines = [f"filter benchmark: p={result['p']} "
             f"elements={result['n_elements']} "
             f"violating={result['violating']} "
             f"backend={result['backend']}"]
    for name, t in result["timings"].items():
        lines.append(f"  [{name}] optimized {t['optimized_s']:.4f}s  "
                     f"naive {t['naive_s']:.4f}s  "
                     f"ratio {t['ratio']:.3f}")
    lines.append(f"  max factor difference {result['max_factor_diff']:.2e}"
                 f"  infeasible filtered states "
                 f"{result['infeasible_filtered']}")
    return "\n".join(lines)
