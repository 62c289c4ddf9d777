"""Adaptive positivity/entropy filtering.

The filter damps the modal content of an element with a second-order
exponential kernel whose single strength parameter is resolved so that
density, pressure and (optionally) a local minimum-entropy constraint
hold at every solution node.  The solve works on the substituted variable
f = exp(-strength) in [0, 1], so the filtered solution is
sum_k f^(k^2) u^(k) over the per-order components u^(k).

The per-element scalar solves are the hot path; they live in a compiled
extension (``_kernels``) with a pure-Python fallback selected here at
import time.
"""

from dataclasses import dataclass, field

import numpy as np

from . import physics as ph
from .element import element_mean
from .errors import UnrecoverableElementError
from .mesh import SIDES_1D, SIDES_2D, ghost_state

try:
    from . import _kernels as _K
    KERNEL_BACKEND = "compiled"
except ImportError:          # pragma: no cover - build-dependent
    from . import _kernels_py as _K
    KERNEL_BACKEND = "python"

from . import _kernels_py as _K_py

BIG_NEG = -1e300
DEFAULT_EPS = 1e-8
DEFAULT_TOL = 1e-8
DEFAULT_MAX_ITER = 20
DEFAULT_ENTROPY_RELAX = 1e-4


@dataclass(frozen=True)
class ConstraintSet:
    """Constraint tolerances; entropy constraint active iff sigma_min is
    not None."""

    eps: float = DEFAULT_EPS
    sigma_min: float = None

    @property
    def mode(self):
        return "positivity" if self.sigma_min is None \
            else "positivity_entropy"


@dataclass
class FilterWorkspace:
    """Per-order components u^(k) of one element, shape (p+1, n, 8)."""

    components: np.ndarray
    factor: float = 1.0


@dataclass
class FilterReport:
    limiting_factor: float = 0.0
    iterations: int = 0
    activated: bool = False
    converged: bool = True


@dataclass
class SweepReport:
    """Aggregate filter diagnostics over one whole-field application."""

    max_limiting_factor: float = 0.0
    activations: int = 0
    max_iterations: int = 0
    nonconverged: int = 0
    factors: dict = field(default_factory=dict)


def evaluate_constraints(u, c, g, sigma_min=None):
    """Minimum constraint margin, vectorized over leading axes.

    Returns min(rho-eps, P-eps[, sigma-sigma_min-eps]); NaN inputs map to
    a large negative value.  ``sigma_min`` overrides c.sigma_min and may
    be an array broadcasting against the leading axes.
    """
    u = np.asarray(u, dtype=float)
    if sigma_min is None:
        sigma_min = c.sigma_min
    rho = u[..., ph.RHO]
    safe = rho > 0.0
    rho_s = np.where(safe, rho, 1.0)
    ke = 0.5 * np.einsum("...i,...i->...", u[..., ph.MOM],
                         u[..., ph.MOM]) / rho_s
    me = 0.5 * np.einsum("...i,...i->...", u[..., ph.MAG], u[..., ph.MAG])
    # gamma comes from the gas model; strict positivity against eps only
    P = (g.gamma - 1.0) * (u[..., ph.ENE] - ke - me)
    m = rho - c.eps
    m = np.minimum(m, np.where(safe, P - c.eps, np.inf))
    if sigma_min is not None:
        sig = np.where(safe, P, 1.0) * rho_s ** (-g.gamma)
        m = np.minimum(m, np.where(safe, sig - sigma_min - c.eps, np.inf))
    return np.where(np.isnan(m), BIG_NEG, m)


def compute_sigma_min(field_, re, mesh, g):
    """Per-element entropy lower bound: minimum specific entropy over each
    element's own nodes and all nodes of its face neighbors (ghost trace
    states at domain boundaries)."""
    sig = ph.specific_entropy(field_, g)
    elem_min = sig.min(axis=1)
    out = elem_min.copy()
    sides = SIDES_1D if mesh.dim == 1 else SIDES_2D
    normals = np.eye(3)
    for fs in mesh.faces:
        interior = (fs.left >= 0) & (fs.right >= 0)
        li, ri = fs.left[interior], fs.right[interior]
        np.minimum.at(out, li, elem_min[ri])
        np.minimum.at(out, ri, elem_min[li])
        # boundary faces: ghost-state entropy at the face trace nodes
        for bmask, eids, f_nodes, sgn in (
                (fs.left < 0, fs.right, re.face_nodes[2 * fs.axis], -1.0),
                (fs.right < 0, fs.left, re.face_nodes[2 * fs.axis + 1], 1.0)):
            bmask = bmask & (eids >= 0)
            if not np.any(bmask):
                continue
            bc = mesh.bcs[sides[2 * fs.axis + (0 if sgn < 0 else 1)]]
            elems = eids[bmask]
            trace = field_[elems[:, None], f_nodes[None, :]]
            ghost = ghost_state(trace, bc, sgn * normals[fs.axis])
            gmin = ph.specific_entropy(ghost, g).min(axis=1)
            np.minimum.at(out, elems, gmin)
    return out


def entropy_bound(field_, re, mesh, g, eps=DEFAULT_EPS,
                  relax=DEFAULT_ENTROPY_RELAX):
    """Relaxed per-element entropy bound for the restrictive filter.

    The raw neighborhood minimum is lowered by a tolerance proportional
    to the element's own entropy spread (plus a 2*eps floor).  The
    margin sigma - sigma_min - eps is strictly negative for any state
    sitting exactly at the minimum -- e.g. every locally constant
    region -- and nodal values near smooth entropy minima dip below the
    stage-input nodal minimum by elementwise truncation error, which
    scales with the local solution variation.  Without the relaxation
    those truncation-level dips trigger heavy filtering on smooth flow;
    genuine entropy violations at discontinuities scale with the spread
    itself and still activate the filter.
    """
    sig = ph.specific_entropy(field_, g)
    spread = sig.max(axis=1) - sig.min(axis=1)
    tol = np.maximum(2.0 * eps, relax * spread)
    return compute_sigma_min(field_, re, mesh, g) - tol


def decompose_modes(nodal, ops):
    """Split one element's nodal field into per-order components."""
    comps = np.einsum("knm,mf->knf", ops.projectors, np.asarray(nodal,
                                                                dtype=float))
    return FilterWorkspace(components=np.ascontiguousarray(comps))


def filtered_eval(ws, f, node=None):
    """Evaluate the filtered field at factor f (0**0 := 1), optionally at
    a single node."""
    nord = ws.components.shape[0]
    coef = np.array([f ** (k * k) for k in range(nord)])
    comps = ws.components if node is None else ws.components[:, node]
    return np.tensordot(coef, comps, axes=(0, 0))


def solve_filter_factor(ws, c, g, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER):
    """Running-minimum per-node filter factor for one element.

    The element mean must satisfy the constraints; otherwise an
    UnrecoverableElementError is raised.
    """
    mean = ws.components[0, 0]
    mmean = evaluate_constraints(mean, c, g)
    if not mmean > 0.0:
        raise UnrecoverableElementError(
            "element mean violates filter constraints",
            mean_state=mean.copy(), margins=float(mmean))
    use_entropy = c.sigma_min is not None
    smin = c.sigma_min if use_entropy else 0.0
    f, it, solved, conv = _K.sweep_solve(ws.components, g.gamma, c.eps,
                                         smin, use_entropy, tol, max_iter)
    ws.factor = f
    return f, FilterReport(limiting_factor=1.0 - f, iterations=it,
                           activated=solved > 0, converged=conv)


def naive_filter_solve(nodal, V, Vinv, mode_order, c, g, tol=DEFAULT_TOL,
                       max_iter=DEFAULT_MAX_ITER):
    """Baseline solve that rebuilds V diag(f^(p_i^2)) V^-1 u each
    iteration.  Same contract as solve_filter_factor."""
    nodal = np.ascontiguousarray(nodal, dtype=float)
    modal = Vinv @ nodal
    mean = (V[:1, :] * (mode_order == 0)) @ modal
    mmean = evaluate_constraints(mean[0], c, g)
    if not mmean > 0.0:
        raise UnrecoverableElementError(
            "element mean violates filter constraints",
            mean_state=mean[0].copy(), margins=float(mmean))
    use_entropy = c.sigma_min is not None
    smin = c.sigma_min if use_entropy else 0.0
    f, it, conv = _K.naive_solve(nodal, np.ascontiguousarray(V),
                                 np.ascontiguousarray(Vinv),
                                 np.ascontiguousarray(mode_order),
                                 g.gamma, c.eps, smin, use_entropy, tol,
                                 max_iter)
    return f, FilterReport(limiting_factor=1.0 - f, iterations=it,
                           activated=it > 0, converged=conv)


def _apply(field_, ops, g, sigma_min, eps, tol, max_iter):
    """Shared driver for apply_He / apply_Hp."""
    cset = ConstraintSet(eps=eps)
    margins = evaluate_constraints(field_, cset, g, sigma_min=(
        None if sigma_min is None else np.asarray(sigma_min)[:, None]))
    bad = np.flatnonzero(margins.min(axis=1) <= 0.0)
    report = SweepReport()
    if bad.size == 0:
        return field_, report
    out = field_.copy()
    for e in bad:
        smin = None if sigma_min is None else float(np.asarray(sigma_min)[e])
        ws = decompose_modes(field_[e], ops)
        try:
            f, rep = solve_filter_factor(
                ws, ConstraintSet(eps=eps, sigma_min=smin), g,
                tol=tol, max_iter=max_iter)
        except UnrecoverableElementError as exc:
            exc.element = int(e)
            raise
        out[e] = filtered_eval(ws, f)
        report.activations += 1
        report.max_limiting_factor = max(report.max_limiting_factor,
                                         1.0 - f)
        report.max_iterations = max(report.max_iterations, rep.iterations)
        report.nonconverged += 0 if rep.converged else 1
        report.factors[int(e)] = f
    return out, report


def apply_He(field_, sigma_min, ops, eps, g, tol=DEFAULT_TOL,
             max_iter=DEFAULT_MAX_ITER):
    """Restrictive filter: positivity plus local minimum entropy, with
    per-element entropy bounds from the stage-input solution.

    ``sigma_min`` is used as given; pass the output of
    :func:`entropy_bound` to apply the spread-relative relaxation that
    keeps uniform regions and truncation-level entropy dips feasible.
    """
    return _apply(field_, ops, g, np.asarray(sigma_min), eps, tol,
                  max_iter)


def apply_Hp(field_, ops, eps, g, tol=DEFAULT_TOL,
             max_iter=DEFAULT_MAX_ITER):
    """Relaxed filter: positivity constraints only."""
    return _apply(field_, ops, g, None, eps, tol, max_iter)
