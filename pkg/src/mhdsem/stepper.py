"""Operator-split SSP-RK3 stepping.

Each stage is a split forward-Euler update: the restrictive filter (He,
positivity + entropy) is applied to the convex combination plus the flux
substep, the eight-wave source substep is then added and the relaxed
filter (Hp, positivity only) closes the stage.  Both substeps are
evaluated at the same stage state; entropy bounds for He come from that
stage-input solution.
"""

from dataclasses import dataclass, field

import numpy as np

from . import efilter, rhs
from .errors import UnrecoverableElementError

SSPRK3_WEIGHTS = (
    ((1.0,), 1.0),
    ((0.75, 0.25), 0.25),
    ((1.0 / 3.0, 2.0 / 3.0), 2.0 / 3.0),
)


@dataclass
class StepContext:
    re: object
    mesh: object
    ops: object
    g: object
    solver: object                 # riemann flux function
    eps: float = efilter.DEFAULT_EPS
    tol: float = efilter.DEFAULT_TOL
    max_iter: int = efilter.DEFAULT_MAX_ITER
    filters_enabled: bool = True
    entropy_relax: float = efilter.DEFAULT_ENTROPY_RELAX


@dataclass
class StageReport:
    he: efilter.SweepReport = field(default_factory=efilter.SweepReport)
    hp: efilter.SweepReport = field(default_factory=efilter.SweepReport)


def forward_euler_split_substep(u_stage, convex, dt_eff, ctx, step=None,
                                stage=None):
    """One split substep.

    u_stage: the stage state at which L1 and L2 are evaluated.
    convex: list of (weight, field) pairs combined before the flux update.
    Returns (new field, StageReport).
    """
    l1 = rhs.compute_L1(u_stage, ctx.re, ctx.mesh, ctx.solver, ctx.g)
    ustar = dt_eff * l1
    for wgt, fld in convex:
        ustar += wgt * fld
    rep = StageReport()
    if ctx.filters_enabled:
        sigma_min = efilter.entropy_bound(u_stage, ctx.re, ctx.mesh,
                                          ctx.g, eps=ctx.eps,
                                          relax=ctx.entropy_relax)
        try:
            ustar, rep.he = efilter.apply_He(
                ustar, sigma_min, ctx.ops, ctx.eps, ctx.g,
                tol=ctx.tol, max_iter=ctx.max_iter)
        except UnrecoverableElementError as exc:
            exc.step, exc.stage = step, stage
            raise
    divb = rhs.compute_global_divB(u_stage, ctx.re, ctx.mesh)
    ustar = ustar + dt_eff * rhs.compute_L2(u_stage, divb)
    if ctx.filters_enabled:
        try:
            ustar, rep.hp = efilter.apply_Hp(ustar, ctx.ops, ctx.eps,
                                             ctx.g, tol=ctx.tol,
                                             max_iter=ctx.max_iter)
        except UnrecoverableElementError as exc:
            exc.step, exc.stage = step, stage
            raise
    return ustar, rep


def ssprk3_step(u_n, dt, ctx, step=None):
    """Three-stage SSP-RK3 step with per-stage filtering; entropy bounds
    are recomputed from each stage's input solution."""
    reports = []
    u1, r1 = forward_euler_split_substep(
        u_n, [(1.0, u_n)], dt, ctx, step=step, stage=0)
    reports.append(r1)
    u2, r2 = forward_euler_split_substep(
        u1, [(0.75, u_n), (0.25, u1)], 0.25 * dt, ctx, step=step, stage=1)
    reports.append(r2)
    u3, r3 = forward_euler_split_substep(
        u2, [(1.0 / 3.0, u_n), (2.0 / 3.0, u2)], (2.0 / 3.0) * dt, ctx,
        step=step, stage=2)
    reports.append(r3)
    return u3, reports


def cfl_estimate(field_, re, mesh, g, dt):
    """Diagnostic CFL number max(|vn| + cf) * dt / h over nodes and axes."""
    from . import physics as ph
    cfl = 0.0
    for d in range(mesh.dim):
        cf = ph.fast_magnetosonic_speed(field_, np.eye(3)[d], g)
        vn = field_[..., ph.MOM][..., d] / field_[..., ph.RHO]
        cfl = max(cfl, float((np.abs(vn) + cf).max()) * dt / mesh.h[d])
    return cfl
