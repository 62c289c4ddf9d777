"""Run loop, error norms, convergence studies, and the finite-volume
reference mode.

run() advances a CaseConfig to its final time with SSP-RK3, collecting
per-step filter diagnostics and periodic admissibility/conservation
rows.  If an element mean ever leaves the admissible set the last good
solution is flushed to disk before the error propagates.
"""

import logging
import math
import os
from dataclasses import dataclass, field

import numpy as np

from . import cases, efilter, output, physics as ph, rhs
from .element import build_mode_groups, build_reference_element, element_mean
from .errors import ConfigError, UnrecoverableElementError
from .mesh import BoundarySpec, build_mesh
from .riemann import get_solver
from .stepper import StepContext, ssprk3_step

log = logging.getLogger(__name__)

STEP_COLUMNS = ["step", "time", "max_limiting", "he_activations",
                "hp_activations", "max_iterations"]
INTERVAL_COLUMNS = STEP_COLUMNS + ["min_rho", "min_pressure",
                                   "min_entropy_margin", "divb_l1",
                                   "total_mass"]


@dataclass
class RunResult:
    snapshot: output.Snapshot
    steps: int
    step_rows: list = field(default_factory=list)
    interval_rows: list = field(default_factory=list)


def setup(config):
    """Build the discrete machinery and initial state for a case."""
    re = build_reference_element(config.p, len(config.dims))
    mesh = build_mesh(config.dims, config.extent, config.bcs)
    ops = build_mode_groups(re)
    g = config.gas()
    coords = mesh.node_coords(re)
    u0 = ph.prim_to_cons(config.ic(coords), g)
    ctx = StepContext(re=re, mesh=mesh, ops=ops, g=g,
                      solver=get_solver(config.riemann),
                      eps=config.eps, tol=config.tol,
                      max_iter=config.max_iter,
                      filters_enabled=config.filters_enabled,
                      entropy_relax=config.entropy_relax)
    return re, mesh, ctx, u0


def _snapshot(config, u, t):
    return output.Snapshot(field=u.copy(), t=t, p=config.p,
                           dims=config.dims, extent=config.extent,
                           gamma=config.gamma, name=config.name)


def _interval_extras(u, ctx):
    g = ctx.g
    rho = u[..., ph.RHO]
    pres = ph.pressure(u, g)
    sigma_min = efilter.compute_sigma_min(u, ctx.re, ctx.mesh, g)
    with np.errstate(invalid="ignore"):
        sig = ph.specific_entropy(u, g)
    margin = float((sig - sigma_min[:, None]).min())
    divb = rhs.divB_l1(u, ctx.re, ctx.mesh)
    vol = np.prod(ctx.mesh.h) / 2.0 ** ctx.mesh.dim
    mass = float(vol * np.sum(rho @ ctx.re.w))
    return [float(rho.min()), float(pres.min()), margin, divb, mass]


def run(config, progress=None):
    """Advance a case to t_end; returns a RunResult.

    Diagnostics: one row per step (max limiting factor 1-f and filter
    activation counts over the three stages) and one extended row per
    output interval with admissibility margins, the L1 norm of div B,
    and total mass.  progress, if given, is called as progress(step,
    nsteps, t) every output interval.
    """
    re, mesh, ctx, u = setup(config)
    t = 0.0
    nsteps = max(int(round(config.t_end / config.dt)), 1)
    dt = config.t_end / nsteps

    writers = {}
    if config.out_dir:
        os.makedirs(config.out_dir, exist_ok=True)
        writers["step"] = output.DiagnosticsWriter(
            os.path.join(config.out_dir, "diag_step.csv"), STEP_COLUMNS)
        writers["interval"] = output.DiagnosticsWriter(
            os.path.join(config.out_dir, "diag_interval.csv"),
            INTERVAL_COLUMNS)

    result = RunResult(snapshot=None, steps=0)
    try:
        for step in range(1, nsteps + 1):
            u_prev = u
            u, reports = ssprk3_step(u, dt, ctx, step=step)
            t = step * dt
            maxlim = max(max(r.he.max_limiting_factor,
                             r.hp.max_limiting_factor) for r in reports)
            he_act = sum(r.he.activations for r in reports)
            hp_act = sum(r.hp.activations for r in reports)
            maxit = max(max(r.he.max_iterations, r.hp.max_iterations)
                        for r in reports)
            row = [step, t, maxlim, he_act, hp_act, maxit]
            result.step_rows.append(row)
            if "step" in writers:
                writers["step"].writerow(row)
            if step % config.out_every == 0 or step == nsteps:
                extra = row + _interval_extras(u, ctx)
                result.interval_rows.append(extra)
                if "interval" in writers:
                    writers["interval"].writerow(extra)
                if progress is not None:
                    progress(step, nsteps, t)
    except UnrecoverableElementError:
        if config.out_dir:
            snap = _snapshot(config, u_prev, t)
            output.write_snapshot_csv(
                os.path.join(config.out_dir, "last_good.csv"), snap)
        raise
    finally:
        for w in writers.values():
            w.close()

    result.steps = nsteps
    result.snapshot = _snapshot(config, u, t)
    if config.out_dir:
        output.write_snapshot_csv(
            os.path.join(config.out_dir, "final.csv"), result.snapshot)
        if mesh.dim == 2:
            output.write_snapshot_vtr(
                os.path.join(config.out_dir, "final.vtr"), result.snapshot)
    return result


def vortex_error(snap, mu=None, npts=9):
    """L1 magnetic-field error of the convecting vortex.

    e = (1/A) * integral of |Bx - Bx_exact| + |By - By_exact|, with
    A the domain area; the exact solution is the discrete initial
    field (the nodal interpolant of the vortex) translated by (t, t)
    with periodic wrap, so the measure is pure evolution error and
    vanishes at t = 0.  Integration uses an npts-point tensor
    Gauss-Legendre rule per element.
    """
    if snap.name and snap.name != "vortex":
        raise ConfigError(f"vortex_error needs a vortex snapshot, "
                          f"got {snap.name!r}")
    if len(snap.dims) != 2:
        raise ConfigError("vortex_error needs a 2D snapshot")
    mu = cases.VORTEX_MU if mu is None else mu
    re = snap.reference()
    mesh = snap.geometry_mesh()
    gp, gw = np.polynomial.legendre.leggauss(npts)
    L = output.lagrange_eval_1d(re, gp)
    n1 = re.p + 1
    nx, ny = snap.dims
    ne = nx * ny
    B = snap.field[..., ph.MAG][..., :2].reshape(ne, n1, n1, 2)
    Bs = np.einsum("ai,bj,eijc->eabc", L, L, B)   # (Ne, ny_q, nx_q, 2)

    origins = mesh.element_origins()
    hx, hy = mesh.h
    xq = origins[:, None, None, 0] + (gp[None, None, :] + 1) / 2 * hx
    yq = origins[:, None, None, 1] + (gp[None, :, None] + 1) / 2 * hy
    xq, yq = np.broadcast_arrays(xq, yq)
    lo = (snap.extent[0][0], snap.extent[1][0])
    span = (snap.extent[0][1] - lo[0], snap.extent[1][1] - lo[1])

    # translate the quadrature points back and evaluate the initial
    # piecewise-polynomial interpolant element by element
    xb = (xq - snap.t - lo[0]) % span[0] + lo[0]
    yb = (yq - snap.t - lo[1]) % span[1] + lo[1]
    ex = np.clip(np.floor((xb - lo[0]) / hx).astype(int), 0, nx - 1)
    ey = np.clip(np.floor((yb - lo[1]) / hy).astype(int), 0, ny - 1)
    eidx = ey * nx + ex
    xi = np.clip(2.0 * (xb - lo[0] - ex * hx) / hx - 1.0, -1.0, 1.0)
    eta = np.clip(2.0 * (yb - lo[1] - ey * hy) / hy - 1.0, -1.0, 1.0)
    B0 = cases.vortex_primitives(snap.coords(), mu=mu)[..., 4:6]
    B0 = B0.reshape(ne, n1, n1, 2)
    Lx = output.lagrange_eval_1d(re, xi.ravel())
    Ly = output.lagrange_eval_1d(re, eta.ravel())
    Bex = np.einsum("ni,nj,nijc->nc", Ly, Lx,
                    B0[eidx.ravel()]).reshape(Bs.shape)

    w2 = gw[:, None] * gw[None, :]
    diff = np.abs(Bs - Bex).sum(axis=-1)
    area = span[0] * span[1]
    return float(np.einsum("eab,ab->", diff, w2) * (hx / 2) * (hy / 2)
                 / area)


def convergence_study(p, resolutions, mu=None, dt=1e-4, t_end=0.05,
                      progress=None):
    """Vortex grid-refinement study at order p.

    Returns (errors, rate) where rate is the least-squares slope of
    log(error) against log(h).  Needs at least two resolutions.
    """
    if len(resolutions) < 2:
        raise ConfigError("convergence study needs at least 2 resolutions")
    mu = cases.VORTEX_MU if mu is None else mu
    errors = []
    for ne in resolutions:
        cfg = cases.preset_vortex(mu=mu, ne=ne, p=p)
        cfg.dt, cfg.t_end = dt, t_end
        res = run(cfg, progress=progress)
        errors.append(vortex_error(res.snapshot, mu=mu))
        log.info("vortex p=%d ne=%d error=%.6e", p, ne, errors[-1])
    logh = np.log(1.0 / np.asarray(resolutions, dtype=float))
    rate = float(np.polyfit(logh, np.log(errors), 1)[0])
    return errors, rate


def p0_reference(ne=50000, t_end=0.1, cfl=0.4):
    """Brio-Wu reference: first-order finite volume (p=0) on a fine
    1D mesh, with the time step chosen from the initial wavespeeds."""
    g = ph.GasModel(2.0)
    left = ph.prim_to_cons(cases.BRIOWU_LEFT, g)
    right = ph.prim_to_cons(cases.BRIOWU_RIGHT, g)
    nrm = np.array([1.0, 0.0, 0.0])
    lam = max(float(ph.fast_magnetosonic_speed(s, nrm, g)
                    + abs(s[1] / s[0])) for s in (left, right))
    h = 1.0 / ne
    nsteps = math.ceil(t_end * lam / (cfl * h))
    cfg = cases.CaseConfig(
        name="briowu_ref", gamma=2.0, p=0, dims=(ne,),
        extent=((0.0, 1.0),),
        bcs={"xlo": BoundarySpec("dirichlet", left),
             "xhi": BoundarySpec("dirichlet", right)},
        ic=cases.briowu_primitives, riemann="hllc",
        dt=t_end / nsteps, t_end=t_end, out_every=max(nsteps // 10, 1),
        # at p = 0 the element is its own mean, so the modal filter is an
        # identity; first-order finite volume is admissible on its own
        filters_enabled=False)
    return run(cfg).snapshot
