"""Spatial operators: flux divergence (L1) and the eight-wave source (L2).

Fields are arrays of shape (Ne, n, 8).  The divergence of the flux is the
collocation interior term plus the lifted interface correction
(1/w_end)(Fbar.n - F(u).n) at face nodes, scaled by 2/h per dimension;
on GLL points with these corrections the scheme is the nodal DG method.
"""

import numpy as np

from . import physics as ph
from .errors import InvalidStateError
from .mesh import SIDES_1D, SIDES_2D, ghost_state

_AXES = np.eye(3)


def axis_traces(field_, re, mesh, axis):
    """Interior/exterior trace states (uL, uR) on every face normal to
    ``axis``; the left state sits on the -axis side.  Boundary faces get
    ghost exterior states."""
    fs = mesh.faces[axis]
    lo_nodes = re.face_nodes[2 * axis]
    hi_nodes = re.face_nodes[2 * axis + 1]
    sides = SIDES_1D if mesh.dim == 1 else SIDES_2D
    nf, ntr = len(fs.left), len(lo_nodes)
    uL = np.empty((nf, ntr, 8))
    uR = np.empty((nf, ntr, 8))
    maskL = fs.left >= 0
    maskR = fs.right >= 0
    if np.any(maskL):
        uL[maskL] = field_[fs.left[maskL]][:, hi_nodes]
    if np.any(maskR):
        uR[maskR] = field_[fs.right[maskR]][:, lo_nodes]
    if not np.all(maskL):
        bc = mesh.bcs[sides[2 * axis]]
        uL[~maskL] = ghost_state(uR[~maskL], bc, -_AXES[axis])
    if not np.all(maskR):
        bc = mesh.bcs[sides[2 * axis + 1]]
        uR[~maskR] = ghost_state(uL[~maskR], bc, _AXES[axis])
    return uL, uR


def _locate_bad(field_, g):
    rho = field_[..., ph.RHO]
    P = ph.pressure(field_, g)
    bad = ~((rho > 0) & (P > 0))
    if np.any(bad):
        e, j = np.argwhere(bad)[0]
        return int(e), int(j)
    return None


def compute_L1(field_, re, mesh, solver, g, return_interface=False):
    """Negative divergence of the flux (interior + interface terms)."""
    try:
        return _compute_L1(field_, re, mesh, solver, g, return_interface)
    except InvalidStateError as exc:
        loc = _locate_bad(field_, g)
        if loc is not None:
            raise InvalidStateError(
                f"inadmissible state at element {loc[0]}, node {loc[1]}"
            ) from exc
        raise


def _interior_div(values, re, mesh):
    """Collocation divergence of per-dimension flux arrays, physical
    scaling included.  values: list over axes of (Ne, n, comps)."""
    n1 = re.p + 1
    ne = mesh.n_elements
    shp = values[0].shape[2:]
    if mesh.dim == 1:
        return (2.0 / mesh.h[0]) * np.einsum(
            "ij,ej...->ei...", re.D1, values[0])
    vx = values[0].reshape(ne, n1, n1, *shp)
    vy = values[1].reshape(ne, n1, n1, *shp)
    div = (2.0 / mesh.h[0]) * np.einsum("ij,eyj...->eyi...", re.D1, vx)
    div += (2.0 / mesh.h[1]) * np.einsum("ij,ejx...->eix...", re.D1, vy)
    return div.reshape(ne, re.n, *shp)


def _compute_L1(field_, re, mesh, solver, g, return_interface):
    fluxes = [ph.flux_normal(field_, g, _AXES[d]) for d in range(mesh.dim)]
    div = _interior_div(fluxes, re, mesh)

    interface = {}
    for axis in range(mesh.dim):
        fs = mesh.faces[axis]
        lo_nodes = re.face_nodes[2 * axis]
        hi_nodes = re.face_nodes[2 * axis + 1]
        uL, uR = axis_traces(field_, re, mesh, axis)
        fbar = solver(uL, uR, _AXES[axis], g)
        coef = (2.0 / mesh.h[axis]) / re.w_end
        div[:, hi_nodes] += coef * (fbar[fs.elem_hi]
                                    - fluxes[axis][:, hi_nodes])
        div[:, lo_nodes] += coef * (fluxes[axis][:, lo_nodes]
                                    - fbar[fs.elem_lo])
        interface[axis] = fbar
    if return_interface:
        return -div, interface
    return -div


def compute_global_divB(field_, re, mesh):
    """Global discrete divergence of B: interior collocation term plus
    the lifted correction using the centered interface average."""
    B = field_[..., ph.MAG]
    comps = [B[..., d, None] for d in range(mesh.dim)]
    div = _interior_div(comps, re, mesh)[..., 0]
    for axis in range(mesh.dim):
        fs = mesh.faces[axis]
        lo_nodes = re.face_nodes[2 * axis]
        hi_nodes = re.face_nodes[2 * axis + 1]
        uL, uR = axis_traces(field_, re, mesh, axis)
        bbar = 0.5 * (uL[..., ph.MAG][..., axis] + uR[..., ph.MAG][..., axis])
        coef = (2.0 / mesh.h[axis]) / re.w_end
        div[:, hi_nodes] += coef * (bbar[fs.elem_hi] - B[:, hi_nodes, axis])
        div[:, lo_nodes] += coef * (B[:, lo_nodes, axis] - bbar[fs.elem_lo])
    return div


def compute_L2(field_, divB):
    """Eight-wave (Powell) source evaluated node-wise."""
    return ph.powell_source(field_, divB)


def divB_l1(field_, re, mesh):
    """Domain L1 norm of the global divergence of B."""
    d = compute_global_divB(field_, re, mesh)
    vol_scale = np.prod(mesh.h) / 2.0 ** mesh.dim
    return float(vol_scale * np.abs(d).dot(re.w).sum())
