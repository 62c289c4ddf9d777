"""Ideal MHD state algebra.

Conserved states are arrays with a trailing axis of 8 components,
``[rho, mx, my, mz, Bx, By, Bz, E]``; primitive states use
``[rho, u, v, w, Bx, By, Bz, P]``.  Velocity and magnetic field always
carry three components regardless of the mesh dimension.  All functions
are vectorized over any number of leading axes and are pure.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidStateError

RHO, MOM, MAG, ENE = 0, slice(1, 4), slice(4, 7), 7


@dataclass(frozen=True)
class GasModel:
    """Ideal gas with constant specific heat ratio gamma > 1."""

    gamma: float

    def __post_init__(self):
        if not self.gamma > 1.0:
            raise ValueError(f"gamma must exceed 1, got {self.gamma}")


def pressure(u, g):
    """Thermodynamic pressure P = (gamma-1)(E - kinetic - magnetic)."""
    u = np.asarray(u, dtype=float)
    rho = u[..., RHO]
    ke = 0.5 * np.einsum("...i,...i->...", u[..., MOM], u[..., MOM]) / rho
    me = 0.5 * np.einsum("...i,...i->...", u[..., MAG], u[..., MAG])
    return (g.gamma - 1.0) * (u[..., ENE] - ke - me)


def cons_to_prim(u, g):
    """Convert conserved to primitive variables.

    Raises InvalidStateError on non-positive density.
    """
    u = np.asarray(u, dtype=float)
    rho = u[..., RHO]
    if not np.all(rho > 0.0):
        raise InvalidStateError("non-positive density in cons_to_prim")
    q = u.copy()
    q[..., MOM] = u[..., MOM] / rho[..., None]
    q[..., ENE] = pressure(u, g)
    return q


def prim_to_cons(q, g):
    """Convert primitive to conserved variables."""
    q = np.asarray(q, dtype=float)
    rho = q[..., RHO]
    if not np.all(rho > 0.0):
        raise InvalidStateError("non-positive density in prim_to_cons")
    u = q.copy()
    u[..., MOM] = q[..., MOM] * rho[..., None]
    ke = 0.5 * rho * np.einsum("...i,...i->...", q[..., MOM], q[..., MOM])
    me = 0.5 * np.einsum("...i,...i->...", q[..., MAG], q[..., MAG])
    u[..., ENE] = q[..., ENE] / (g.gamma - 1.0) + ke + me
    return u


def specific_entropy(u, g):
    """Specific physical entropy sigma = P * rho^(-gamma)."""
    u = np.asarray(u, dtype=float)
    rho = u[..., RHO]
    if not np.all(rho > 0.0):
        raise InvalidStateError("non-positive density in specific_entropy")
    return pressure(u, g) * rho ** (-g.gamma)


def aux_quantities(u, g):
    """Magnetic pressure P_b = (gamma-1)/2 * B.B and plasma beta = 2P/B.B.

    Note: this magnetic pressure definition includes the (gamma-1) factor,
    which differs from the conventional B.B/2.  Beta is +inf where B = 0.
    """
    u = np.asarray(u, dtype=float)
    bb = np.einsum("...i,...i->...", u[..., MAG], u[..., MAG])
    pb = 0.5 * (g.gamma - 1.0) * bb
    with np.errstate(divide="ignore"):
        beta = np.where(bb > 0.0, 2.0 * pressure(u, g) / np.where(bb > 0, bb, 1.0),
                        np.inf)
    return pb, beta


def flux_normal(u, g, n):
    """Projected flux F(u).n for a unit normal n with 3 components.

    Broadcasts over leading axes of both u and n.
    """
    u = np.asarray(u, dtype=float)
    n = np.asarray(n, dtype=float)
    rho = u[..., RHO]
    mom = u[..., MOM]
    B = u[..., MAG]
    E = u[..., ENE]
    v = mom / rho[..., None]
    P = pressure(u, g)
    bb = np.einsum("...i,...i->...", B, B)
    pt = P + 0.5 * bb
    vn = np.einsum("...i,...i->...", v, n)
    bn = np.einsum("...i,...i->...", B, n)
    vdb = np.einsum("...i,...i->...", v, B)

    f = np.empty(np.broadcast_shapes(u.shape[:-1], n.shape[:-1]) + (8,))
    f[..., RHO] = rho * vn
    f[..., MOM] = (mom * vn[..., None] + pt[..., None] * n
                   - bn[..., None] * B)
    f[..., MAG] = vn[..., None] * B - bn[..., None] * v
    f[..., ENE] = (E + pt) * vn - bn * vdb
    return f


_AXES = np.eye(3)


def physical_flux(u, g, dim=3):
    """Full flux tensor, shape (..., 8, dim), columns F.e_d."""
    return np.stack([flux_normal(u, g, _AXES[d]) for d in range(dim)], axis=-1)


def fast_magnetosonic_speed(u, n, g):
    """Fast magnetosonic speed along the unit normal n."""
    u = np.asarray(u, dtype=float)
    rho = u[..., RHO]
    P = pressure(u, g)
    if not (np.all(rho > 0.0) and np.all(P > 0.0)):
        raise InvalidStateError("inadmissible state in fast_magnetosonic_speed")
    a2 = g.gamma * P / rho
    B = u[..., MAG]
    b2 = np.einsum("...i,...i->...", B, B) / rho
    bn2 = np.einsum("...i,...i->...", B, np.asarray(n, dtype=float)) ** 2 / rho
    s = a2 + b2
    disc = np.maximum(s * s - 4.0 * a2 * bn2, 0.0)
    return np.sqrt(0.5 * (s + np.sqrt(disc)))


def powell_source(u, divB):
    """Eight-wave source -(0, B, v, v.B) * divB.

    The mass component is identically zero.
    """
    u = np.asarray(u, dtype=float)
    divB = np.asarray(divB, dtype=float)
    v = u[..., MOM] / u[..., RHO][..., None]
    B = u[..., MAG]
    s = np.zeros(np.broadcast_shapes(u.shape[:-1], divB.shape) + (8,))
    s[..., MOM] = -B * divB[..., None]
    s[..., MAG] = -v * divB[..., None]
    s[..., ENE] = -np.einsum("...i,...i->...", v, B) * divB
    return s
