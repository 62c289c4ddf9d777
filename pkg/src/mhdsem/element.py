"""Reference-element machinery for tensor-product elements.

Builds, once per (order, dimension) pair: Gauss-Legendre-Lobatto solution
nodes, the nodal/modal Vandermonde pair for orthonormal Legendre modes,
per-dimension differentiation operators, quadrature weights, face node
index maps, and the per-order modal projection operators used by the
adaptive filter.

Node ordering in 2D is lexicographic with x fastest: node = iy*(p+1) + ix.
Mode ordering follows the same convention for the tensor-product modes.
"""

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import legendre as npleg


def gll_points(n1):
    """Nodes and weights of the n1-point Gauss-Legendre-Lobatto rule.

    For n1 == 1 the single node sits at the element center with weight 2
    (the constant-basis / finite-volume degeneration).
    """
    if n1 == 1:
        return np.array([0.0]), np.array([2.0])
    p = n1 - 1
    cp = np.zeros(n1)
    cp[p] = 1.0
    interior = npleg.legroots(npleg.legder(cp))
    nodes = np.concatenate(([-1.0], interior, [1.0]))
    w = 2.0 / (n1 * p * npleg.legval(nodes, cp) ** 2)
    return nodes, w


def _modal_basis_1d(nodes, p):
    """Vandermonde pair of Legendre modes orthonormal on [-1, 1]."""
    n1 = p + 1
    V = np.empty((len(nodes), n1))
    Vd = np.empty_like(V)
    for a in range(n1):
        c = np.zeros(n1)
        c[a] = np.sqrt(a + 0.5)
        V[:, a] = npleg.legval(nodes, c)
        Vd[:, a] = npleg.legval(nodes, npleg.legder(c))
    return V, Vd


@dataclass(frozen=True)
class ReferenceElement:
    p: int
    dim: int
    nodes1d: np.ndarray
    w1d: np.ndarray
    nodes: np.ndarray          # (n, dim) solution-point coordinates
    w: np.ndarray              # (n,) quadrature weights
    V: np.ndarray              # (n, n) nodal -> values of modal basis
    Vinv: np.ndarray
    D1: np.ndarray             # (p+1, p+1) 1D differentiation operator
    mode_order: np.ndarray     # (n,) filter order p_i per mode
    face_nodes: tuple          # per face, solution-node indices of its trace
    face_axis: tuple           # per face, the normal axis
    face_sign: tuple           # per face, outward normal sign
    w_end: float               # quadrature weight at an element endpoint

    @property
    def n(self):
        return len(self.w)

    @property
    def n_faces(self):
        return 2 * self.dim


@dataclass(frozen=True)
class ModeGroupOperators:
    """Projectors P^(k) onto the modes of each filter order k = 0..p."""

    projectors: np.ndarray     # (p+1, n, n)
    masks: np.ndarray = field(repr=False)  # (p+1, n) boolean per-mode masks


def build_reference_element(p, dim, mode_order_convention="max"):
    """Construct the tensor-product GLL reference element of order p.

    ``mode_order_convention`` selects how the filter order of a 2D tensor
    mode (a, b) is defined: "max" (default, giving p+1 distinct orders) or
    "total" (a + b), kept for comparison.
    """
    if p < 0 or dim not in (1, 2):
        raise ValueError("need p >= 0 and dim in {1, 2}")
    n1 = p + 1
    x1, w1 = gll_points(n1)
    V1, Vd1 = _modal_basis_1d(x1, p)
    D1 = Vd1 @ np.linalg.inv(V1)

    if dim == 1:
        nodes = x1[:, None]
        w = w1
        V = V1
        order = np.arange(n1)
        face_nodes = (np.array([0]), np.array([p]))
        face_axis = (0, 0)
        face_sign = (-1.0, 1.0)
    else:
        X, Y = np.meshgrid(x1, x1, indexing="xy")
        nodes = np.column_stack([X.ravel(), Y.ravel()])
        w = np.kron(w1, w1)
        V = np.kron(V1, V1)
        ax, ay = np.meshgrid(np.arange(n1), np.arange(n1), indexing="xy")
        ax, ay = ax.ravel(), ay.ravel()
        if mode_order_convention == "max":
            order = np.maximum(ax, ay)
        elif mode_order_convention == "total":
            order = ax + ay
        else:
            raise ValueError(f"unknown mode order convention "
                             f"{mode_order_convention!r}")
        idx = np.arange(n1 * n1).reshape(n1, n1)   # [iy, ix]
        face_nodes = (idx[:, 0], idx[:, p], idx[0, :], idx[p, :])
        face_axis = (0, 0, 1, 1)
        face_sign = (-1.0, 1.0, -1.0, 1.0)

    return ReferenceElement(
        p=p, dim=dim, nodes1d=x1, w1d=w1, nodes=nodes, w=w,
        V=V, Vinv=np.linalg.inv(V), D1=D1, mode_order=order,
        face_nodes=tuple(np.asarray(f) for f in face_nodes),
        face_axis=face_axis, face_sign=face_sign, w_end=float(w1[0]),
    )


def build_mode_groups(re):
    """Per-order projection operators P^(k) = V I^(k) V^-1."""
    nord = re.p + 1
    masks = np.stack([re.mode_order == k for k in range(nord)])
    proj = np.stack([(re.V * masks[k]) @ re.Vinv for k in range(nord)])
    return ModeGroupOperators(projectors=proj, masks=masks)


def element_mean(re, nodal, node_axis=None):
    """Quadrature-weighted element mean over the node axis.

    By default the node axis is the last one whose length matches the node
    count (so both per-node scalars and (..., n, fields) arrays work).
    """
    nodal = np.asarray(nodal)
    if node_axis is None:
        node_axis = -1 if nodal.shape[-1] == re.n else -2
    if nodal.shape[node_axis] != re.n:
        raise ValueError("node axis length does not match the element")
    w = re.w / re.w.sum()
    return np.tensordot(nodal, w, axes=([node_axis % nodal.ndim], [0]))
