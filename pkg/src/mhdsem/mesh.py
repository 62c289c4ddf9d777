"""Structured Cartesian meshes with face pairing and weak boundary data.

Elements are uniform axis-aligned boxes indexed lexicographically
(x fastest: e = iy*nx + ix).  For each direction the mesh stores a flat
list of faces; each face knows its lower-side ("left") and upper-side
("right") element, with -1 marking a domain boundary closed by the
corresponding BoundarySpec.  Face normals are always the +axis unit
vector, so the left element sees the face with outward normal +axis and
the right element with -axis.

Face-node correspondence across a conforming Cartesian face is by
identical lexicographic order on both sides (no reversal).
"""

from dataclasses import dataclass, field

import numpy as np

from . import physics as ph
from .errors import ConfigError

SIDES_1D = ("xlo", "xhi")
SIDES_2D = ("xlo", "xhi", "ylo", "yhi")


@dataclass(frozen=True)
class BoundarySpec:
    """One of: periodic | neumann | reflecting | dirichlet(state).

    ``state`` is the fixed exterior conserved state for Dirichlet.
    """

    kind: str
    state: np.ndarray = None

    def __post_init__(self):
        if self.kind not in ("periodic", "neumann", "reflecting", "dirichlet"):
            raise ConfigError(f"unknown boundary kind {self.kind!r}")
        if self.kind == "dirichlet" and self.state is None:
            raise ConfigError("dirichlet boundary needs a state")


@dataclass(frozen=True)
class FaceSet:
    """All faces normal to one axis."""

    axis: int
    left: np.ndarray           # (nf,) element on the -axis side, -1 = boundary
    right: np.ndarray          # (nf,) element on the +axis side, -1 = boundary
    elem_lo: np.ndarray        # (Ne,) face id on each element's -axis side
    elem_hi: np.ndarray        # (Ne,) face id on each element's +axis side


@dataclass(frozen=True)
class StructuredMesh:
    dims: tuple                # element counts per dimension
    extent: tuple              # ((x0, x1)[, (y0, y1)])
    h: tuple                   # element sizes
    bcs: dict                  # side name -> BoundarySpec
    faces: tuple = field(repr=False)  # FaceSet per axis

    @property
    def dim(self):
        return len(self.dims)

    @property
    def n_elements(self):
        return int(np.prod(self.dims))

    def element_origins(self):
        """(Ne, dim) lower-corner coordinates of each element."""
        axes = [self.extent[d][0] + self.h[d] * np.arange(self.dims[d])
                for d in range(self.dim)]
        if self.dim == 1:
            return axes[0][:, None]
        X, Y = np.meshgrid(axes[0], axes[1], indexing="xy")
        return np.column_stack([X.ravel(), Y.ravel()])

    def node_coords(self, re):
        """(Ne, n, dim) physical coordinates of all solution nodes."""
        orig = self.element_origins()
        half = np.asarray(self.h) / 2.0
        return orig[:, None, :] + (re.nodes[None, :, :] + 1.0) * half


def _axis_faces(axis, dims, bcs, sides):
    nx = dims[0]
    ny = dims[1] if len(dims) > 1 else 1

    def eid(ix, iy):
        return iy * nx + ix

    lo, hi = bcs[sides[2 * axis]], bcs[sides[2 * axis + 1]]
    periodic = lo.kind == "periodic"
    n_ax = dims[axis]
    n_tr = ny if axis == 0 else nx
    n_cuts = n_ax if periodic else n_ax + 1

    left = np.full(n_cuts * n_tr, -1, dtype=np.int64)
    right = np.full(n_cuts * n_tr, -1, dtype=np.int64)
    ne = nx * ny
    elem_lo = np.empty(ne, dtype=np.int64)
    elem_hi = np.empty(ne, dtype=np.int64)

    for t in range(n_tr):
        for c in range(n_cuts):
            f = t * n_cuts + c
            il = (c - 1) % n_ax if periodic else c - 1
            ir = c
            if 0 <= il < n_ax:
                e = eid(il, t) if axis == 0 else eid(t, il)
                left[f] = e
                elem_hi[e] = f
            if 0 <= ir < n_ax:
                e = eid(ir, t) if axis == 0 else eid(t, ir)
                right[f] = e
                elem_lo[e] = f
    return FaceSet(axis=axis, left=left, right=right,
                   elem_lo=elem_lo, elem_hi=elem_hi)


def build_mesh(dims, extent, bcs):
    """Build a uniform structured mesh.

    dims: (nx,) or (nx, ny); extent: matching ((x0, x1), ...);
    bcs: mapping from side name (xlo/xhi[/ylo/yhi]) to BoundarySpec.
    """
    dims = tuple(int(d) for d in dims)
    if any(d < 1 for d in dims) or len(dims) not in (1, 2):
        raise ConfigError(f"bad mesh dims {dims}")
    extent = tuple((float(a), float(b)) for a, b in extent)
    if len(extent) != len(dims) or any(b <= a for a, b in extent):
        raise ConfigError(f"bad mesh extent {extent}")
    sides = SIDES_1D if len(dims) == 1 else SIDES_2D
    if set(bcs) != set(sides):
        raise ConfigError(f"boundary specs must cover exactly {sides}")
    for d in range(len(dims)):
        klo = bcs[sides[2 * d]].kind
        khi = bcs[sides[2 * d + 1]].kind
        if (klo == "periodic") != (khi == "periodic"):
            raise ConfigError(f"periodic boundary on one side only "
                              f"(axis {d})")
    h = tuple((b - a) / n for (a, b), n in zip(extent, dims))
    faces = tuple(_axis_faces(d, dims, bcs, sides) for d in range(len(dims)))
    return StructuredMesh(dims=dims, extent=extent, h=h, bcs=bcs, faces=faces)


def ghost_state(interior, bc, n):
    """Exterior ghost state for a boundary face with outward normal n.

    Vectorized over leading axes of ``interior``.
    """
    u = np.asarray(interior, dtype=float)
    if bc.kind == "neumann":
        return u.copy()
    if bc.kind == "dirichlet":
        return np.broadcast_to(np.asarray(bc.state, dtype=float),
                               u.shape).copy()
    if bc.kind == "reflecting":
        n = np.asarray(n, dtype=float)
        out = u.copy()
        for comp in (ph.MOM, ph.MAG):
            vn = np.einsum("...i,...i->...", u[..., comp], n)
            out[..., comp] = u[..., comp] - 2.0 * vn[..., None] * n
        return out
    raise ConfigError(f"no ghost state for boundary kind {bc.kind!r}")
