"""Snapshot and diagnostics file I/O plus polynomial post-processing.

The canonical snapshot format is CSV: a header comment carrying the run
geometry followed by one row per solution node with coordinates and
primitive fields written at full precision (exact round trip).  A
rectilinear-grid VTK (.vtr) writer is provided for contour inspection;
it subsamples each element at equispaced interior points so the global
coordinate lists stay strictly increasing.
"""

import os
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import legendre as npleg

from . import physics as ph
from .element import build_reference_element
from .errors import ConfigError
from .mesh import BoundarySpec, build_mesh

CSV_FIELDS = ["rho", "u", "v", "w", "Bx", "By", "Bz", "P"]


@dataclass
class Snapshot:
    """Nodal conserved field plus enough geometry to rebuild it."""

    field: np.ndarray          # (Ne, n, 8) conserved
    t: float
    p: int
    dims: tuple
    extent: tuple
    gamma: float
    name: str = ""

    def reference(self):
        return build_reference_element(self.p, len(self.dims))

    def geometry_mesh(self):
        """Mesh with placeholder periodic BCs, for geometry queries only."""
        per = BoundarySpec("periodic")
        sides = (("xlo", "xhi") if len(self.dims) == 1
                 else ("xlo", "xhi", "ylo", "yhi"))
        return build_mesh(self.dims, self.extent, {s: per for s in sides})

    def coords(self):
        return self.geometry_mesh().node_coords(self.reference())


def write_snapshot_csv(path, snap):
    g = ph.GasModel(snap.gamma)
    q = ph.cons_to_prim(snap.field, g)
    coords = snap.coords()
    dim = len(snap.dims)
    ext = ",".join(f"{a!r},{b!r}" for a, b in snap.extent)
    with open(path, "w") as fh:
        fh.write("# mhdsem-snapshot v1\n")
        fh.write(f"# name={snap.name} t={snap.t!r} gamma={snap.gamma!r} "
                 f"p={snap.p} dims={','.join(map(str, snap.dims))} "
                 f"extent={ext}\n")
        cols = (["x", "y"][:dim]) + CSV_FIELDS
        fh.write(",".join(cols) + "\n")
        flatc = coords.reshape(-1, dim)
        flatq = q.reshape(-1, 8)
        for i in range(flatc.shape[0]):
            row = [f"{v!r}" for v in flatc[i]] + [f"{v!r}" for v in flatq[i]]
            fh.write(",".join(row) + "\n")


def read_snapshot_csv(path):
    with open(path) as fh:
        magic = fh.readline()
        if not magic.startswith("# mhdsem-snapshot"):
            raise ConfigError(f"{path!r} is not a mhdsem snapshot")
        meta = {}
        for tok in fh.readline()[1:].split():
            k, _, v = tok.partition("=")
            meta[k] = v
        fh.readline()   # column header
        data = np.loadtxt(fh, delimiter=",")
    dims = tuple(int(d) for d in meta["dims"].split(","))
    extv = [float(x) for x in meta["extent"].split(",")]
    extent = tuple((extv[2 * i], extv[2 * i + 1]) for i in range(len(dims)))
    p = int(meta["p"])
    gamma = float(meta["gamma"])
    dim = len(dims)
    n = (p + 1) ** dim
    ne = int(np.prod(dims))
    q = data[:, dim:].reshape(ne, n, 8)
    u = ph.prim_to_cons(q, ph.GasModel(gamma))
    return Snapshot(field=u, t=float(meta["t"]), p=p, dims=dims,
                    extent=extent, gamma=gamma, name=meta.get("name", ""))


def lagrange_eval_1d(re, pts):
    """(npts, p+1) matrix of the 1D GLL Lagrange basis at ``pts``."""
    pts = np.atleast_1d(np.asarray(pts, dtype=float))
    n1 = re.p + 1
    V = np.empty((n1, n1))
    Psi = np.empty((len(pts), n1))
    for a in range(n1):
        c = np.zeros(n1)
        c[a] = np.sqrt(a + 0.5)
        V[:, a] = npleg.legval(re.nodes1d, c)
        Psi[:, a] = npleg.legval(pts, c)
    return Psi @ np.linalg.inv(V)


def write_snapshot_vtr(path, snap, nsub=None):
    """Rectilinear VTK output, subsampled at equispaced in-element points."""
    if len(snap.dims) != 2:
        raise ConfigError("VTK output supports 2D snapshots only")
    re = snap.reference()
    n1 = re.p + 1
    nsub = nsub or n1
    eta = -1.0 + (2.0 * np.arange(nsub) + 1.0) / nsub
    L = lagrange_eval_1d(re, eta)
    g = ph.GasModel(snap.gamma)
    q = ph.cons_to_prim(snap.field, g)
    nx, ny = snap.dims
    qe = q.reshape(nx * ny, n1, n1, 8)
    # sample: rows y, cols x
    qs = np.einsum("ai,bj,eijf->eabf", L, L, qe)
    qs = qs.reshape(ny, nx, nsub, nsub, 8).transpose(0, 2, 1, 3, 4)
    qs = qs.reshape(ny * nsub, nx * nsub, 8)

    def axis_coords(d):
        x0 = snap.extent[d][0]
        h = (snap.extent[d][1] - x0) / snap.dims[d]
        offs = (eta + 1.0) / 2.0 * h
        return (x0 + h * np.arange(snap.dims[d])[:, None]
                + offs[None, :]).ravel()

    xs, ys = axis_coords(0), axis_coords(1)
    nxs, nys = len(xs), len(ys)
    with open(path, "w") as fh:
        fh.write('<?xml version="1.0"?>\n')
        fh.write('<VTKFile type="RectilinearGrid" version="0.1" '
                 'byte_order="LittleEndian">\n')
        fh.write(f'<RectilinearGrid WholeExtent="0 {nxs-1} 0 {nys-1} 0 0">\n')
        fh.write(f'<Piece Extent="0 {nxs-1} 0 {nys-1} 0 0">\n')
        fh.write("<Coordinates>\n")
        for arr, nm in ((xs, "x"), (ys, "y"), (np.zeros(1), "z")):
            fh.write(f'<DataArray type="Float64" Name="{nm}" '
                     'format="ascii">\n')
            fh.write(" ".join(f"{v:.12g}" for v in arr) + "\n")
            fh.write("</DataArray>\n")
        fh.write("</Coordinates>\n<PointData>\n")
        for c, nm in enumerate(CSV_FIELDS):
            fh.write(f'<DataArray type="Float64" Name="{nm}" '
                     'format="ascii">\n')
            fh.write(" ".join(f"{v:.12g}" for v in qs[..., c].ravel())
                     + "\n")
            fh.write("</DataArray>\n")
        fh.write("</PointData>\n</Piece>\n</RectilinearGrid>\n</VTKFile>\n")


def slice_snapshot(snap, axis, coord, nsub=None):
    """Sample the polynomial solution along a grid line.

    axis: "x" returns a profile varying in x at y = coord, and vice
    versa.  Returns (positions, primitive values (npts, 8)).
    """
    if len(snap.dims) == 1:
        raise ConfigError("slicing needs a 2D snapshot")
    re = snap.reference()
    n1 = re.p + 1
    nsub = nsub or 2 * n1
    nx, ny = snap.dims
    (x0, _), (y0, _) = snap.extent
    hx, hy = ((snap.extent[0][1] - x0) / nx, (snap.extent[1][1] - y0) / ny)
    g = ph.GasModel(snap.gamma)
    qe = ph.cons_to_prim(snap.field, g).reshape(ny, nx, n1, n1, 8)

    if axis == "x":
        iy = min(int((coord - y0) / hy), ny - 1)
        eta = 2.0 * (coord - (y0 + iy * hy)) / hy - 1.0
        ly = lagrange_eval_1d(re, [eta])[0]
        line = np.einsum("j,xjif->xif", ly, qe[iy])      # (nx, n1, 8)
        xi = -1.0 + (2.0 * np.arange(nsub) + 1.0) / nsub
        lx = lagrange_eval_1d(re, xi)
        vals = np.einsum("ai,xif->xaf", lx, line).reshape(-1, 8)
        pos = (x0 + hx * np.arange(nx)[:, None]
               + (xi[None, :] + 1.0) / 2.0 * hx).ravel()
    elif axis == "y":
        ix = min(int((coord - x0) / hx), nx - 1)
        eta = 2.0 * (coord - (x0 + ix * hx)) / hx - 1.0
        lx = lagrange_eval_1d(re, [eta])[0]
        line = np.einsum("i,yjif->yjf", lx, qe[:, ix])   # (ny, n1, 8)
        xi = -1.0 + (2.0 * np.arange(nsub) + 1.0) / nsub
        ly = lagrange_eval_1d(re, xi)
        vals = np.einsum("aj,yjf->yaf", ly, line).reshape(-1, 8)
        pos = (y0 + hy * np.arange(ny)[:, None]
               + (xi[None, :] + 1.0) / 2.0 * hy).ravel()
    else:
        raise ConfigError("axis must be 'x' or 'y'")
    return pos, vals


class DiagnosticsWriter:
    """Incremental CSV writer for run diagnostics."""

    def __init__(self, path, columns):
        self.path = path
        self.columns = columns
        os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
        self._fh = open(path, "w")
        self._fh.write(",".join(columns) + "\n")

    def writerow(self, row):
        self._fh.write(",".join(f"{v!r}" if isinstance(v, float) else str(v)
                                for v in row) + "\n")
        self._fh.flush()

    def close(self):
        self._fh.close()
