"""Case presets and run-configuration parsing.

Every physical and numerical parameter of the desk-scale experiments is
carried by CaseConfig; the presets fill in the published setups and an
INI-style config file can override any of them.
"""

import configparser
from dataclasses import dataclass, field, replace

import numpy as np

from . import physics as ph
from .errors import ConfigError
from .mesh import BoundarySpec

VORTEX_MU = 5.38948938512
BLAST_B0 = 1000.0 / np.sqrt(4.0 * np.pi)

BRIOWU_LEFT = np.array([1.0, 0.0, 0.0, 0.0, 0.75, 1.0, 0.0, 1.0])
BRIOWU_RIGHT = np.array([0.125, 0.0, 0.0, 0.0, 0.75, -1.0, 0.0, 0.1])


@dataclass
class CaseConfig:
    name: str
    gamma: float
    p: int
    dims: tuple
    extent: tuple
    bcs: dict
    ic: object                     # coords (..., dim) -> primitive (..., 8)
    riemann: str = "hllc"
    dt: float = 1e-4
    t_end: float = 0.1
    eps: float = 1e-8
    tol: float = 1e-8
    max_iter: int = 20
    filters_enabled: bool = True
    entropy_relax: float = 1e-4
    out_every: int = 50
    out_dir: str = None
    params: dict = field(default_factory=dict)

    def gas(self):
        return ph.GasModel(self.gamma)


def vortex_primitives(coords, mu=VORTEX_MU):
    """Near-vacuum convecting-vortex initial primitives.

    The radial profile enters the velocity/field perturbations as
    exp((1 - r^2)/2) so that the pressure perturbation carries
    exp(1 - r^2) and the central pressure sits near 2e-8.
    """
    x, y = coords[..., 0], coords[..., 1]
    r2 = x * x + y * y
    phi = np.exp(0.5 * (1.0 - r2))
    du = mu / (np.sqrt(2.0) * np.pi) * phi
    db = mu / (2.0 * np.pi) * phi
    dp = -(mu ** 2) * (1.0 + r2) / (8.0 * np.pi ** 2) * phi ** 2
    q = np.zeros(coords.shape[:-1] + (8,))
    q[..., 0] = 1.0
    q[..., 1] = 1.0 - y * du
    q[..., 2] = 1.0 + x * du
    q[..., 4] = -y * db
    q[..., 5] = x * db
    q[..., 7] = 1.0 + dp
    return q


def preset_vortex(mu=VORTEX_MU, ne=20, p=3):
    per = BoundarySpec("periodic")
    return CaseConfig(
        name="vortex", gamma=5.0 / 3.0, p=p, dims=(ne, ne),
        extent=((-10.0, 10.0), (-10.0, 10.0)),
        bcs={"xlo": per, "xhi": per, "ylo": per, "yhi": per},
        ic=lambda c: vortex_primitives(c, mu=mu),
        riemann="hllc", dt=1e-4, t_end=0.05,
        params={"mu": mu},
    )


def briowu_primitives(coords):
    x = coords[..., 0]
    q = np.where((x <= 0.5)[..., None], BRIOWU_LEFT, BRIOWU_RIGHT)
    return q.astype(float)


def preset_briowu(ne=200, p=3):
    g = ph.GasModel(2.0)
    left = ph.prim_to_cons(BRIOWU_LEFT, g)
    right = ph.prim_to_cons(BRIOWU_RIGHT, g)
    per = BoundarySpec("periodic")
    h = 1.0 / ne
    return CaseConfig(
        name="briowu", gamma=2.0, p=p, dims=(ne, 1),
        extent=((0.0, 1.0), (0.0, h)),
        bcs={"xlo": BoundarySpec("dirichlet", left),
             "xhi": BoundarySpec("dirichlet", right),
             "ylo": per, "yhi": per},
        ic=briowu_primitives,
        riemann="hllc", dt=2e-4 * 200.0 / ne, t_end=0.1,
    )


def otv_primitives(coords):
    x, y = coords[..., 0], coords[..., 1]
    q = np.zeros(coords.shape[:-1] + (8,))
    q[..., 0] = 25.0 / (36.0 * np.pi)
    q[..., 1] = -np.sin(2.0 * np.pi * y)
    q[..., 2] = np.sin(2.0 * np.pi * x)
    q[..., 4] = np.sin(2.0 * np.pi * y) / np.sqrt(4.0 * np.pi)
    q[..., 5] = -np.sin(4.0 * np.pi * x) / np.sqrt(4.0 * np.pi)
    q[..., 7] = 5.0 / (12.0 * np.pi)
    return q


def preset_otv(ne=64, p=3):
    per = BoundarySpec("periodic")
    return CaseConfig(
        name="otv", gamma=5.0 / 3.0, p=p, dims=(ne, ne),
        extent=((0.0, 1.0), (0.0, 1.0)),
        bcs={"xlo": per, "xhi": per, "ylo": per, "yhi": per},
        ic=otv_primitives,
        riemann="hllc", dt=4e-4 * 64.0 / ne, t_end=0.5,
    )


def blast_primitives(coords, p_inner=1e4, p_ambient=0.1, b0=BLAST_B0,
                     radius=0.1):
    x, y = coords[..., 0], coords[..., 1]
    q = np.zeros(coords.shape[:-1] + (8,))
    q[..., 0] = 1.0
    q[..., 4] = b0
    q[..., 7] = np.where(np.hypot(x, y) <= radius, p_inner, p_ambient)
    return q


def preset_blast(ne=100, p=4):
    per = BoundarySpec("periodic")
    return CaseConfig(
        name="blast", gamma=5.0 / 3.0, p=p, dims=(ne, ne),
        extent=((-0.5, 0.5), (-0.5, 0.5)),
        bcs={"xlo": per, "xhi": per, "ylo": per, "yhi": per},
        ic=blast_primitives,
        riemann="hll", dt=2e-7, t_end=1e-3,
        params={"p_inner": 1e4, "p_ambient": 0.1, "b0": BLAST_B0},
    )


PRESETS = {"vortex": preset_vortex, "briowu": preset_briowu,
           "otv": preset_otv, "blast": preset_blast}


def parse_config(path):
    """Build a CaseConfig from an INI file.

    [case] selects the preset (case = vortex|briowu|otv|blast) plus
    ne / p / riemann / gamma-independent overrides; [time], [filter] and
    [output] override stepping, filter tolerances, and output settings.
    """
    cp = configparser.ConfigParser()
    read = cp.read(path)
    if not read:
        raise ConfigError(f"cannot read config file {path!r}")
    if "case" not in cp:
        raise ConfigError("config needs a [case] section")
    sec = cp["case"]
    name = sec.get("case", sec.get("name", None))
    if name not in PRESETS:
        raise ConfigError(f"unknown case {name!r}; choose from "
                          f"{sorted(PRESETS)}")
    kwargs = {}
    if "ne" in sec:
        kwargs["ne"] = sec.getint("ne")
    if "p" in sec:
        kwargs["p"] = sec.getint("p")
    if name == "vortex" and "mu" in sec:
        kwargs["mu"] = sec.getfloat("mu")
    try:
        cfg = PRESETS[name](**kwargs)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    if "riemann" in sec:
        cfg = replace(cfg, riemann=sec.get("riemann"))

    if "time" in cp:
        t = cp["time"]
        for key in ("dt", "t_end"):
            if key in t:
                cfg = replace(cfg, **{key: t.getfloat(key)})
    if "filter" in cp:
        f = cp["filter"]
        if "eps" in f:
            cfg = replace(cfg, eps=f.getfloat("eps"))
        if "tol" in f:
            cfg = replace(cfg, tol=f.getfloat("tol"))
        if "max_iter" in f:
            cfg = replace(cfg, max_iter=f.getint("max_iter"))
        if "entropy_relax" in f:
            cfg = replace(cfg, entropy_relax=f.getfloat("entropy_relax"))
        if "enabled" in f:
            cfg = replace(cfg, filters_enabled=f.getboolean("enabled"))
    if "output" in cp:
        o = cp["output"]
        if "dir" in o:
            cfg = replace(cfg, out_dir=o.get("dir"))
        if "every" in o:
            cfg = replace(cfg, out_every=o.getint("every"))

    if not (cfg.dt > 0 and cfg.t_end > 0):
        raise ConfigError("dt and t_end must be positive")
    return cfg
