"""Command-line entry points.

Subcommands:
  run <config>                  advance a case and write outputs
  convergence <config>          vortex grid-refinement study
  bench <p> <n> <rate>          filter-solve micro-benchmark
  slice <snapshot> <axis> <c>   1D profile from a 2D snapshot CSV
  reference <config>            finite-volume (p=0) reference run

Exit codes: 0 success, 1 configuration/usage error, 2 unrecoverable
element (solution left the admissible set).
"""

import argparse
import logging
import sys

import numpy as np

from . import bench, cases, driver, output
from .errors import ConfigError, UnrecoverableElementError


def _progress(step, nsteps, t):
    print(f"  step {step}/{nsteps}  t={t:.6g}", flush=True)


def cmd_run(args):
    cfg = cases.parse_config(args.config)
    if args.out:
        cfg.out_dir = args.out
    res = driver.run(cfg, progress=_progress if args.verbose else None)
    snap = res.snapshot
    print(f"{cfg.name}: {res.steps} steps to t={snap.t:.6g}")
    if res.interval_rows:
        last = res.interval_rows[-1]
        print(f"  min rho={last[6]:.6g}  min P={last[7]:.6g}  "
              f"divB L1={last[9]:.6g}  mass={last[10]:.12g}")
    if cfg.out_dir:
        print(f"  outputs in {cfg.out_dir}")
    return 0


def cmd_convergence(args):
    cfg = cases.parse_config(args.config)
    if cfg.name != "vortex":
        raise ConfigError("convergence study requires the vortex case")
    resolutions = args.resolutions or [10, 14, 20]
    errors, rate = driver.convergence_study(
        cfg.p, resolutions, mu=cfg.params.get("mu"),
        dt=cfg.dt, t_end=cfg.t_end)
    for ne, err in zip(resolutions, errors):
        print(f"  Ne={ne:4d}  error={err:.6e}")
    print(f"p={cfg.p}: convergence rate {rate:.3f}")
    return 0


def cmd_bench(args):
    res = bench.run_bench(p=args.p, n_elements=args.n,
                          violation_rate=args.rate,
                          compare_backends=args.compare_backends)
    print(bench.format_bench(res))
    return 0


def cmd_slice(args):
    snap = output.read_snapshot_csv(args.snapshot)
    pos, vals = output.slice_snapshot(snap, args.axis, args.coord)
    out = args.out or "-"
    header = ",".join([args.axis] + output.CSV_FIELDS)
    rows = np.column_stack([pos, vals])
    if out == "-":
        print(header)
        for r in rows:
            print(",".join(f"{v!r}" for v in r))
    else:
        with open(out, "w") as fh:
            fh.write(header + "\n")
            for r in rows:
                fh.write(",".join(f"{v!r}" for v in r) + "\n")
        print(f"wrote {len(rows)} samples to {out}")
    return 0


def cmd_reference(args):
    snap = driver.p0_reference(ne=args.ne)
    path = args.out or "reference_p0.csv"
    output.write_snapshot_csv(path, snap)
    print(f"wrote reference snapshot ({args.ne} cells, t={snap.t}) "
          f"to {path}")
    return 0


def build_parser():
    ap = argparse.ArgumentParser(prog="mhdsem",
                                 description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="advance a case from a config file")
    p.add_argument("config")
    p.add_argument("--out", help="output directory override")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("convergence", help="vortex refinement study")
    p.add_argument("config")
    p.add_argument("resolutions", nargs="*", type=int)
    p.set_defaults(func=cmd_convergence)

    p = sub.add_parser("bench", help="filter-solve micro-benchmark")
    p.add_argument("p", type=int)
    p.add_argument("n", type=int)
    p.add_argument("rate", type=float)
    p.add_argument("--compare-backends", action="store_true")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("slice", help="extract a 1D profile")
    p.add_argument("snapshot")
    p.add_argument("axis", choices=("x", "y"))
    p.add_argument("coord", type=float)
    p.add_argument("--out")
    p.set_defaults(func=cmd_slice)

    p = sub.add_parser("reference", help="p=0 finite-volume reference")
    p.add_argument("config", nargs="?")
    p.add_argument("--ne", type=int, default=50000)
    p.add_argument("--out")
    p.set_defaults(func=cmd_reference)
    return ap


def main(argv=None):
    logging.basicConfig(level=logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except UnrecoverableElementError as exc:
        print(f"unrecoverable element: {exc} (element={exc.element}, "
              f"step={exc.step}, stage={exc.stage})", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
