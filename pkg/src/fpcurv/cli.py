"""Command-line entry point.

Exit codes: 0 success (all configured thresholds met), 1 threshold failure,
2 configuration error, 3 numerical failure (invalid state / folded grid).
"""

import argparse
import os
import sys

from . import harness
from .config import CASES, RunConfig, echo_config, parse_config
from .errors import ConfigError, FpcurvError, GridFoldError, InvalidStateError

CASE_HELP = {
    "free_stream": "uniform Ma 0.5 flow on wavy and random 21x21 grids",
    "vortex": "isentropic vortex convergence ladder on wavy grids",
    "double_mach": "double Mach reflection on a randomized grid",
    "cylinder": "Ma 2 flow past a cylinder, marched to steady state",
    "scl_check": "3D surface-conservation-law residuals, matched and mismatched orders",
}


def build_parser():
    p = argparse.ArgumentParser(
        prog="fpcurv",
        description="Free-stream preserving upwind FD Euler solver on curvilinear grids")
    p.add_argument("--config", help="config file (key = value with [sections])")
    p.add_argument("--case", choices=CASES)
    p.add_argument("--scheme", choices=("linear_upwind5", "weno5", "weno7"))
    fp = p.add_mutually_exclusive_group()
    fp.add_argument("--fp", dest="fp", action="store_true", default=None,
                    help="free-stream preserving reformulated dissipation (default)")
    fp.add_argument("--no-fp", dest="fp", action="store_false", default=None)
    p.add_argument("--metric-order", type=int, choices=(2, 4, 6, 8))
    p.add_argument("--splitting", choices=("local_lf", "global_lf"))
    p.add_argument("--grid", metavar="NxM", help="grid resolution, e.g. 481x121")
    p.add_argument("--resolutions", metavar="N1,N2,...", help="vortex ladder resolutions")
    p.add_argument("--randomness", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--dt", type=float)
    p.add_argument("--cfl", type=float)
    p.add_argument("--t-end", type=float)
    p.add_argument("--out", help="output directory")
    p.add_argument("--threads", type=int,
                   default=None, help="worker threads (default: env FPCURV_THREADS)")
    p.add_argument("--paper-resolution", action="store_true", default=None)
    p.add_argument("--overwrite", action="store_true", default=None)
    p.add_argument("--list-cases", action="store_true")
    p.add_argument("--print-defaults", action="store_true")
    return p


def config_from_args(args):
    overrides = {
        "case": args.case,
        "scheme": args.scheme,
        "fp": args.fp,
        "metric_order": args.metric_order,
        "splitting": args.splitting,
        "randomness": args.randomness,
        "seed": args.seed,
        "dt": args.dt,
        "cfl": args.cfl,
        "t_end": args.t_end,
        "out": args.out,
        "paper_resolution": args.paper_resolution,
        "overwrite": args.overwrite,
    }
    if args.grid is not None:
        try:
            nx, ny = (int(v) for v in args.grid.lower().split("x"))
        except ValueError:
            raise ConfigError(f"--grid expects NxM, got {args.grid!r}")
        overrides["nx"], overrides["ny"] = nx, ny
    if args.resolutions is not None:
        try:
            overrides["resolutions"] = tuple(
                int(v) for v in args.resolutions.replace(",", " ").split())
        except ValueError:
            raise ConfigError(f"--resolutions expects integers, got {args.resolutions!r}")
    if args.threads is not None:
        overrides["threads"] = args.threads
    elif os.environ.get("FPCURV_THREADS"):
        try:
            overrides["threads"] = int(os.environ["FPCURV_THREADS"])
        except ValueError:
            raise ConfigError("FPCURV_THREADS must be an integer")
    return parse_config(path=args.config, overrides=overrides)


def _apply_threads(cfg):
    if cfg.threads > 0:
        import numba

        numba.set_num_threads(max(1, min(cfg.threads, numba.config.NUMBA_NUM_THREADS)))


def _resolve_splitting(cfg, case_default):
    return case_default if cfg.splitting == "case_default" else cfg.splitting


def dispatch(cfg):
    """Run the configured case; returns the CaseReport."""
    out = cfg.out
    os.makedirs(out, exist_ok=True)
    marker = os.path.join(out, f"{cfg.case}.report.txt")
    if os.path.exists(marker) and not cfg.overwrite:
        raise ConfigError(f"{marker} exists; pass --overwrite to replace it")
    _apply_threads(cfg)
    with open(os.path.join(out, "config.echo"), "w") as fh:
        fh.write(echo_config(cfg))

    if cfg.case == "free_stream":
        return harness.run_free_stream(
            scheme=cfg.scheme, fp=cfg.fp, metric_order=cfg.metric_order,
            n=cfg.nx or 21, dt=cfg.dt or 0.2, t_end=cfg.t_end or 20.0,
            seed=cfg.seed, randomness=cfg.randomness, out_dir=out,
            splitting=_resolve_splitting(cfg, "local_lf"))
    if cfg.case == "vortex":
        return harness.run_vortex(
            scheme=cfg.scheme, fp=cfg.fp, metric_order=cfg.metric_order,
            resolutions=cfg.resolutions or (21, 41, 81, 161, 321),
            t_end=cfg.t_end or 40.0, out_dir=out,
            splitting=_resolve_splitting(cfg, "local_lf"))
    if cfg.case == "double_mach":
        return harness.run_double_mach(
            scheme=cfg.scheme, fp=cfg.fp, metric_order=cfg.metric_order,
            nx=cfg.nx or 481, ny=cfg.ny or 121, randomness=cfg.randomness,
            seed=cfg.seed, cfl=cfg.cfl or 0.6, t_end=cfg.t_end or 0.2,
            paper_resolution=cfg.paper_resolution, out_dir=out,
            splitting=_resolve_splitting(cfg, "global_lf"))
    if cfg.case == "cylinder":
        return harness.run_supersonic_cylinder(
            scheme=cfg.scheme, fp=cfg.fp, metric_order=cfg.metric_order,
            imax=cfg.nx or 61, jmax=cfg.ny or 81, perturb=cfg.randomness,
            seed=cfg.seed, dt=cfg.dt or 0.005, out_dir=out,
            splitting=_resolve_splitting(cfg, "global_lf"))
    if cfg.case == "scl_check":
        return harness.run_scl_check(
            n=cfg.nx or 10, amplitude_fraction=cfg.randomness, seed=cfg.seed,
            out_dir=out)
    raise ConfigError(f"unhandled case {cfg.case!r}")


def _print_summary(report):
    print(f"case: {report.case}  scheme: {report.scheme_label}  "
          f"wall: {report.wall_time:.1f}s  stable: {report.stable}  passed: {report.passed}")
    for k in sorted(report.norms):
        l2, linf = report.norms[k]
        print(f"  {k:<16} L2 = {l2:.6e}   Linf = {linf:.6e}")
    if report.convergence:
        print(f"  {'N':>6} {'L2':>14} {'rate':>7} {'Linf':>14} {'rate':>7}")
        for n, l2, r2, linf, rinf in report.convergence:
            r2s = f"{r2:7.2f}" if r2 is not None else "      -"
            ris = f"{rinf:7.2f}" if rinf is not None else "      -"
            print(f"  {n:>6} {l2:>14.4e} {r2s} {linf:>14.4e} {ris}")
    for k in sorted(report.extras):
        print(f"  {k} = {report.extras[k]}")
    for fail in report.failures:
        print(f"  FAILED: {fail}")


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.list_cases:
        for case in CASES:
            print(f"{case:<14} {CASE_HELP[case]}")
        return 0
    if args.print_defaults:
        print(echo_config(RunConfig()), end="")
        return 0
    try:
        cfg = config_from_args(args)
        if args.case is None and args.config is None:
            raise ConfigError("no case selected: pass --case or --config")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        report = dispatch(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (GridFoldError, InvalidStateError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except FpcurvError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    _print_summary(report)
    if not report.stable:
        print("numerical failure: run aborted before completion (see report)",
              file=sys.stderr)
        return 3
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
