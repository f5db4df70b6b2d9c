#!/usr/bin/env python3
"""Reproduce the free-stream error table and the vortex convergence table.

Free-stream errors (seconds):
    python scripts/benchmark_tables.py free-stream

Vortex convergence (hours at full scale; pass --max-n to shrink):
    python scripts/benchmark_tables.py vortex --max-n 81
"""

import argparse
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from fpcurv.harness import run_free_stream, run_vortex  # noqa: E402


def free_stream_table():
    rows = [("weno5", False, 6), ("weno7", False, 6),
            ("weno5", True, 6), ("weno7", True, 6), ("weno7", True, 8)]
    print(f"{'Method':<16} {'wavy L2':>12} {'wavy Linf':>12} {'rand L2':>12} {'rand Linf':>12}")
    for scheme, fp, order in rows:
        rep = run_free_stream(scheme, fp=fp, metric_order=order)
        w = rep.norms["wavy.v"]
        r = rep.norms["random.v"]
        print(f"{rep.scheme_label:<16} {w[0]:>12.2e} {w[1]:>12.2e} {r[0]:>12.2e} {r[1]:>12.2e}")


def vortex_table(max_n):
    ladder = tuple(n for n in (21, 41, 81, 161, 321) if n <= max_n)
    rows = [("linear_upwind5", 6), ("weno5", 2), ("weno5", 4), ("weno5", 6),
            ("weno7", 4), ("weno7", 8)]
    for scheme, order in rows:
        rep = run_vortex(scheme, fp=True, metric_order=order, resolutions=ladder)
        print(f"\n{rep.scheme_label}")
        print(f"{'N':>6} {'L2':>12} {'rate':>7} {'Linf':>12} {'rate':>7}")
        for n, l2, r2, linf, rinf in rep.convergence:
            r2s = f"{r2:7.2f}" if r2 is not None else "      -"
            ris = f"{rinf:7.2f}" if rinf is not None else "      -"
            print(f"{n:>6} {l2:>12.2e} {r2s} {linf:>12.2e} {ris}")


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("table", choices=("free-stream", "vortex"))
    p.add_argument("--max-n", type=int, default=321)
    args = p.parse_args()
    if args.table == "free-stream":
        free_stream_table()
    else:
        vortex_table(args.max_n)


if __name__ == "__main__":
    main()
