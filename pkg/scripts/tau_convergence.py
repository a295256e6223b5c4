#!/usr/bin/env python3
"""Step-size convergence at the long-time horizon, desk scale.

Defaults reproduce the headline tau-sweeps on a single core in a few minutes:
quadratic equations at eps = 0.1 up to t = 1/eps, the cubic one at eps = 0.25
up to t = 0.5/eps^2, smooth (theta = 5) data, N = 128 modes.  Pass
``--dry-run`` to print the equivalent lowreg-nlse invocation instead of
running it.
"""
import argparse
import sys

from lowreg_nlse.cli import main

PRESETS = {
    "quad-square": dict(schemes="li1,sli2", eps="0.1", T="1.0"),
    "quad-modsq": dict(schemes="li1,sli2", eps="0.1", T="1.0"),
    "cubic": dict(schemes="nrli1,nrsli2", eps="0.25", T="0.5"),
}


def build_argv(args) -> list[str]:
    preset = PRESETS[args.equation]
    return [
        "sweep-tau",
        "--equation", args.equation,
        "--scheme", args.schemes or preset["schemes"],
        "--eps", preset["eps"],
        "--T", preset["T"],
        "--tau-list", "0.1,0.05,0.025,0.0125",
        "--theta", str(args.theta),
        "--seed", str(args.seed),
        "--modes", "128",
        "--ref-tau", "1.25e-4",
        "--jobs", str(args.jobs),
        "--out", args.out,
    ]


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--equation", choices=sorted(PRESETS), default="quad-square")
    ap.add_argument("--schemes", default=None, help="comma list (default: preset)")
    ap.add_argument("--theta", type=float, default=5.0)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=4)
    ap.add_argument("--out", default="tau_convergence.csv")
    ap.add_argument("--dry-run", action="store_true")
    ns = ap.parse_args()
    argv = build_argv(ns)
    if ns.dry_run:
        print("lowreg-nlse " + " ".join(argv))
        sys.exit(0)
    sys.exit(main(argv))
