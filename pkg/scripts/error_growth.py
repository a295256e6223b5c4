#!/usr/bin/env python3
"""Error growth along a single long trajectory, sampled at eight times.

Useful for eyeballing whether the error accumulates linearly or saturates
before the 1/eps^k horizon.  ``--dry-run`` prints the equivalent CLI call.
"""
import argparse
import sys

from lowreg_nlse.cli import main

PRESETS = {
    "quad-square": dict(scheme="sli2", eps=0.1, T=1.0),
    "quad-modsq": dict(scheme="sli2", eps=0.1, T=1.0),
    "cubic": dict(scheme="nrsli2", eps=0.25, T=0.5),
}


def build_argv(args) -> list[str]:
    preset = PRESETS[args.equation]
    eps = preset["eps"]
    horizon = preset["T"] / (eps * eps if args.equation == "cubic" else eps)
    samples = ",".join(f"{horizon * (j + 1) / 8:g}" for j in range(8))
    return [
        "error-vs-time",
        "--equation", args.equation,
        "--scheme", args.scheme or preset["scheme"],
        "--eps", str(eps),
        "--tau", "0.05",
        "--T", str(preset["T"]),
        "--sample-times", samples,
        "--theta", str(args.theta),
        "--seed", str(args.seed),
        "--modes", "128",
        "--ref-tau", "5e-4",
        "--out", args.out,
    ]


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--equation", choices=sorted(PRESETS), default="quad-square")
    ap.add_argument("--scheme", default=None)
    ap.add_argument("--theta", type=float, default=5.0)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="error_growth.csv")
    ap.add_argument("--dry-run", action="store_true")
    ns = ap.parse_args()
    argv = build_argv(ns)
    if ns.dry_run:
        print("lowreg-nlse " + " ".join(argv))
        sys.exit(0)
    sys.exit(main(argv))
