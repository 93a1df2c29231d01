#!/usr/bin/env python3
"""Post-selection probability against n for smooth coefficient profiles.

Compares the measured success probability of the Taylor QLT at n = 1..4 with
its large-N limit evaluated by Gauss-Legendre quadrature. The default profile
f = g = 1/2, h = 1 is the one used by the acceptance suite; --profile ramp
uses f(x) = x, g = 1, h = 1 whose limit is not 1.

    python scripts/success_probability_trend.py --profile ramp
"""
import argparse
import csv
from pathlib import Path

import numpy as np

from qlaplace.apps import success_probability_limit, success_probability_sequence

PROFILES = {
    "flat": (lambda x: 0.5 + 0 * np.asarray(x, float), lambda y: 0.5 + 0 * np.asarray(y, float)),
    "ramp": (lambda x: np.asarray(x, float), lambda y: 1.0 + 0 * np.asarray(y, float)),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--profile", choices=sorted(PROFILES), default="flat")
    ap.add_argument("--ns", type=int, nargs="+", default=[1, 2, 3, 4])
    ap.add_argument("--eps", type=float, default=1e-2)
    ap.add_argument("--out", type=Path, default=Path("out/success"))
    args = ap.parse_args()

    f, g = PROFILES[args.profile]
    h = lambda y: 1.0 + 0 * np.asarray(y, float)
    limit = success_probability_limit(f, g, h)
    seq = success_probability_sequence(f, g, h, args.ns, eps=args.eps)
    print(f"limit = {limit:.6f}")
    for n, P in zip(args.ns, seq):
        print(f"n={n}  P={P:.6f}  |P - limit|/limit={abs(P - limit) / limit:.3e}")

    args.out.mkdir(parents=True, exist_ok=True)
    with (args.out / f"trend_{args.profile}.csv").open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(("n", "P", "limit"))
        w.writerows((n, P, limit) for n, P in zip(args.ns, seq))


if __name__ == "__main__":
    main()
