"""Phase shifts and bound-state data for a few reference potentials (CSV on stdout)."""

import argparse
import csv
import sys

import numpy as np

from halfscat.potential import Potential
from halfscat.scattering import bound_states, phase_shift

POTENTIALS = {
    "bump": lambda x: 0.5 * np.exp(-30 * (x - 0.4) ** 2) + 0.2 * x,
    "well5": lambda x: -5.0 + 0 * x,
    "well30": lambda x: -30.0 + 0 * x,
    "wave": lambda x: 3.0 * np.cos(2 * np.pi * x) - 0.5 * x,
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--kmin", type=float, default=0.05)
    ap.add_argument("--kmax", type=float, default=40.0)
    ap.add_argument("--nk", type=int, default=400)
    args = ap.parse_args()

    ks = np.linspace(args.kmin, args.kmax, args.nk)
    cols = {}
    for name, f in POTENTIALS.items():
        q = Potential.from_function(f)
        cols[name] = phase_shift(q, ks)
        bs = bound_states(q)
        print(f"{name}: {bs.m} bound states, energies {np.round(bs.energies, 6)}, "
              f"xi(kmin)/pi = {cols[name][0] / np.pi:.4f}", file=sys.stderr)
    w = csv.writer(sys.stdout)
    w.writerow(["k"] + list(cols))
    for i, k in enumerate(ks):
        w.writerow([f"{k:.6f}"] + [f"{cols[n][i]:.12e}" for n in cols])


if __name__ == "__main__":
    main()
