"""Empirical basin of the Newton inversion of discrete S-matrix samples.

Bumps of increasing height are sampled at r_n = pi n/2 + shift (-1)^n and
inverted from q = 0. Reports iterations, final residual and L2 error.
"""

import argparse
import time

import numpy as np

from halfscat.errors import ScatteringError
from halfscat.potential import Potential
from halfscat.smap import SMatrixSamples, newton_invert


def bump(height, center, width):
    return Potential.from_function(lambda x: height * np.exp(-((x - center) / width) ** 2)
                                   * np.exp(4.0 - 1.0 / np.clip(x * (1 - x), 1e-300, None)))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nmax", type=int, default=64)
    ap.add_argument("--shift", type=float, default=0.1)
    ap.add_argument("--heights", type=float, nargs="+", default=[0.5, 2.0, 5.0, 10.0, 20.0, 40.0])
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    n = np.arange(1, args.nmax + 1)
    rs = np.pi * n / 2 + args.shift * (-1.0) ** n
    print("height  center  iters  residual   L2_error   seconds")
    for h in args.heights:
        center = float(rng.uniform(0.3, 0.7))
        q = bump(h, center, 0.3)
        t = time.perf_counter()
        try:
            res = newton_invert(SMatrixSamples.from_potential(q, rs), iters=30)
            err = (res.potential - q).l2_norm()
            print(f"{h:6.1f}  {center:6.3f}  {res.iterations:5d}  {res.residual:9.2e}  {err:9.2e}"
                  f"  {time.perf_counter() - t:7.2f}")
        except ScatteringError as exc:
            print(f"{h:6.1f}  {center:6.3f}  failed: {exc.name}: {exc}")


if __name__ == "__main__":
    main()
