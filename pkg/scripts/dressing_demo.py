"""Insert a bound state into a constant well at an engineered zero of psi.

For q = -c with c < 1 the Jost function has a zero at k = -i r. Dressing with
the special constant c* keeps the potential inside [0, 1]; any other constant
leaves an exponential tail. Writes x, q*(x) for both choices as CSV.
"""

import argparse
import csv
import math
import sys

from scipy.optimize import brentq

from halfscat.dressing import DressingParams, classify_kstar, cstar, dress, find_antibound_zero
from halfscat.potential import Potential
from halfscat.scattering import bound_states


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--c", type=float, default=0.5, help="well depth, 0 < c < 1")
    ap.add_argument("--factor", type=float, default=2.0, help="multiple of c* for the leaking dressing")
    ap.add_argument("--xmax", type=float, default=4.0)
    ap.add_argument("--out", default="-")
    args = ap.parse_args()

    kap = brentq(lambda k: k / math.sinh(k) - math.sqrt(args.c), 1e-9, 50)
    r0 = math.sqrt(kap**2 + args.c)
    q = Potential.constant(-args.c)
    r = find_antibound_zero(q, 0.9 * r0, 1.1 * r0)
    cs = cstar(q, 1j * r)
    print(f"r = {r:.12f}  class = {classify_kstar(q, 1j * r, 5.0).value}  c* = {cs:.10g}", file=sys.stderr)

    d1 = dress(q, DressingParams(r, cs), args.xmax)
    d2 = dress(q, DressingParams(r, args.factor * cs), args.xmax)
    leak = max(abs(v) for x, v in zip(d1.x, d1.q_o) if x > 1)
    print(f"leak beyond x = 1 with c*: {leak:.2e}", file=sys.stderr)
    qs, _ = d1.rescaled()
    print(f"bound states of the dressed well: {bound_states(d1.restrict()).ks}", file=sys.stderr)

    fh = sys.stdout if args.out == "-" else open(args.out, "w", newline="")
    w = csv.writer(fh)
    w.writerow(["x", "q_star_cstar", f"q_star_{args.factor:g}cstar"])
    for i in range(0, d1.x.size, 16):
        w.writerow([f"{d1.x[i]:.6f}", f"{d1.q_star[i]:.10e}", f"{d2.q_star[i]:.10e}"])
    if fh is not sys.stdout:
        fh.close()


if __name__ == "__main__":
    main()
