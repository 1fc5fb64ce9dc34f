"""Command-line front end: halfscat <command> [options].

Structured data is JSON, plottable series are CSV. Errors from the numerical
modules exit with status 1 and a one-line JSON message on stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from typing import Optional, Sequence

import numpy as np

from . import dressing, phasemap, recover, scattering, smap, spectra
from .config import RunConfig, apply_tolerances, load_config
from .errors import ScatteringError
from .potential import Potential

_EXPR_NAMES = {name: getattr(np, name) for name in (
    "sin", "cos", "tan", "exp", "log", "sqrt", "abs", "pi", "sinh", "cosh", "tanh", "where", "clip",
)}


def _potential(args, cfg: RunConfig) -> Potential:
    if args.potential:
        with open(args.potential) as fh:
            return Potential.from_json(fh.read())
    if args.expr is not None:
        x = np.linspace(0.0, 1.0, cfg.grid_n)
        vals = eval(args.expr, {"__builtins__": {}}, dict(_EXPR_NAMES, x=x, np=np))
        return Potential(np.broadcast_to(np.asarray(vals, dtype=float), x.shape))
    raise SystemExit("a potential is required: --potential FILE or --expr 'numpy expression in x'")


def _write(text: str, path: Optional[str]):
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(v)) if not isinstance(v, (int, np.integer)) else int(v) for v in row])
    return buf.getvalue()


def _potential_csv(q: Potential) -> str:
    return _csv(["x", "q"], zip(q.nodes, q.values))


# ------------------------------------------------------------------ commands


def cmd_forward(args, cfg):
    q = _potential(args, cfg)
    ks = np.linspace(args.kmin, args.kmax, args.nk)
    psi = scattering.jost_values(q, ks, cfg.ode_steps)
    s = scattering.smatrix(q, ks, cfg.ode_steps)
    xi = scattering.phase_shift(q, ks, cfg.ode_steps)
    rows = zip(ks, psi.real, psi.imag, s.real, s.imag, xi)
    _write(_csv(["k", "re_psi", "im_psi", "re_S", "im_S", "xi"], rows), args.out)


def cmd_spectrum(args, cfg):
    q = _potential(args, cfg)
    ev = spectra.eigenlist(q, args.nmax or cfg.nmax, cfg.ode_steps)
    n = np.arange(1, ev.nmax + 1)
    _write(_csv(["n", "mu", "tau"], zip(n, ev.mu, ev.tau)), args.out)


def cmd_phase_map(args, cfg):
    q = _potential(args, cfg)
    nmax = args.nmax or cfg.nmax
    if args.even:
        data = phasemap.extract_even_data(q, nmax, cfg.ode_steps)
    else:
        data = phasemap.extract_data(q, nmax, cfg.ode_steps)
    _write(data.to_json() + "\n", args.out)


def _read_data(path):
    with open(path) as fh:
        return phasemap.SpectralData.from_json(fh.read())


def _emit_potential(q: Potential, args):
    if args.out_potential:
        with open(args.out_potential, "w") as fh:
            fh.write(q.to_json())
    _write(_potential_csv(q), args.out)


def cmd_invert(args, cfg):
    _emit_potential(recover.recover_generic(_read_data(args.data), cfg.grid_n), args)


def cmd_invert_even(args, cfg):
    _emit_potential(recover.recover_even(_read_data(args.data), cfg.grid_n), args)


def cmd_dress(args, cfg):
    q = _potential(args, cfg)
    if args.support_preserving:
        params = dressing.DressingParams(args.kstar_r, None, dressing.SUPPORT_PRESERVING)
    else:
        if args.c is None:
            raise SystemExit("dress needs --c or --support-preserving")
        params = dressing.DressingParams(args.kstar_r, args.c, dressing.EXPLICIT)
    if args.support_preserving:
        # runs the classification and the leak audit before sampling
        dressing.dress_support_preserving(q, params.kstar, cfg.ode_steps)
    d = dressing.dress(q, params, args.xmax, cfg.ode_steps)
    _write(_csv(["x", "q_star"], zip(d.x, d.q_star)), args.out)


def _read_samples(path):
    with open(path) as fh:
        return smap.SMatrixSamples.from_json(fh.read())


def cmd_linearize(args, cfg):
    smp = _read_samples(args.samples)
    s0, s = smp.targets()
    q = smap.linearized_inverse(s0, s, smp.rs, args.nmax, cfg.grid_n)
    _write(q.to_json() + "\n", args.out)


def cmd_newton_invert(args, cfg):
    smp = _read_samples(args.samples)
    res = smap.newton_invert(smp, iters=args.iters, tol=cfg.tol("newton"), grid_n=cfg.grid_n,
                             steps=cfg.ode_steps)
    _write(res.potential.to_json() + "\n", args.out)
    print(json.dumps({"residual": res.residual, "iterations": res.iterations,
                      "converged": res.converged}), file=sys.stderr)


def cmd_samples(args, cfg):
    q = _potential(args, cfg)
    n = np.arange(1, (args.nmax or cfg.nmax) + 1)
    rs = np.pi * n / 2 + args.shift * (-1.0) ** n
    _write(smap.SMatrixSamples.from_potential(q, rs, cfg.ode_steps).to_json() + "\n", args.out)


def roundtrip(q: Potential, nmax: int, cfg: RunConfig) -> dict:
    """extract_data -> recover_generic -> re-extract; max |p_n(re) - p_n(in)|."""
    data = phasemap.extract_data(q, nmax, cfg.ode_steps)
    q_rec = recover.recover_generic(data, cfg.grid_n)
    p_re = phasemap.solve_pn(q_rec, nmax, cfg.ode_steps)
    p_in = data.p(np.arange(1, nmax + 1))
    return {"nmax": nmax, "max_p_discrepancy": float(np.max(np.abs(p_re - p_in))),
            "sigma0_in": data.sigma0, "sigma0_out": q_rec.sigma0}


def cmd_roundtrip(args, cfg):
    report = roundtrip(_potential(args, cfg), args.nmax or cfg.nmax, cfg)
    _write(json.dumps(report) + "\n", args.out)


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="halfscat", description=__doc__.splitlines()[0])
    ap.add_argument("--config", help="JSON file overriding RunConfig defaults")
    sub = ap.add_subparsers(dest="command", required=True)

    def with_q(p):
        g = p.add_mutually_exclusive_group()
        g.add_argument("--potential", help="Potential JSON file")
        g.add_argument("--expr", help="numpy expression in x on [0,1], e.g. '0.5*exp(-30*(x-0.5)**2)'")
        return p

    def with_out(p):
        p.add_argument("--out", help="output file (default stdout)")
        return p

    p = with_out(with_q(sub.add_parser("forward", help="psi, S and xi on a k grid (CSV)")))
    p.add_argument("--kmin", type=float, default=0.5)
    p.add_argument("--kmax", type=float, default=50.0)
    p.add_argument("--nk", type=int, default=200)
    p.set_defaults(func=cmd_forward)

    p = with_out(with_q(sub.add_parser("spectrum", help="Dirichlet and mixed eigenvalues (CSV)")))
    p.add_argument("--nmax", type=int)
    p.set_defaults(func=cmd_spectrum)

    p = with_out(with_q(sub.add_parser("phase-map", help="spectral data p_n (JSON)")))
    p.add_argument("--nmax", type=int)
    p.add_argument("--even", action="store_true")
    p.set_defaults(func=cmd_phase_map)

    for name, fn in (("invert", cmd_invert), ("invert-even", cmd_invert_even)):
        p = with_out(sub.add_parser(name, help="reconstruct q from spectral data (CSV x,q)"))
        p.add_argument("--data", required=True, help="SpectralData JSON")
        p.add_argument("--out-potential", help="also write Potential JSON here")
        p.set_defaults(func=fn)

    p = with_out(with_q(sub.add_parser("dress", help="insert a bound state at k* = i r (CSV x,q*)")))
    p.add_argument("--kstar-r", type=float, required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--c", type=float)
    g.add_argument("--support-preserving", action="store_true")
    p.add_argument("--xmax", type=float, default=2.0)
    p.set_defaults(func=cmd_dress)

    p = with_out(sub.add_parser("linearize", help="first-order inverse of S samples (Potential JSON)"))
    p.add_argument("--samples", required=True)
    p.add_argument("--nmax", type=int)
    p.set_defaults(func=cmd_linearize)

    p = with_out(sub.add_parser("newton-invert", help="Newton inverse of S samples (Potential JSON)"))
    p.add_argument("--samples", required=True)
    p.add_argument("--iters", type=int, default=20)
    p.set_defaults(func=cmd_newton_invert)

    p = with_out(with_q(sub.add_parser("samples", help="S samples at r_n = pi n/2 + shift (-1)^n (JSON)")))
    p.add_argument("--nmax", type=int)
    p.add_argument("--shift", type=float, default=0.1)
    p.set_defaults(func=cmd_samples)

    p = with_out(with_q(sub.add_parser("roundtrip", help="extract, recover, re-extract (JSON report)")))
    p.add_argument("--nmax", type=int)
    p.set_defaults(func=cmd_roundtrip)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        apply_tolerances(cfg)
        args.func(args, cfg)
    except ScatteringError as exc:
        msg = {"error": exc.name, "module": exc.module, "message": str(exc),
               "details": {k: repr(v) for k, v in exc.details.items()}}
        print(json.dumps(msg), file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(json.dumps({"error": type(exc).__name__, "module": "cli", "message": str(exc)}), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
