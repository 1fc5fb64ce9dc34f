"""Discrete S-matrix map q -> (s_0, s_n), its gradient, linearization and Newton inversion.

s_0 = mean(q) and s_n = q_0 - i r_n (S(r_n, q) - 1) for a sequence r_n with
|r_n - pi n / 2| < pi / 8.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.integrate import simpson

from .errors import IllConditioned, NearZeroJost, NoConvergence, SpacingViolation
from .ode import DEFAULT_STEPS, integrate_phi
from .potential import DEFAULT_GRID_N, Potential, mean
from .scattering import NEAR_ZERO_JOST, jost_values
from .spectra import dirichlet_eigenvalues, mixed_eigenvalues

SPACING = np.pi / 8
TIKHONOV = 1e-12
COND_MAX = 1e10


def check_spacing(rs) -> np.ndarray:
    rs = np.asarray(rs, dtype=float)
    n = np.arange(1, rs.size + 1)
    bad = np.abs(rs - np.pi * n / 2) >= SPACING
    if np.any(bad) or np.any(rs <= 0):
        i = int(np.argmax(bad))
        raise SpacingViolation(f"r_{i + 1} = {rs[i]:.6g} is not within pi/8 of {np.pi * (i + 1) / 2:.6g}")
    return rs


@dataclass(frozen=True)
class SMatrixSamples:
    rs: np.ndarray
    svals: np.ndarray
    s0: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "rs", check_spacing(self.rs))
        svals = np.asarray(self.svals, dtype=complex)
        if svals.shape != self.rs.shape:
            raise ValueError("rs and svals must have equal length")
        object.__setattr__(self, "svals", svals)

    @classmethod
    def from_potential(cls, q: Potential, rs, steps: int = DEFAULT_STEPS) -> "SMatrixSamples":
        rs = check_spacing(rs)
        return cls(rs, _smatrix(q, rs, steps), mean(q))

    def targets(self, s0: Optional[float] = None):
        """(s_0, s_n) built from the S samples."""
        s0 = self.s0 if s0 is None else s0
        if s0 is None:
            raise ValueError("s_0 = mean(q) must be supplied")
        return float(s0), s0 - 1j * self.rs * (self.svals - 1.0)

    def to_dict(self) -> dict:
        s0, s = self.targets()
        return {"rs": self.rs.tolist(), "s_re": s.real.tolist(), "s_im": s.imag.tolist(), "s0": s0}

    @classmethod
    def from_dict(cls, d: dict) -> "SMatrixSamples":
        rs = np.asarray(d["rs"], dtype=float)
        s = np.asarray(d["s_re"], dtype=float) + 1j * np.asarray(d["s_im"], dtype=float)
        s0 = float(d["s0"])
        # invert s_n = s0 - i r (S - 1)
        svals = 1.0 + (s - s0) / (-1j * rs)
        return cls(rs, svals, s0)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "SMatrixSamples":
        return cls.from_dict(json.loads(text))


def _smatrix(q, rs, steps):
    both = jost_values(q, np.concatenate([rs, -rs]), steps)
    psi, psim = both[: rs.size], both[rs.size:]
    if np.any(np.abs(psi) < NEAR_ZERO_JOST):
        raise NearZeroJost("|psi(r_n)| below threshold")
    return psim / psi


def psi_map(q: Potential, rs, steps: int = DEFAULT_STEPS):
    """(s_0, s) with s_n = q_0 - i r_n (S(r_n) - 1)."""
    rs = check_spacing(rs)
    q0 = mean(q)
    return q0, q0 - 1j * rs * (_smatrix(q, rs, steps) - 1.0)


def _kernel_path(q, r, steps):
    w = integrate_phi(q, r, steps)
    y, dy = w.at_end()
    psi = np.exp(1j * r) * (dy - 1j * r * y)
    if abs(psi) < NEAR_ZERO_JOST:
        raise NearZeroJost("psi(r) vanishes", r=r)
    return w.x, 1.0 - 2.0 * r * r * w.y.real**2 / psi**2


def psi_gradient(q: Potential, r: float, steps: int = DEFAULT_STEPS) -> np.ndarray:
    """Kernel 1 - 2 r^2 phi(x, r)^2 / psi(r)^2 sampled on q's nodes (complex)."""
    x, k = _kernel_path(q, r, steps)
    return np.interp(q.nodes, x, k.real) + 1j * np.interp(q.nodes, x, k.imag)


def directional_derivative(q: Potential, r: float, h: Potential, steps: int = DEFAULT_STEPS) -> complex:
    """<kernel, h> by Simpson on the integration grid; equals d s_n(q + t h)/dt at t = 0."""
    x, k = _kernel_path(q, r, steps)
    return complex(simpson(k * h(x), x=x))


def smatrix_gradient(q: Potential, k: float, steps: int = DEFAULT_STEPS) -> np.ndarray:
    """dS/dq(x) = -2ik phi^2 / psi^2 on q's nodes."""
    w = integrate_phi(q, k, steps)
    y, dy = w.at_end()
    psi = np.exp(1j * k) * (dy - 1j * k * y)
    phi = np.interp(q.nodes, w.x, w.y.real)
    return -2j * k * phi**2 / psi**2


def _weights(grid_n):
    w = np.full(grid_n, 1.0 / (grid_n - 1))
    w[[0, -1]] *= 0.5
    return w


def cosine_gram(rs) -> np.ndarray:
    """Exact Gram matrix of {1, cos 2 r_n x} on [0, 1]."""
    w = np.concatenate([[0.0], 2.0 * np.asarray(rs, dtype=float)])
    a = w[:, None] + w[None, :]
    b = w[:, None] - w[None, :]
    return 0.5 * (np.sinc(a / np.pi) + np.sinc(b / np.pi))


def _solve_normal(G, rhs, what):
    cond = np.linalg.cond(G)
    if not np.isfinite(cond) or cond > COND_MAX:
        raise IllConditioned(f"{what}: Gram condition {cond:.3g} exceeds {COND_MAX:.0e}", cond=cond)
    tau = TIKHONOV * max(1.0, float(np.max(np.abs(np.diag(G)))))
    return np.linalg.solve(G + tau * np.eye(G.shape[0]), rhs)


def linearized_inverse(s0: float, s: Sequence[complex], rs, nmax: Optional[int] = None,
                       grid_n: int = DEFAULT_GRID_N) -> Potential:
    """First-order inverse: least-squares fit of q in span{1, cos 2 r_n x}, n <= nmax.

    Uses s_0 = int q and Re s_n ~ int q cos 2 r_n x.
    """
    rs = check_spacing(rs)
    s = np.asarray(s)
    nmax = rs.size if nmax is None else min(nmax, rs.size)
    rs, s = rs[:nmax], s[:nmax]
    coef = _solve_normal(cosine_gram(rs), np.concatenate([[s0], np.real(s)]), "linearized_inverse")
    x = np.linspace(0.0, 1.0, grid_n)
    basis = np.vstack([np.ones_like(x), np.cos(2.0 * rs[:, None] * x[None, :])])
    return Potential(coef @ basis)


@dataclass
class NewtonResult:
    potential: Potential
    residual: float
    iterations: int
    converged: bool
    history: list = field(default_factory=list)


def _stack(s0_err, s_err):
    return np.concatenate([[s0_err], s_err.real, s_err.imag])


def newton_invert(samples: SMatrixSamples, s0: Optional[float] = None, iters: int = 20,
                  tol: float = 1e-8, grid_n: int = DEFAULT_GRID_N, steps: int = DEFAULT_STEPS,
                  initial: Optional[Potential] = None) -> NewtonResult:
    """Gauss-Newton on the cosine coefficients of q (basis cos(pi m x), m = 0..N).

    Each step solves the Tikhonov-floored normal equations of the real and
    imaginary parts of the gradient system. Stops when the residual drops
    below tol or when the step stalls at the least-squares optimum.
    """
    t0, target = samples.targets(s0)
    rs = samples.rs
    nb = rs.size + 1
    x = np.linspace(0.0, 1.0, grid_n)
    basis = np.cos(np.pi * np.arange(nb)[:, None] * x[None, :])
    wts = _weights(grid_n)
    if initial is None:
        coef = np.zeros(nb)
    else:
        coef = np.linalg.lstsq(basis.T, initial.values, rcond=None)[0]
    best = None
    history = []
    for it in range(iters + 1):
        q = Potential(coef @ basis)
        q0, s = psi_map(q, rs, steps)
        R = _stack(q0 - t0, s - target)
        res = float(np.linalg.norm(R))
        history.append(res)
        if best is None or res < best[1]:
            best = (q, res, it)
        if res < tol:
            return NewtonResult(q, res, it, True, history)
        if it == iters:
            break
        K = np.array([psi_gradient(q, r, steps) for r in rs]) * wts
        Jc = K @ basis.T
        J = np.vstack([(wts @ basis.T)[None, :], Jc.real, Jc.imag])
        step = _solve_normal(J.T @ J, -J.T @ R, "newton_invert")
        coef = coef + step
        if np.linalg.norm(step) < 1e-12 * (1.0 + np.linalg.norm(coef)):
            q = Potential(coef @ basis)
            q0, s = psi_map(q, rs, steps)
            res = float(np.linalg.norm(_stack(q0 - t0, s - target)))
            history.append(res)
            # stalled at the least-squares optimum of the truncated basis
            return NewtonResult(q, res, it + 1, res < tol, history)
    q, res, it = best
    raise NoConvergence(f"residual {res:.3g} after {iters} iterations", residual=res, potential=q)


def basis_gram(q: Potential, nmax: int, steps: int = DEFAULT_STEPS) -> float:
    """Condition number of the Gram matrix of normalized phi^2 at sqrt(mu_n), sqrt(tau_n)."""
    lams = np.concatenate([dirichlet_eigenvalues(q, nmax, steps), mixed_eigenvalues(q, nmax, steps)])
    x = np.linspace(0.0, 1.0, steps + 1)
    funcs = []
    for lam in lams:
        w = integrate_phi(q, np.sqrt(complex(lam)), steps)
        funcs.append(np.interp(x, w.x, w.y.real**2))
    return gram_condition(np.array(funcs), x)


def gram_condition(funcs: np.ndarray, x: np.ndarray) -> float:
    """Condition of the Gram matrix of the L2-normalized rows of funcs sampled on x."""
    wts = np.full(x.size, x[1] - x[0])
    wts[[0, -1]] *= 0.5
    norms = np.sqrt((funcs**2) @ wts)
    f = funcs / norms[:, None]
    G = (f * wts) @ f.T
    return float(np.linalg.cond(G))
