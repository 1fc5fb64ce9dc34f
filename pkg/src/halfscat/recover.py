"""Explicit reconstruction q = sigma_0 - 2 (log det Omega)'' from phase data.

Generic data use the period-2 solutions u_n (u_n(2) = (-1)^n) against
v_j = sin(p_j^o x) / p_j^o; even data use period-1 solutions against
v_j = sin(pi j x) / (pi j) and Dirichlet eigenvalues only. Frozen indices
give identity rows, so only the perturbed block enters the determinant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DegenerateGamma, EigenvalueHit, EvenConditionViolated, InvalidSpectralData, SingularOmega
from .ode import DEFAULT_STEPS, integrate_phi_dk, phi_end_lambda
from .phasemap import EVEN, GENERIC, SpectralData, validate_even
from .potential import DEFAULT_GRID_N, Potential
from .spectra import dirichlet_eigenvalues

DEGENERACY_TOL = 1e-10
SINGULAR_TOL = 1e-12


def cos_sinc(gamma: float, x):
    """C = cos(sqrt(gamma) x) and S = sin(sqrt(gamma) x)/sqrt(gamma), real for any real gamma."""
    x = np.asarray(x, dtype=float)
    if gamma > 0:
        w = math.sqrt(gamma)
        return np.cos(w * x), np.sin(w * x) / w
    if gamma < 0:
        w = math.sqrt(-gamma)
        return np.cosh(w * x), np.sinh(w * x) / w
    return np.ones_like(x), x.copy()


@dataclass(frozen=True)
class Block:
    """Perturbed block description shared by the generic and even formulas."""

    gammas: np.ndarray      # perturbed gamma_n (generic) or m_n = mu_n - sigma_0 (even)
    free: np.ndarray        # their unperturbed values
    signs: np.ndarray       # (-1)^n
    period: float           # 2 (generic) or 1 (even)

    @property
    def size(self) -> int:
        return len(self.gammas)


def _block(data: SpectralData) -> Block:
    idx = data.indices
    if data.parity == GENERIC:
        idx = idx[data.gamma(idx) - (0.5 * math.pi * idx) ** 2 != 0.0] if idx.size else idx
        g = data.gamma(idx) if idx.size else np.array([])
        free = (0.5 * math.pi * idx) ** 2
        return Block(np.asarray(g, float), free, (-1.0) ** idx, 2.0)
    # even: index 2m in p-numbering is the m-th Dirichlet eigenvalue
    m = idx // 2
    g = data.gamma(idx) if idx.size else np.array([])
    free = (math.pi * m) ** 2
    keep = g - free != 0.0 if m.size else np.array([], bool)
    m, g, free = m[keep], np.asarray(g)[keep], free[keep]
    return Block(g, free, (-1.0) ** m, 1.0)


def _check_block(b: Block):
    # entries within roundoff of their free value are frozen
    keep = np.abs(b.gammas - b.free) >= DEGENERACY_TOL * np.maximum(1.0, np.abs(b.free))
    b = Block(b.gammas[keep], b.free[keep], b.signs[keep], b.period)
    for n in range(b.size):
        c, s = cos_sinc(b.gammas[n], b.period)
        if abs(float(s)) * math.sqrt(abs(b.gammas[n])) < DEGENERACY_TOL and b.gammas[n] != 0.0:
            raise DegenerateGamma(
                f"sin({b.period:g} sqrt(gamma)) vanishes for perturbed gamma = {b.gammas[n]:.12g}"
            )
        for j in range(b.size):
            if j != n and abs(b.gammas[n] - b.free[j]) < DEGENERACY_TOL:
                raise DegenerateGamma(
                    f"perturbed gamma = {b.gammas[n]:.12g} collides with a free value of another index"
                )
    return b


def _u(gamma, sign, period, x):
    cL, sL = cos_sinc(gamma, period)
    coef = (sign - float(cL)) / float(sL)
    c, s = cos_sinc(gamma, x)
    return c + coef * s, -gamma * s + coef * c


def _entries(b: Block, x):
    """Omega, Omega', Omega'' on the perturbed block, shape (len(x), N, N)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    n = b.size
    om = np.empty((x.size, n, n))
    d1 = np.empty_like(om)
    d2 = np.empty_like(om)
    vs, dvs = [], []
    for j in range(n):
        w = math.sqrt(b.free[j])
        vs.append(np.sin(w * x) / w)
        dvs.append(np.cos(w * x))
    for i in range(n):
        u, du = _u(b.gammas[i], b.signs[i], b.period, x)
        delta = b.gammas[i] - b.free[i]
        for j in range(n):
            v, dv = vs[j], dvs[j]
            om[:, i, j] = delta / (b.gammas[i] - b.free[j]) * (u * dv - du * v)
            d1[:, i, j] = delta * u * v
            d2[:, i, j] = delta * (du * v + u * dv)
    return om, d1, d2


def omega_entry(gamma: Sequence[float], n: int, j: int, x: float, parity: str = GENERIC):
    """(Omega_nj, d/dx Omega_nj, d^2/dx^2 Omega_nj) at x; gamma is 1-based by index.

    For even parity gamma holds the shifted Dirichlet eigenvalues m_n = mu_n - sigma_0.
    """
    if parity == GENERIC:
        free = lambda i: (0.5 * math.pi * i) ** 2
        period = 2.0
    else:
        free = lambda i: (math.pi * i) ** 2
        period = 1.0
    gn = float(gamma[n - 1])
    if abs(gn - free(n)) < DEGENERACY_TOL * max(1.0, free(n)):
        return (1.0 if n == j else 0.0), 0.0, 0.0
    c, s = cos_sinc(gn, period)
    if abs(float(s)) * math.sqrt(abs(gn)) < DEGENERACY_TOL and gn != 0.0:
        raise DegenerateGamma(f"sin({period:g} sqrt(gamma_{n})) vanishes")
    if n != j and abs(gn - free(j)) < DEGENERACY_TOL:
        raise DegenerateGamma(f"gamma_{n} collides with the free value of index {j}")
    u, du = _u(gn, (-1.0) ** n, period, np.array([x]))
    w = math.sqrt(free(j))
    v, dv = math.sin(w * x) / w, math.cos(w * x)
    delta = gn - free(n)
    if n == j:
        val = float(u[0] * dv - du[0] * v)
    else:
        val = float(delta / (gn - free(j)) * (u[0] * dv - du[0] * v))
    return val, float(delta * u[0] * v), float(delta * (du[0] * v + u[0] * dv))


def omega_matrices(data: SpectralData, x):
    b = _check_block(_block(data))
    return _entries(b, x)


def log_det_second_derivative(om, d1, d2):
    """(log det Omega)'' = tr(Omega^-1 Omega'') - tr((Omega^-1 Omega')^2), batched over x."""
    if om.shape[-1] == 0:
        return np.zeros(om.shape[0])
    a = np.linalg.solve(om, d1)
    c = np.linalg.solve(om, d2)
    return np.trace(c, axis1=1, axis2=2) - np.einsum("xij,xji->x", a, a)


def _check_singular(om):
    if om.shape[-1] == 0:
        return
    det = np.linalg.det(om)
    scale = np.linalg.norm(om, axis=(1, 2))
    bad = np.abs(det) < SINGULAR_TOL * scale
    if np.any(bad):
        raise SingularOmega("det Omega vanishes on the grid", count=int(bad.sum()))


def _reconstruct(data: SpectralData, grid_n: int) -> Potential:
    x = np.linspace(0.0, 1.0, grid_n)
    om, d1, d2 = omega_matrices(data, x)
    _check_singular(om)
    return Potential(data.sigma0 - 2.0 * log_det_second_derivative(om, d1, d2))


def recover_generic(data: SpectralData, grid_n: int = DEFAULT_GRID_N) -> Potential:
    """Potential on [0, 1] whose phase data are ``data`` (generic parity)."""
    if data.parity != GENERIC:
        raise InvalidSpectralData("recover_generic needs generic-parity data")
    return _reconstruct(data, grid_n)


def recover_even(data: SpectralData, grid_n: int = DEFAULT_GRID_N, check: bool = True) -> Potential:
    """Even potential with Dirichlet eigenvalues p_{2m}^2."""
    if data.parity != EVEN:
        raise InvalidSpectralData("recover_even needs even-parity data")
    if check and not validate_even(data):
        raise EvenConditionViolated("even data fail the admissibility sum condition")
    return _reconstruct(data, grid_n)


def det_omega(data: SpectralData, x) -> np.ndarray:
    om, _, _ = omega_matrices(data, x)
    if om.shape[-1] == 0:
        return np.ones(om.shape[0])
    return np.linalg.det(om)


# ---------------------------------------------------------------- normalization constant


def gamma_product(data: SpectralData, jcap: int = 100_000) -> float:
    """Normalizing product prod_{j>n} (g_n^o - g_j) / (g_n - g_j).

    Only pairs with a perturbed lower index n differ from 1. Tail factors over
    frozen j are 1 + O(1/j^2); the product is truncated at jcap or once the
    log-increment drops below 1e-12. It is independent of x and so does not
    enter q.
    """
    b = _check_block(_block(data))
    if b.size == 0:
        return 1.0
    idx = data.indices
    top = int(idx.max()) if idx.size else 0
    if jcap < top:
        raise ValueError("jcap must reach the largest perturbed index")
    if data.parity == GENERIC:
        all_idx = np.arange(1, jcap + 1)
        free = (0.5 * math.pi * all_idx) ** 2
        gam = data.gamma(all_idx)
    else:
        all_idx = np.arange(1, jcap + 1)
        free = (math.pi * all_idx) ** 2
        gam = data.gamma(2 * all_idx)
    pert = np.nonzero(np.abs(gam - free) >= DEGENERACY_TOL * np.maximum(1.0, free))[0]
    last = pert.max()
    logs = []
    sign = 1.0
    for n in pert:
        ratios = (free[n] - gam[n + 1:]) / (gam[n] - gam[n + 1:])
        terms = np.log(np.abs(ratios))
        small = np.nonzero((np.abs(terms) < 1e-12) & (np.arange(n + 1, jcap) > last))[0]
        if small.size:
            terms, ratios = terms[: small[0] + 1], ratios[: small[0] + 1]
        else:
            # frozen remainder: sum_{j > jcap} -(g_n^o - g_n) / g_j^o
            scale = 4.0 if data.parity == GENERIC else 1.0
            terms = np.append(terms, -(free[n] - gam[n]) * scale / (math.pi**2 * (jcap + 0.5)))
        logs.append(math.fsum(terms))
        sign *= float(np.prod(np.sign(ratios)))
    return sign * math.exp(math.fsum(logs))


# ---------------------------------------------------------------- interpolation check


def phi_dot_lambda(q: Potential, lam: float, steps: int = DEFAULT_STEPS) -> float:
    """d phi(1, lambda) / d lambda via the k-variational system and d/dlambda = (1/2k) d/dk."""
    k = np.sqrt(complex(lam))
    if k == 0:
        k = 1e-8 + 0j
    _, phik = integrate_phi_dk(q, k, steps)
    return float((phik.y[-1] / (2.0 * k)).real)


def interpolate_phi_prime(q: Potential, lam: float, nmax: int, steps: int = DEFAULT_STEPS) -> float:
    """phi'(1, lambda) from Dirichlet data of an even q by Lagrange-type interpolation.

    phi'(1, l) = cos sqrt(l) + (sigma_0/2) phi(1, l)
                 + sum_n ((-1)^n - cos sqrt(mu_n)) phi(1, l) / ((l - mu_n) phi_dot(1, mu_n)).

    Terms beyond nmax are replaced by their asymptotic sum.
    """
    if not q.is_even(1e-8):
        raise ValueError("interpolate_phi_prime needs an even potential")
    mu = dirichlet_eigenvalues(q, nmax, steps)
    if np.any(np.abs(lam - mu) < 1e-8):
        raise EigenvalueHit(f"lambda = {lam} is a Dirichlet eigenvalue")
    phi1 = float(phi_end_lambda(q, [lam], steps)[0][0].real)
    total = math.cos(math.sqrt(lam)) if lam >= 0 else math.cosh(math.sqrt(-lam))
    total += 0.5 * q.sigma0 * phi1
    for n, m in enumerate(mu, start=1):
        cm = math.cos(math.sqrt(m)) if m >= 0 else math.cosh(math.sqrt(-m))
        total += ((-1.0) ** n - cm) * phi1 / ((lam - m) * phi_dot_lambda(q, m, steps))
    # remainder of the terms n > nmax, using mu_n ~ (pi n)^2 + sigma_0
    total -= q.sigma0**2 * phi1 / (4.0 * math.pi**2 * (nmax + 0.5))
    return total
