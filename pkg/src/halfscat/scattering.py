"""Jost function, S-matrix, phase shift, bound states and Blaschke products."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import NearZeroJost, PoleHit, ScanTooCoarse, UnwrapAmbiguity
from .ode import DEFAULT_STEPS, integrate_phi, integrate_phi_dk, phi_end, prufer_angle
from .potential import Potential

NEAR_ZERO_JOST = 1e-12


@dataclass(frozen=True)
class JostValue:
    k: complex
    psi: complex
    dpsi_dk: Optional[complex] = None


@dataclass(frozen=True)
class BoundStateSet:
    ks: np.ndarray          # i*r_j, ordered |k_1| > |k_2| > ...
    norming: np.ndarray     # n_j = int_0^inf f_+^2(x, k_j) dx

    @property
    def m(self) -> int:
        return len(self.ks)

    @property
    def energies(self) -> np.ndarray:
        return -np.abs(self.ks) ** 2


def jost(q: Potential, k: complex, derivative: bool = False, steps: int = DEFAULT_STEPS) -> JostValue:
    """psi(k) = e^{ik} (phi'(1,k) - ik phi(1,k)), optionally with d psi / dk."""
    k = complex(k)
    e = np.exp(1j * k)
    if not derivative:
        y, dy = phi_end(q, [k], steps)
        return JostValue(k, complex(e * (dy[0] - 1j * k * y[0])))
    phi, phik = integrate_phi_dk(q, k, steps)
    y, dy = phi.at_end()
    yk, dyk = phik.at_end()
    psi = e * (dy - 1j * k * y)
    dpsi = 1j * psi + e * (dyk - 1j * y - 1j * k * yk)
    return JostValue(k, complex(psi), complex(dpsi))


def jost_values(q: Potential, ks, steps: int = DEFAULT_STEPS) -> np.ndarray:
    """Vectorized psi over an array of complex k."""
    ks = np.atleast_1d(np.asarray(ks, dtype=complex))
    y, dy = phi_end(q, ks, steps)
    return np.exp(1j * ks) * (dy - 1j * ks * y)


def smatrix(q: Potential, k, steps: int = DEFAULT_STEPS):
    """S(k) = psi(-k)/psi(k) for real nonzero k (scalar or array)."""
    scalar = np.ndim(k) == 0
    ks = np.atleast_1d(np.asarray(k, dtype=float))
    if np.any(ks == 0.0):
        raise ValueError("S(k) is defined for k != 0 only")
    both = jost_values(q, np.concatenate([ks, -ks]), steps)
    psi, psim = both[: ks.size], both[ks.size:]
    if np.any(np.abs(psi) < NEAR_ZERO_JOST):
        raise NearZeroJost("|psi(k)| below 1e-12 on the real axis", k=ks[np.argmin(np.abs(psi))])
    s = psim / psi
    return complex(s[0]) if scalar else s


def phase_function(q: Potential, k: float, steps: int = DEFAULT_STEPS) -> float:
    """k - xi(k) for k > 0, as the continuous angle of phi' + ik phi along [0, 1]."""
    if k <= 0:
        raise ValueError("phase_function needs k > 0")
    return prufer_angle(q, k * k, k, steps)


def _raw_phase(q, ks, steps):
    # -arg S / 2 folded into (-pi/2, pi/2]
    return -0.5 * np.angle(smatrix(q, ks, steps))


def _wrap(d):
    # representative of d modulo pi in (-pi/2, pi/2]
    return d - math.pi * np.round(d / math.pi)


_UNWRAP_LIMIT = math.pi / 4


def phase_shift(q: Potential, kgrid: Sequence[float], steps: int = DEFAULT_STEPS) -> np.ndarray:
    """Phase shift xi on an ascending positive k-grid, with xi(+inf) = 0.

    The raw phase is only known modulo pi. It is anchored at the largest k
    (where |xi| is small) and unwrapped downward; an interval whose increment
    is too large to be resolved is subdivided, at most twice.
    """
    kgrid = np.asarray(kgrid, dtype=float)
    if kgrid.ndim != 1 or kgrid.size == 0 or np.any(kgrid <= 0) or np.any(np.diff(kgrid) <= 0):
        raise ValueError("kgrid must be ascending positive reals")
    raw = _raw_phase(q, kgrid, steps)
    xi = np.empty_like(raw)
    xi[-1] = raw[-1]
    for i in range(kgrid.size - 2, -1, -1):
        d = _wrap(raw[i] - raw[i + 1])
        if abs(d) > _UNWRAP_LIMIT:
            d = _refined_increment(q, kgrid[i], kgrid[i + 1], raw[i], raw[i + 1], steps)
        xi[i] = xi[i + 1] + d
    return xi


def _refined_increment(q, ka, kb, ra, rb, steps, levels=2):
    sub = 4
    for _ in range(levels):
        ks = np.linspace(ka, kb, sub + 1)
        r = np.concatenate([[ra], _raw_phase(q, ks[1:-1], steps), [rb]])
        inc = _wrap(np.diff(r))
        if np.all(np.abs(inc) <= _UNWRAP_LIMIT):
            return -float(inc.sum())
        sub *= 4
    raise UnwrapAmbiguity(
        f"phase jump between k={ka:.6g} and k={kb:.6g} unresolved after two refinements"
    )


def _psi_imag_axis(q: Potential, rs, steps):
    # psi(i r) = e^{-r} (phi'(1, ir) + r phi(1, ir)); real for real r
    rs = np.atleast_1d(np.asarray(rs, dtype=float))
    y, dy = phi_end(q, 1j * rs, steps)
    return (np.exp(-rs) * (dy + rs * y)).real


def _bisect_real(f, a, b, fa, tol=1e-13):
    for _ in range(200):
        if b - a <= tol * max(1.0, abs(a)):
            break
        mid = 0.5 * (a + b)
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm < 0) == (fa < 0):
            a, fa = mid, fm
        else:
            b = mid
    return 0.5 * (a + b)


def negative_eigenvalue_count(q: Potential, steps: int = DEFAULT_STEPS) -> int:
    """Sturm count: zeros on (0, inf) of the zero-energy solution phi(., 0)."""
    w = integrate_phi(q, 0.0, steps)
    y = w.y.real[1:]
    count = int(np.sum(np.signbit(y[1:]) != np.signbit(y[:-1])))
    y1, dy1 = w.y[-1].real, w.dy[-1].real
    if y1 * dy1 < 0.0:   # linear continuation beyond x = 1 crosses zero
        count += 1
    return count


def default_rmax(q: Potential) -> float:
    return math.sqrt(max(0.0, -float(q.values.min()))) + 1.0


def bound_states(q: Potential, rmax: Optional[float] = None, steps: int = DEFAULT_STEPS) -> BoundStateSet:
    """Zeros k_j = i r_j of psi on (0, i rmax] and their norming constants."""
    if rmax is None:
        rmax = default_rmax(q)
    if rmax <= 0:
        raise ValueError("rmax must be positive")
    npts = 1000
    rs = np.linspace(rmax / npts, rmax, npts)
    vals = _psi_imag_axis(q, rs, steps)
    f = lambda r: float(_psi_imag_axis(q, [r], steps)[0])
    roots = []
    for i in range(npts - 1):
        if vals[i] == 0.0:
            roots.append(rs[i])
        elif np.signbit(vals[i]) != np.signbit(vals[i + 1]):
            roots.append(_bisect_real(f, rs[i], rs[i + 1], vals[i]))
    expected = negative_eigenvalue_count(q, steps)
    if len(roots) != expected:
        raise ScanTooCoarse(
            f"found {len(roots)} zeros of psi on i(0, {rmax:.4g}], Sturm count says {expected}",
            found=len(roots), expected=expected,
        )
    roots = sorted(roots, reverse=True)
    ks = np.array([1j * r for r in roots], dtype=complex)
    norming = np.array([norming_constant(q, kj, steps) for kj in ks])
    return BoundStateSet(ks, norming)


def norming_constant(q: Potential, kj: complex, steps: int = DEFAULT_STEPS) -> float:
    """n_j = -i psi'(k_j) / psi(-k_j)."""
    dpsi = jost(q, kj, derivative=True, steps=steps).dpsi_dk
    psim = jost(q, -kj, steps=steps).psi
    return float((-1j * dpsi / psim).real)


def has_zero_at_origin(q: Potential, eps: float = 1e-4, threshold: float = 1.0, steps: int = DEFAULT_STEPS) -> bool:
    """n_0 flag: linear extrapolation of psi to k = 0 from eps and 2 eps."""
    p1, p2 = jost_values(q, [eps, 2 * eps], steps)
    return bool(abs(2 * p1 - p2) < eps * threshold)


def blaschke(ks, k: complex) -> complex:
    """prod_j (k + k_j) / (k - k_j)."""
    k = complex(k)
    out = 1 + 0j
    for kj in np.atleast_1d(np.asarray(ks, dtype=complex)):
        if abs(k - kj) <= 1e-14 * max(1.0, abs(kj)):
            raise PoleHit(f"k = {k} coincides with a zero {kj}")
        out *= (k + kj) / (k - kj)
    return out


def psi_first_order(q: Potential, k: complex) -> complex:
    """1 + (q-hat(k) - q-hat(0)) / (2ik), the leading large-k behaviour of psi."""
    from .potential import fourier_transform

    return 1 + (fourier_transform(q, k) - fourier_transform(q, 0.0)) / (2j * k)
