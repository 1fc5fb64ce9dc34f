"""Jost-Kohn insertion of a bound state at k* = i r.

The dressed potential is q* = q - 2 (log A)'' with
A(x) = 1 + c * int_0^x phi(s, k*)^2 ds; its Jost function is
psi(k) (k - k*) / (k + k*). For the special constant c = c* the correction
vanishes beyond x = 1 and q* stays supported in [0, 1].
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.integrate import cumulative_simpson
from scipy.optimize import brentq

from .errors import NotAZero, SupportLeak, WrongSign, ZeroA
from .ode import DEFAULT_STEPS, integrate_phi
from .potential import DEFAULT_GRID_N, Potential
from .scattering import bound_states, has_zero_at_origin, jost, jost_values

ZERO_TOL = 1e-8
LEAK_TOL = 1e-6

EXPLICIT = "explicit-c"
SUPPORT_PRESERVING = "support-preserving"


class KClass(str, enum.Enum):
    IN_K = "in_K"
    NOT_IN_K = "not_in_K"
    UNDECIDABLE = "undecidable"


@dataclass(frozen=True)
class DressingParams:
    r: float
    c: Optional[float] = None
    mode: str = EXPLICIT

    def __post_init__(self):
        if not self.r > 0:
            raise ValueError("k* = i r needs r > 0")
        if self.mode == EXPLICIT and not (self.c is not None and self.c > 0):
            raise ValueError("explicit-c dressing needs c > 0")
        if self.mode not in (EXPLICIT, SUPPORT_PRESERVING):
            raise ValueError(f"unknown dressing mode {self.mode!r}")

    @property
    def kstar(self) -> complex:
        return 1j * self.r


@dataclass(frozen=True)
class DressedPotential:
    x: np.ndarray
    q_star: np.ndarray
    q_o: np.ndarray
    A: np.ndarray
    r: float
    c: float

    def restrict(self, grid_n: int = DEFAULT_GRID_N) -> Potential:
        """q* on [0, 1] as a Potential (drops whatever lies beyond x = 1)."""
        nodes = np.linspace(0.0, 1.0, grid_n)
        return Potential(np.interp(nodes, self.x, self.q_star))

    def rescaled(self, grid_n: int = DEFAULT_GRID_N):
        """q* on [0, L] mapped to [0, 1]: q~(y) = L^2 q*(L y), with psi_q*(k) = psi_q~(L k)."""
        length = float(self.x[-1])
        nodes = np.linspace(0.0, 1.0, grid_n)
        return Potential(length**2 * np.interp(length * nodes, self.x, self.q_star)), length


def exterior_coefficients(q: Potential, r: float, steps: int = DEFAULT_STEPS):
    """(c1, c2) with phi(x, ir) = c1 e^{r(x-1)} + c2 e^{-r(x-1)} for x >= 1.

    c1 = -e^{-ik} psi(k) / (2ik), c2 = e^{ik} psi(-k) / (2ik) at k = ir.
    """
    k = 1j * r
    psi_p, psi_m = jost_values(q, [k, -k], steps)
    c1 = -np.exp(-1j * k) * psi_p / (2j * k)
    c2 = np.exp(1j * k) * psi_m / (2j * k)
    return float(c1.real), float(c2.real)


def _exterior_q_o(c, c1, c2, r, a1, t):
    """q_o and A for x = 1 + t > 1 from the exponential form of phi.

    With E = e^{rt}, q_o = -2 c phi D / A^2 where D = 2 phi' A - c phi^3; the
    e^{3rt} terms of D cancel analytically, and everything is scaled by
    powers of E so nothing overflows.
    """
    em2 = np.exp(-2.0 * r * t)
    # B = A - c c1^2 E^2 / (2r)
    B = a1 + c * (-c1 * c1 / (2 * r) + 2 * c1 * c2 * t - c2 * c2 * np.expm1(-2 * r * t) / (2 * r))
    A_s = c * c1 * c1 / (2 * r) + B * em2                     # A / E^2
    phi_s = c1 + c2 * em2                                      # phi / E
    D_s = (-4 * c * c1 * c1 * c2 - 3 * c * c1 * c2 * c2 * em2 - c * c2**3 * em2 * em2
           + 2 * r * (c1 - c2 * em2) * B)                      # D / E
    q_o = -2.0 * c * phi_s * D_s / A_s**2 * em2
    with np.errstate(over="ignore"):
        A = A_s / em2
    return q_o, A


def dress(q: Potential, params: DressingParams, xmax: float = 2.0, steps: int = DEFAULT_STEPS,
          c: Optional[float] = None) -> DressedPotential:
    """Add the bound state k* = i r with norming constant c (or c* in support-preserving mode)."""
    r = params.r
    if c is None:
        c = params.c if params.mode == EXPLICIT else cstar(q, params.kstar, steps)
    if xmax < 1.0:
        raise ValueError("xmax must be >= 1")
    bs = bound_states(q, steps=steps)
    if np.any(np.abs(np.abs(bs.ks) - r) < 1e-10 * max(1.0, r)):
        raise ValueError("k* coincides with an existing bound state")

    w = integrate_phi(q, 1j * r, steps)
    x_in = w.x
    phi_in, dphi_in = w.y.real, w.dy.real
    int_in = cumulative_simpson(phi_in**2, x=x_in, initial=0.0)
    h = float(x_in[1] - x_in[0])
    n_out = int(round((xmax - 1.0) / h))
    t = np.linspace(0.0, n_out * h, n_out + 1)[1:]
    c1, c2 = exterior_coefficients(q, r, steps)
    a1 = 1.0 + c * int_in[-1]

    A_in = 1.0 + c * int_in
    q_in = -2.0 * (2.0 * c * phi_in * dphi_in / A_in - (c * phi_in**2 / A_in) ** 2)
    q_out, A_out = _exterior_q_o(c, c1, c2, r, a1, t)
    A = np.concatenate([A_in, A_out])
    if np.any(A <= 0):
        raise ZeroA("A_x must stay positive")
    x = np.concatenate([x_in, 1.0 + t])
    q_o = np.concatenate([q_in, q_out])
    q_base = np.concatenate([q(x_in), np.zeros(n_out)])
    return DressedPotential(x, q_base + q_o, q_o, A, r, float(c))


def _psi_neg_imag(q: Potential, s, steps):
    # psi(-i s), real for real s
    s = np.atleast_1d(np.asarray(s, dtype=float))
    return jost_values(q, -1j * s, steps).real


def find_antibound_zero(q: Potential, lo: float, hi: float, steps: int = DEFAULT_STEPS) -> float:
    """r in [lo, hi] with psi(-i r) = 0 (sign change required)."""
    f = lambda s: float(_psi_neg_imag(q, [s], steps)[0])
    return brentq(f, lo, hi, xtol=1e-14, rtol=1e-15)


def _check_zero(q, kstar, steps):
    r = abs(kstar)
    val = jost(q, -1j * r, steps=steps).psi
    scale = max(1.0, abs(jost(q, 1j * r, steps=steps).psi))
    if abs(val) > ZERO_TOL * scale:
        raise NotAZero(f"|psi(-k*)| = {abs(val):.3g} is not a zero", value=abs(val))


def cstar(q: Potential, kstar: complex, steps: int = DEFAULT_STEPS, classify: bool = False) -> float:
    """Support-preserving norming constant 2 r e^r / (i psi'(-k*) phi(1, k*))."""
    kstar = complex(kstar)
    r = abs(kstar)
    _check_zero(q, kstar, steps)
    dpsi = jost(q, -1j * r, derivative=True, steps=steps).dpsi_dk
    phi1 = integrate_phi(q, 1j * r, steps).y[-1]
    value = complex(2 * r * math.exp(r) / (1j * dpsi * phi1))
    c = value.real
    if classify and c <= 0 and classify_kstar(q, 1j * r, 2 * r + 1, steps) is KClass.IN_K:
        raise WrongSign(f"c* = {c:.6g} <= 0 although k* is in the admissible class")
    return c


def jk_identity_sides(q: Potential, r: float, steps: int = DEFAULT_STEPS):
    """Both sides of phi^2(1,k*) - 2r int_0^1 phi^2 = i e^{ik*} psi'(-k*) phi(1,k*)."""
    w = integrate_phi(q, 1j * r, steps)
    phi = w.y.real
    lhs = phi[-1] ** 2 - 2 * r * float(cumulative_simpson(phi**2, x=w.x)[-1])
    dpsi = jost(q, -1j * r, derivative=True, steps=steps).dpsi_dk
    rhs = 1j * math.exp(-r) * dpsi * phi[-1]
    return lhs, complex(rhs)


def exterior_phi(q: Potential, r: float, x, steps: int = DEFAULT_STEPS):
    """phi(x, i r) for x >= 1 from the exponential form."""
    c1, c2 = exterior_coefficients(q, r, steps)
    t = np.asarray(x, dtype=float) - 1.0
    return c1 * np.exp(r * t) + c2 * np.exp(-r * t)


def _count_zeros(q, a, b, steps, n):
    s = np.linspace(a, b, n)
    v = _psi_neg_imag(q, s, steps)
    return int(np.sum(np.signbit(v[1:]) != np.signbit(v[:-1])))


def _stable_count(q, a, b, steps, n0=400):
    counts = [_count_zeros(q, a, b, steps, n0 * 2**i) for i in range(3)]
    return counts[-1] if counts[-1] == counts[-2] else None


def classify_kstar(q: Potential, kstar: complex, scan_depth: float, steps: int = DEFAULT_STEPS) -> KClass:
    """Decide whether dressing at k* gives a compactly supported potential.

    Counts zeros of psi on the negative imaginary segment adjacent to -k*
    (between -k* and the neighbouring -k_j, or down to 0 when there are no
    bound states below k*) and checks the parity. Counts that change under
    grid refinement, or segments deeper than scan_depth, are undecidable.
    """
    r = abs(complex(kstar))
    _check_zero(q, kstar, steps)
    if abs(jost(q, 1j * r, steps=steps).psi) < ZERO_TOL:
        raise NotAZero("k* is already a bound state (psi(k*) = 0)")
    rs = sorted((abs(k) for k in bound_states(q, steps=steps).ks), reverse=True)
    margin = 1e-6 * max(1.0, r)
    above = [s for s in rs if s > r]
    below = [s for s in rs if s < r]
    if above and below or above:
        # cases ii/iii: the segment between -k* and the closest deeper -k_j
        lo, hi, want_odd = r + margin, min(above) - margin, True
    elif below:
        # case iv: the segment between -k* and -k_m
        lo, hi, want_odd = max(below) + margin, r - margin, True
    else:
        # no bound states: (-k*, 0] must carry an even number of zeros
        lo, hi, want_odd = 0.0, r - margin, False
    if hi > scan_depth:
        return KClass.UNDECIDABLE
    if hi <= lo:
        count = 0
    else:
        count = _stable_count(q, lo, hi, steps)
        if count is None:
            return KClass.UNDECIDABLE
    if not above and not below and has_zero_at_origin(q, steps=steps):
        count += 1
    ok = (count % 2 == 1) if want_odd else (count % 2 == 0)
    if want_odd and count == 0:
        ok = False
    return KClass.IN_K if ok else KClass.NOT_IN_K


def dress_support_preserving(q: Potential, kstar: complex, steps: int = DEFAULT_STEPS,
                             grid_n: Optional[int] = None) -> Potential:
    """Dress with c = c*, audit that nothing leaks past x = 1, return q* on [0, 1]."""
    r = abs(complex(kstar))
    verdict = classify_kstar(q, 1j * r, 2 * r + 1, steps)
    if verdict is not KClass.IN_K:
        raise NotAZero(f"k* = {r}i is not admissible for support-preserving dressing ({verdict.value})")
    c = cstar(q, 1j * r, steps)
    if c <= 0:
        raise WrongSign(f"c* = {c:.6g} <= 0 although k* is in the admissible class")
    d = dress(q, DressingParams(r, c, EXPLICIT), xmax=2.0, steps=steps)
    outside = d.x > 1.0
    leak = float(np.max(np.abs(d.q_o[outside])))
    if leak >= LEAK_TOL:
        raise SupportLeak(f"dressed correction reaches {leak:.3g} beyond x = 1", leak=leak)
    return d.restrict(grid_n or q.grid_n)
