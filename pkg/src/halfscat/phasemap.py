"""Phase data p_n (roots of k - xi(k) = pi n / 2) and the SpectralData container."""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np

from .errors import BracketFailure, InvalidSpectralData, NotLPlus
from .ode import DEFAULT_STEPS
from .potential import Potential, mean
from .scattering import phase_function
from .spectra import dirichlet_eigenvalues, is_lplus

GENERIC = "generic"
EVEN = "even"
EVEN_TOL = 1e-9


def p_free(n):
    """Unperturbed phase data p_n = pi n / 2."""
    return 0.5 * math.pi * np.asarray(n, dtype=float)


def gamma_free(n):
    return p_free(n) ** 2


@dataclass(frozen=True)
class SpectralData:
    """sigma_0 plus finitely many perturbed p_n.

    Every index not listed in ``perturbed`` is frozen: gamma_n = p_n^2 - sigma_0
    equals its free value (pi n / 2)^2, so frozen rows of the reconstruction
    matrix are identity rows. For even parity only even indices n = 2m are
    meaningful and p_{2m}^2 is the m-th Dirichlet eigenvalue.
    """

    sigma0: float
    perturbed: Dict[int, float] = field(default_factory=dict)
    nmax: int = 0
    parity: str = GENERIC

    def __post_init__(self):
        pert = {int(n): float(p) for n, p in dict(self.perturbed).items()}
        object.__setattr__(self, "perturbed", dict(sorted(pert.items())))
        top = max(pert, default=0)
        object.__setattr__(self, "nmax", max(int(self.nmax), top))
        if self.parity not in (GENERIC, EVEN):
            raise InvalidSpectralData(f"unknown parity {self.parity!r}")
        self.validate()

    # ------------------------------------------------------------ access
    @property
    def indices(self) -> np.ndarray:
        return np.array(list(self.perturbed), dtype=int)

    def p(self, n):
        n = np.atleast_1d(np.asarray(n, dtype=int))
        out = np.sqrt(gamma_free(n) + self.sigma0)
        for i, ni in enumerate(n):
            if int(ni) in self.perturbed:
                out[i] = self.perturbed[int(ni)]
        return out

    def gamma(self, n):
        n = np.atleast_1d(np.asarray(n, dtype=int))
        out = gamma_free(n)
        for i, ni in enumerate(n):
            if int(ni) in self.perturbed:
                out[i] = self.perturbed[int(ni)] ** 2 - self.sigma0
        return out

    def sigma(self, n):
        """sigma_n = 2 p_n^o (p_n - p_n^o) - sigma_0."""
        n = np.atleast_1d(np.asarray(n, dtype=int))
        return 2.0 * p_free(n) * (self.p(n) - p_free(n)) - self.sigma0

    def carried(self) -> np.ndarray:
        """Indices that belong to this parity class up to nmax."""
        if self.parity == EVEN:
            return np.arange(2, self.nmax + 1, 2)
        return np.arange(1, self.nmax + 1)

    def mu(self, m):
        """Dirichlet eigenvalues mu_m = p_{2m}^2."""
        return self.p(2 * np.atleast_1d(np.asarray(m, dtype=int))) ** 2

    # ------------------------------------------------------------ checks
    def validate(self):
        if not math.isfinite(self.sigma0):
            raise InvalidSpectralData("sigma0 must be finite")
        for n, p in self.perturbed.items():
            if n < 1:
                raise InvalidSpectralData(f"index {n} must be >= 1")
            if not math.isfinite(p) or p < 0:
                raise InvalidSpectralData(f"p_{n} = {p} must be finite and >= 0")
            if self.parity == EVEN and n % 2:
                raise InvalidSpectralData(f"even data carries only even indices, got {n}")
        n = self.carried() if self.nmax else np.arange(1, 2)
        n = np.concatenate([n, [n[-1] + (2 if self.parity == EVEN else 1)]])
        p = self.p(n)
        if np.any(np.diff(p) <= 0):
            raise InvalidSpectralData("p_n must be strictly increasing")
        if np.any(np.diff(p**2 - self.sigma0) <= 0):
            raise InvalidSpectralData("gamma_n must be strictly increasing")
        if self.parity == GENERIC and p[0] == 0.0:
            warnings.warn("p_1 = 0: reconstruction at tau_1 = 0 is untested", stacklevel=3)

    # ------------------------------------------------------------ io
    def to_dict(self) -> dict:
        return {
            "sigma0": self.sigma0,
            "parity": self.parity,
            "perturbed": [{"n": n, "p": p} for n, p in self.perturbed.items()],
            "nmax": self.nmax,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SpectralData":
        pert = {int(e["n"]): float(e["p"]) for e in data.get("perturbed", [])}
        if len(pert) != len(data.get("perturbed", [])):
            raise InvalidSpectralData("perturbed indices must be distinct")
        idx = [int(e["n"]) for e in data.get("perturbed", [])]
        if idx != sorted(idx):
            raise InvalidSpectralData("perturbed indices must be ascending")
        return cls(float(data["sigma0"]), pert, int(data.get("nmax", 0)), data.get("parity", GENERIC))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "SpectralData":
        return cls.from_dict(json.loads(text))

    @classmethod
    def from_gammas(cls, sigma0: float, gammas: Dict[int, float], nmax: int = 0, parity: str = GENERIC):
        """Build data from perturbed gamma_n = p_n^2 - sigma_0."""
        pert = {n: math.sqrt(g + sigma0) for n, g in gammas.items()}
        return cls(sigma0, pert, nmax, parity)


# ---------------------------------------------------------------- forward map


def _xi_bound(q: Potential, nmax: int, steps: int) -> float:
    ks = p_free(np.arange(1, nmax + 1))
    return max(abs(k - phase_function(q, k, steps)) for k in ks) + 1.0


def _solve_one(q, n, spread, steps):
    target = 0.5 * math.pi * n
    g = lambda k: phase_function(q, k, steps) - target
    w = spread
    for _ in range(4):
        lo, hi = max(target - w, 1e-12), target + w
        if g(lo) <= 0.0 < g(hi):
            break
        w *= 2.0
    else:
        raise BracketFailure(f"could not bracket p_{n}", n=n)
    while hi - lo > 1e-13 * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if g(mid) <= 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def solve_pn(q: Potential, nmax: int, steps: int = DEFAULT_STEPS, check: bool = True) -> np.ndarray:
    """p_1..p_nmax, the roots of k - xi(k) = pi n / 2 (k - xi(k) is increasing)."""
    if nmax < 1:
        raise ValueError("nmax must be >= 1")
    if check and not is_lplus(q, steps):
        raise NotLPlus("the Jost function of q has zeros in the upper half plane")
    spread = _xi_bound(q, nmax, steps)
    return np.array([_solve_one(q, n, spread, steps) for n in range(1, nmax + 1)])


def extract_data(q: Potential, nmax: int, steps: int = DEFAULT_STEPS) -> SpectralData:
    p = solve_pn(q, nmax, steps)
    return SpectralData(mean(q), {n: float(p[n - 1]) for n in range(1, nmax + 1)}, nmax, GENERIC)


def extract_even_data(q: Potential, nmax: int, steps: int = DEFAULT_STEPS, check: bool = True) -> SpectralData:
    """Even-parity data p_{2m} = sqrt(mu_m) for 2m <= nmax."""
    if check and not is_lplus(q, steps):
        raise NotLPlus("the Jost function of q has zeros in the upper half plane")
    mu = dirichlet_eigenvalues(q, nmax // 2, steps)
    if np.any(mu <= 0):
        raise InvalidSpectralData("even data needs mu_1 > 0")
    pert = {2 * m: float(math.sqrt(mu[m - 1])) for m in range(1, nmax // 2 + 1)}
    return SpectralData(mean(q), pert, nmax, EVEN)


# ---------------------------------------------------------------- even admissibility

_TAIL_TERMS = 100_000


def _frozen_mu(m, sigma0):
    return (math.pi * np.asarray(m, dtype=float)) ** 2 + sigma0


def _log_tail_product(lam: float, start: int, sigma0: float) -> float:
    """log prod_{j >= start} (1 - lam / mu_j) over frozen mu_j, with an integral remainder."""
    j = np.arange(start, start + _TAIL_TERMS, dtype=float)
    s = float(np.sum(np.log1p(-lam / _frozen_mu(j, sigma0))))
    return s - lam / (math.pi**2 * (start + _TAIL_TERMS - 0.5))


def mu_vprime(data: SpectralData, m: int, jcut: Optional[int] = None) -> float:
    """mu_m v'(mu_m) = -prod_{j != m} (1 - mu_m / mu_j), v(lam) = prod_j (1 - lam/mu_j)."""
    if jcut is None:
        jcut = max(data.nmax // 2, m) + 1
    lam = float(data.mu(m)[0])
    js = np.array([j for j in range(1, jcut + 1) if j != m])
    factors = 1.0 - lam / data.mu(js)
    sign = -1.0 if np.sum(factors < 0) % 2 == 0 else 1.0
    logabs = float(np.sum(np.log(np.abs(factors)))) + _log_tail_product(lam, jcut + 1, data.sigma0)
    return sign * math.exp(logabs)


def phi1_at_zero(data: SpectralData) -> float:
    """phi(1, 0) = prod_j mu_j / (pi j)^2, from the Dirichlet data alone."""
    mcut = data.nmax // 2 + 1
    j = np.arange(1, mcut + 1)
    head = float(np.sum(np.log(data.mu(j) / (math.pi * j) ** 2)))
    jt = np.arange(mcut + 1, mcut + 1 + _TAIL_TERMS, dtype=float)
    tail = float(np.sum(np.log1p(data.sigma0 / (math.pi * jt) ** 2)))
    tail += data.sigma0 / (math.pi**2 * (mcut + _TAIL_TERMS + 0.5))
    return math.exp(head + tail)


def even_condition_sum(data: SpectralData, extra: int = 200) -> float:
    """Left side of the even admissibility test; data is admissible iff it is <= 1.

    Equals 1 - phi'(1, 0): the truncated sum of ((-1)^m - cos p_{2m}) / (mu_m v'(mu_m))
    minus (sigma_0 / 2) phi(1, 0). The second term vanishes for mean-zero data.
    """
    # frozen-tail terms decay like 1/m^2, so the partial sums are
    # extrapolated from M and 2M assuming an O(1/M) remainder
    m1 = data.nmax // 2 + extra
    m2 = 2 * m1
    partial = {}
    total = 0.0
    for m in range(1, m2 + 1):
        p2m = float(data.p(2 * m)[0])
        num = (-1.0) ** m - math.cos(p2m)
        if num != 0.0:
            total += num / mu_vprime(data, m, jcut=max(m1, m) + 1)
        if m in (m1, m2):
            partial[m] = total
    total = (m2 * partial[m2] - m1 * partial[m1]) / (m2 - m1)
    return total - 0.5 * data.sigma0 * phi1_at_zero(data)


def validate_even(data: SpectralData) -> bool:
    if data.parity != EVEN:
        raise InvalidSpectralData("validate_even needs even-parity data")
    if float(data.mu(1)[0]) <= 0.0:
        return False
    return bool(even_condition_sum(data) <= 1.0 + EVEN_TOL)
