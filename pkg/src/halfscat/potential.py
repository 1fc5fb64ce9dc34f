"""Sampled real potentials supported on [0, 1]."""

from __future__ import annotations

import json
import math
from typing import Callable

import numpy as np

DEFAULT_GRID_N = 2049
_CT_TOL = 1e-10
_CT_MAX_NODES = 2**20


def _trapezoid(values: np.ndarray, dx: float):
    out = dx * (values.sum() - 0.5 * (values[0] + values[-1]))
    return complex(out) if np.iscomplexobj(values) else float(out)


class Potential:
    """Real potential sampled on the uniform nodes x_i = i/(grid_n - 1).

    Between nodes the potential is piecewise linear; for x > 1 (and x < 0) it
    is identically zero. Instances are immutable.
    """

    __slots__ = ("_values", "_sigma0")

    def __init__(self, values):
        arr = np.array(values, dtype=float).ravel()
        if arr.size < 2:
            raise ValueError("a potential needs at least two nodes")
        if not np.all(np.isfinite(arr)):
            raise ValueError("potential values must be finite")
        arr.setflags(write=False)
        self._values = arr
        self._sigma0 = _trapezoid(arr, 1.0 / (arr.size - 1))

    # construction helpers
    @classmethod
    def from_function(cls, f: Callable, grid_n: int = DEFAULT_GRID_N) -> "Potential":
        x = np.linspace(0.0, 1.0, grid_n)
        return cls(np.broadcast_to(np.asarray(f(x), dtype=float), x.shape))

    @classmethod
    def zero(cls, grid_n: int = DEFAULT_GRID_N) -> "Potential":
        return cls(np.zeros(grid_n))

    @classmethod
    def constant(cls, c: float, grid_n: int = DEFAULT_GRID_N) -> "Potential":
        return cls(np.full(grid_n, float(c)))

    # data access
    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def grid_n(self) -> int:
        return self._values.size

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.grid_n)

    @property
    def sigma0(self) -> float:
        """Cached trapezoid value of the integral of q over [0, 1]."""
        return self._sigma0

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.interp(x, self.nodes, self._values)
        out = np.where((x < 0.0) | (x > 1.0), 0.0, out)
        return out if out.ndim else float(out)

    def l1_norm(self) -> float:
        return _trapezoid(np.abs(self._values), 1.0 / (self.grid_n - 1))

    def l2_norm(self) -> float:
        return math.sqrt(_trapezoid(self._values**2, 1.0 / (self.grid_n - 1)))

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self._values)))

    def is_even(self, tol: float = 1e-8) -> bool:
        return bool(np.max(np.abs(self._values - self._values[::-1])) <= tol)

    # arithmetic on a shared grid
    def _check_grid(self, other: "Potential"):
        if other.grid_n != self.grid_n:
            raise ValueError("potentials live on different grids")

    def __add__(self, other):
        if isinstance(other, Potential):
            self._check_grid(other)
            return Potential(self._values + other._values)
        return Potential(self._values + float(other))

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Potential):
            self._check_grid(other)
            return Potential(self._values - other._values)
        return Potential(self._values - float(other))

    def __mul__(self, a):
        return Potential(self._values * float(a))

    __rmul__ = __mul__

    def __neg__(self):
        return Potential(-self._values)

    def __eq__(self, other):
        return isinstance(other, Potential) and np.array_equal(self._values, other._values)

    def __hash__(self):
        return hash(self._values.tobytes())

    def __repr__(self):
        return f"Potential(grid_n={self.grid_n}, sigma0={self._sigma0:.6g})"

    # serialization
    def to_dict(self) -> dict:
        return {"grid_n": self.grid_n, "values": self._values.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "Potential":
        values = data["values"]
        if int(data["grid_n"]) != len(values):
            raise ValueError("grid_n does not match the number of values")
        return cls(values)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "Potential":
        return cls.from_dict(json.loads(text))


def mean(q: Potential) -> float:
    """Trapezoid value of the integral of q over [0, 1]."""
    return _trapezoid(q.values, 1.0 / (q.grid_n - 1))


def _simpson_cos(q: Potential, k: float, intervals: int) -> float:
    x = np.linspace(0.0, 1.0, intervals + 1)
    f = np.interp(x, q.nodes, q.values) * np.cos(2.0 * k * x)
    h = 1.0 / intervals
    return float(h / 3.0 * (f[0] + f[-1] + 4.0 * f[1:-1:2].sum() + 2.0 * f[2:-1:2].sum()))


def cosine_transform(q: Potential, k: float) -> float:
    """Integral of q(x) cos(2kx) over [0, 1].

    Composite Simpson on node-aligned grids, doubled until successive values
    agree to 1e-10 (or 2**20 nodes); the last pair is Richardson-combined.
    """
    intervals = q.grid_n - 1
    if intervals % 2:
        intervals *= 2
    prev = _simpson_cos(q, k, intervals)
    while True:
        intervals *= 2
        cur = _simpson_cos(q, k, intervals)
        if abs(cur - prev) < _CT_TOL or intervals + 1 > _CT_MAX_NODES:
            return cur + (cur - prev) / 15.0
        prev = cur


def fourier_transform(q: Potential, k: complex) -> complex:
    """q-hat(k) = integral of q(x) exp(2ikx) over [0, 1] (trapezoid on a fine grid)."""
    n = max(8 * (q.grid_n - 1), int(64 * abs(k)) + 1)
    x = np.linspace(0.0, 1.0, n + 1)
    f = np.interp(x, q.nodes, q.values) * np.exp(2j * k * x)
    return complex(_trapezoid(f, 1.0 / n))
