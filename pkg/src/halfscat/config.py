"""Run configuration: defaults, JSON file overrides and environment overrides."""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field, fields
from typing import Dict, Mapping, Optional

ENV_PREFIX = "HALFSCAT_"
TOL_FLOOR = 1e-15


def default_tolerances() -> Dict[str, float]:
    return {
        "lplus": 1e-9,
        "bisect_rtol": 1e-13,
        "degeneracy": 1e-10,
        "singular": 1e-12,
        "even": 1e-9,
        "near_zero_jost": 1e-12,
        "zero": 1e-8,
        "leak": 1e-6,
        "newton": 1e-8,
        "tikhonov": 1e-12,
    }


@dataclass
class RunConfig:
    ode_steps: int = 4096
    grid_n: int = 2049
    nmax: int = 32
    seed: int = 0
    tolerances: Dict[str, float] = field(default_factory=default_tolerances)

    def __post_init__(self):
        for name in ("ode_steps", "grid_n", "nmax"):
            if int(getattr(self, name)) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        for k, v in self.tolerances.items():
            if not float(v) >= TOL_FLOOR:
                raise ValueError(f"tolerance {k} = {v} is below {TOL_FLOOR}")

    def tol(self, name: str) -> float:
        return float(self.tolerances[name])

    def to_dict(self) -> dict:
        return asdict(self)

    def merged(self, overrides: Mapping) -> "RunConfig":
        d = self.to_dict()
        for k, v in overrides.items():
            if k == "tolerances":
                unknown = set(v) - set(d["tolerances"])
                if unknown:
                    raise ValueError(f"unknown tolerances: {sorted(unknown)}")
                d["tolerances"].update({kk: float(vv) for kk, vv in v.items()})
            elif k in d:
                d[k] = int(v)
            else:
                raise ValueError(f"unknown config key {k!r}")
        return RunConfig(**d)


def env_overrides(environ: Optional[Mapping[str, str]] = None) -> dict:
    """HALFSCAT_ODE_STEPS, HALFSCAT_GRID_N, HALFSCAT_NMAX, HALFSCAT_SEED, HALFSCAT_TOL_<NAME>."""
    environ = os.environ if environ is None else environ
    out: dict = {}
    scalar = {f.name for f in fields(RunConfig)} - {"tolerances"}
    for key, val in environ.items():
        if not key.startswith(ENV_PREFIX):
            continue
        name = key[len(ENV_PREFIX):].lower()
        if name.startswith("tol_"):
            out.setdefault("tolerances", {})[name[4:]] = float(val)
        elif name in scalar:
            out[name] = int(val)
    return out


def load_config(path: Optional[str] = None, environ: Optional[Mapping[str, str]] = None) -> RunConfig:
    """Defaults, then the JSON file at ``path``, then environment variables."""
    cfg = RunConfig()
    if path:
        with open(path) as fh:
            cfg = cfg.merged(json.load(fh))
    return cfg.merged(env_overrides(environ))


_TOL_TARGETS = {
    "lplus": [("spectra", "LPLUS_TOL")],
    "bisect_rtol": [("spectra", "BISECT_RTOL")],
    "degeneracy": [("recover", "DEGENERACY_TOL")],
    "singular": [("recover", "SINGULAR_TOL")],
    "even": [("phasemap", "EVEN_TOL")],
    "near_zero_jost": [("scattering", "NEAR_ZERO_JOST"), ("smap", "NEAR_ZERO_JOST")],
    "zero": [("dressing", "ZERO_TOL")],
    "leak": [("dressing", "LEAK_TOL")],
    "tikhonov": [("smap", "TIKHONOV")],
}


def apply_tolerances(cfg: RunConfig) -> None:
    """Install cfg.tolerances as the module-level thresholds."""
    import importlib

    for name, targets in _TOL_TARGETS.items():
        for mod, attr in targets:
            setattr(importlib.import_module(f"halfscat.{mod}"), attr, cfg.tol(name))
