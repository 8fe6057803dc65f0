"""JSON run configuration: schema defaults, loading, and object builders.

A config file is a JSON object with optional sections; anything omitted
falls back to the defaults below.

    {
      "grid":      {"x_min": -20.0, "x_max": 20.0, "n": 2001},
      "design":    {"a": 12.0, "b": 1000.0, "mu": 2.0, "delta": 1e-4,
                    "beta_mode": "fixed", "beta_halfwidth": 2.0,
                    "wronskian_tol": 1e-8},
      "init":      {"A": 1.5, "B": 1.5},
      "optimizer": {"tau_start": 1e-2, "tau_min": 1e-8, "tau_factor": 0.1,
                    "max_iters": 150, "memory": 10, "armijo": 1e-4,
                    "backtrack": 0.5, "grad_tol": 1e-10, "symmetric": false},
      "simulator": {"epsilon": 1.0, "t_final": 40.0, "dt_max": 0.05,
                    "domain": {"x_min": -60.0, "x_max": 60.0, "n": 3001},
                    "absorber": {"width": 15.0, "strength": 1.0},
                    "noise_amplitude": 0.5, "seed": 0,
                    "fit_window": [5.0, 40.0]},
      "gradcheck": {"seed": 0, "n_directions": 10, "fd_step": 1e-5},
      "sweep":     {"vary": "a", "values": [4.0, 8.0, 16.0]}
    }

The simulator forcing frequency is design.mu.  beta_mode "fixed" uses the
indicator of [-beta_halfwidth, beta_halfwidth]; "equals_v" forces with the
potential itself.
"""
from __future__ import annotations

import copy
import json

import numpy as np

from .errors import ConfigError
from .grid import BetaMode, DesignParams, Grid, PotentialField, make_grid, sech_well
from .optimizer import OptOptions
from .timedomain import Absorber, SimConfig

__all__ = ["DEFAULTS", "load_config", "merge", "builders"]

DEFAULTS: dict = {
    "grid": {"x_min": -20.0, "x_max": 20.0, "n": 2001},
    "design": {
        "a": 12.0,
        "b": 1000.0,
        "mu": 2.0,
        "delta": 1e-4,
        "beta_mode": "fixed",
        "beta_halfwidth": 2.0,
        "wronskian_tol": 1e-8,
    },
    "init": {"A": 1.5, "B": 1.5},
    "optimizer": {
        "tau_start": 1e-2,
        "tau_min": 1e-8,
        "tau_factor": 0.1,
        "max_iters": 150,
        "memory": 10,
        "armijo": 1e-4,
        "backtrack": 0.5,
        "grad_tol": 1e-10,
        "symmetric": False,
    },
    "simulator": {
        "epsilon": 1.0,
        "t_final": 40.0,
        "dt_max": 0.05,
        "domain": {"x_min": -60.0, "x_max": 60.0, "n": 3001},
        "absorber": {"width": 15.0, "strength": 1.0},
        "noise_amplitude": 0.5,
        "seed": 0,
        "fit_window": [5.0, 40.0],
    },
    "gradcheck": {"seed": 0, "n_directions": 10, "fd_step": 1e-3},
    "sweep": {"vary": "a", "values": [4.0, 8.0, 16.0]},
}


def merge(base: dict, override: dict) -> dict:
    """Recursive dict merge; override wins leaf-by-leaf."""
    out = copy.deepcopy(base)
    for key, val in override.items():
        if isinstance(val, dict) and isinstance(out.get(key), dict):
            out[key] = merge(out[key], val)
        else:
            out[key] = copy.deepcopy(val)
    return out


def load_config(path: str | None) -> dict:
    """Defaults merged with the JSON file at path (path may be None)."""
    if path is None:
        return copy.deepcopy(DEFAULTS)
    try:
        with open(path) as fh:
            user = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(user, dict):
        raise ConfigError(f"config {path} must be a JSON object")
    unknown = set(user) - set(DEFAULTS)
    if unknown:
        raise ConfigError(f"unknown config sections: {sorted(unknown)}")
    return merge(DEFAULTS, user)


class builders:
    """Constructors from a merged config dict to domain objects."""

    @staticmethod
    def grid(cfg: dict) -> Grid:
        g = cfg["grid"]
        try:
            return make_grid(g["x_min"], g["x_max"], g["n"])
        except (KeyError, ValueError, TypeError) as exc:
            raise ConfigError(f"bad grid section: {exc}") from exc

    @staticmethod
    def beta(cfg: dict, grid: Grid) -> PotentialField:
        d = cfg["design"]
        hw = float(d["beta_halfwidth"])
        vals = np.where(np.abs(grid.x) <= hw, 1.0, 0.0)
        return PotentialField(grid, vals, float(d["a"]))

    @staticmethod
    def design(cfg: dict, grid: Grid) -> DesignParams:
        d = cfg["design"]
        try:
            mode = BetaMode(d["beta_mode"])
        except ValueError as exc:
            raise ConfigError(f"beta_mode must be 'fixed' or 'equals_v'") from exc
        beta = builders.beta(cfg, grid) if mode is BetaMode.FIXED else None
        try:
            return DesignParams(
                a=float(d["a"]),
                b=float(d["b"]),
                mu=float(d["mu"]),
                delta=float(d["delta"]),
                beta_mode=mode,
                beta=beta,
                wronskian_tol=float(d["wronskian_tol"]),
            )
        except (KeyError, ValueError, TypeError) as exc:
            raise ConfigError(f"bad design section: {exc}") from exc

    @staticmethod
    def initial_potential(cfg: dict, grid: Grid) -> PotentialField:
        i = cfg["init"]
        try:
            return sech_well(float(i["A"]), float(i["B"]), float(cfg["design"]["a"]), grid)
        except (KeyError, ValueError, TypeError) as exc:
            raise ConfigError(f"bad init section: {exc}") from exc

    @staticmethod
    def opt_options(cfg: dict) -> OptOptions:
        o = cfg["optimizer"]
        try:
            return OptOptions(
                tau_start=float(o["tau_start"]),
                tau_min=float(o["tau_min"]),
                tau_factor=float(o["tau_factor"]),
                max_iters=int(o["max_iters"]),
                memory=int(o["memory"]),
                armijo=float(o["armijo"]),
                backtrack=float(o["backtrack"]),
                grad_tol=float(o["grad_tol"]),
                symmetric=bool(o["symmetric"]),
            )
        except (KeyError, ValueError, TypeError) as exc:
            raise ConfigError(f"bad optimizer section: {exc}") from exc

    @staticmethod
    def sim_config(cfg: dict) -> SimConfig:
        s = cfg["simulator"]
        try:
            dom = s["domain"]
            return SimConfig(
                epsilon=float(s["epsilon"]),
                mu=float(cfg["design"]["mu"]),
                t_final=float(s["t_final"]),
                dt_max=float(s["dt_max"]),
                absorber=Absorber(
                    width=float(s["absorber"]["width"]),
                    strength=float(s["absorber"]["strength"]),
                ),
                domain=make_grid(dom["x_min"], dom["x_max"], dom["n"]),
            )
        except (KeyError, ValueError, TypeError) as exc:
            raise ConfigError(f"bad simulator section: {exc}") from exc
