"""Uniform 1D grid, potential representation and design parameters."""
from __future__ import annotations

import enum
import hashlib
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Grid",
    "PotentialField",
    "BetaMode",
    "DesignParams",
    "make_grid",
    "sech_well",
    "square_well",
    "h1_norm_sq",
    "h1_gradient",
    "trapz",
]


@dataclass(frozen=True)
class Grid:
    """Uniform grid on [x_min, x_max] with n nodes."""

    x_min: float
    x_max: float
    n: int

    @property
    def h(self) -> float:
        return (self.x_max - self.x_min) / (self.n - 1)

    @property
    def x(self) -> np.ndarray:
        # centered generation: reproducible bit-exactly, and exactly
        # antisymmetric on symmetric domains (x[j] == -x[n-1-j]), which the
        # reflection-symmetry machinery downstream relies on
        center = 0.5 * (self.x_min + self.x_max)
        return center + self.h * (np.arange(self.n) - (self.n - 1) / 2.0)

    @property
    def weights(self) -> np.ndarray:
        """Trapezoidal quadrature weights."""
        w = np.full(self.n, self.h)
        w[0] = w[-1] = 0.5 * self.h
        return w


def make_grid(x_min: float, x_max: float, n: int) -> Grid:
    if n < 3:
        raise ValueError(f"need at least 3 nodes, got n={n}")
    if not x_max > x_min:
        raise ValueError(f"need x_max > x_min, got [{x_min}, {x_max}]")
    return Grid(float(x_min), float(x_max), int(n))


def trapz(grid: Grid, values: np.ndarray) -> float | complex:
    """Trapezoidal rule on the uniform grid."""
    return grid.weights @ values


@dataclass(frozen=True)
class PotentialField:
    """Sampled potential with compact support in [-a, a]."""

    grid: Grid
    values: np.ndarray
    support_halfwidth: float

    def __post_init__(self):
        object.__setattr__(self, "values",
                           np.array(self.values, dtype=float, copy=True))
        if len(self.values) != self.grid.n:
            raise ValueError("values length does not match grid")
        if not self.support_halfwidth < self.grid.x_max:
            raise ValueError("support must lie strictly inside the domain")
        outside = np.abs(self.grid.x) > self.support_halfwidth
        if np.any(self.values[outside] != 0.0):
            raise ValueError("potential must vanish outside [-a, a]")
        self.values.setflags(write=False)

    @property
    def support_mask(self) -> np.ndarray:
        return np.abs(self.grid.x) <= self.support_halfwidth

    def with_values(self, values: np.ndarray) -> "PotentialField":
        v = np.where(self.support_mask, values, 0.0)
        return PotentialField(self.grid, v, self.support_halfwidth)

    def content_hash(self) -> str:
        m = hashlib.sha256()
        m.update(np.asarray(self.values).tobytes())
        m.update(repr((self.grid.x_min, self.grid.x_max, self.grid.n,
                       self.support_halfwidth)).encode())
        return m.hexdigest()


class BetaMode(enum.Enum):
    FIXED = "fixed"
    EQUALS_V = "equals_v"


@dataclass(frozen=True)
class DesignParams:
    """Constraint set parameters and forcing profile.

    a: support halfwidth; b: H1 bound; mu: forcing frequency; delta:
    Wronskian relaxation margin; beta: fixed forcing profile (ignored when
    beta_mode is EQUALS_V).
    """

    a: float
    b: float
    mu: float
    delta: float
    beta_mode: BetaMode = BetaMode.FIXED
    beta: PotentialField | None = None
    wronskian_tol: float = 1e-8

    def __post_init__(self):
        if self.a <= 0 or self.b <= 0 or self.mu <= 0 or self.delta <= 0:
            raise ValueError("a, b, mu, delta must all be positive")
        if self.beta_mode is BetaMode.FIXED and self.beta is None:
            raise ValueError("fixed beta_mode requires a beta profile")

    def beta_values(self, V: PotentialField) -> np.ndarray:
        if self.beta_mode is BetaMode.EQUALS_V:
            return np.asarray(V.values)
        return np.asarray(self.beta.values)


def sech_well(A: float, B: float, a: float, grid: Grid) -> PotentialField:
    """Truncated sech well -A*sech(B*x) on |x| <= a, zero outside."""
    if A <= 0 or B <= 0:
        raise ValueError("A and B must be positive")
    if a >= grid.x_max:
        raise ValueError("support must lie strictly inside the domain")
    x = grid.x
    v = np.where(np.abs(x) <= a, -A / np.cosh(B * x), 0.0)
    return PotentialField(grid, v, a)


def square_well(depth: float, halfwidth: float, a: float, grid: Grid) -> PotentialField:
    """Square well -depth on |x| <= halfwidth, for tests and experiments.

    Nodes that land exactly on the jump get the mean value -depth/2, which
    restores second-order accuracy of the 3-point stencil across the
    discontinuity.
    """
    if a >= grid.x_max:
        raise ValueError("support must lie strictly inside the domain")
    x = grid.x
    v = np.where(np.abs(x) <= halfwidth, -depth, 0.0)
    v[np.isclose(np.abs(x), halfwidth, rtol=0.0, atol=1e-12 * max(1.0, halfwidth))] = -0.5 * depth
    v[np.abs(x) > a] = 0.0
    return PotentialField(grid, v, a)


def _derivative(grid: Grid, values: np.ndarray) -> np.ndarray:
    """Centered differences on interior nodes, one-sided at the endpoints."""
    h = grid.h
    d = np.empty_like(values, dtype=float)
    d[1:-1] = (values[2:] - values[:-2]) / (2 * h)
    d[0] = (values[1] - values[0]) / h
    d[-1] = (values[-1] - values[-2]) / h
    return d


def h1_norm_sq(V: PotentialField) -> float:
    """Squared H1 norm: trapezoidal integral of V^2 + (V')^2."""
    v = np.asarray(V.values, dtype=float)
    dv = _derivative(V.grid, v)
    return float(trapz(V.grid, v * v + dv * dv))


def h1_gradient(V: PotentialField) -> np.ndarray:
    """Exact nodal gradient of the discrete h1_norm_sq quadratic form.

    h1_norm_sq(V) = V^T Q V with Q = W + D^T W D (W trapezoid weights, D
    the difference stencil above); the gradient is 2 Q V.
    """
    grid = V.grid
    v = np.asarray(V.values, dtype=float)
    w = grid.weights
    dv = _derivative(grid, v)
    wd = w * dv
    h = grid.h
    # apply D^T to (w * Dv)
    g = np.zeros_like(v)
    g[2:] += wd[1:-1] / (2 * h)
    g[:-2] -= wd[1:-1] / (2 * h)
    g[0] -= wd[0] / h
    g[1] += wd[0] / h
    g[-2] -= wd[-1] / h
    g[-1] += wd[-1] / h
    return 2.0 * (w * v + g)
