"""Sampled functions on the torus T = R/2piZ.

Functions are stored by their values on the uniform grid z_p = 2*pi*p/m.
All integrals use the normalized Haar measure dt/(2*pi), realized by the
m-point rectangle rule (1/m) * sum_p f(z_p), which is exact for
trigonometric polynomials of degree < m/2.  The one exception is
``window_integral``, which is an unnormalized (plain dt) Riemann sum.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import AliasingError, GridMismatchError

__all__ = [
    "TorusGrid",
    "SampledFunction",
    "FunctionTuple",
    "integrate",
    "fourier_coeff",
    "l2_distance",
    "window_integral",
]

REAL_TOL = 1e-10

# slack for closed-window membership tests: grid points sitting exactly on
# the window boundary must not fall out due to rounding of 2*pi*p/m
_BOUNDARY_EPS = 1e-12


@dataclass(frozen=True)
class TorusGrid:
    """Uniform grid of m points z_p = 2*pi*p/m, p = 0..m-1."""

    m: int

    def __post_init__(self):
        if self.m < 2:
            raise ValueError(f"grid needs at least 2 points, got m={self.m}")

    @cached_property
    def points(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.m) / self.m

    @property
    def spacing(self) -> float:
        return 2.0 * np.pi / self.m

    def max_alias_free_coeff(self) -> int:
        """Largest |k| for which the rectangle rule recovers the Fourier
        coefficient of a degree-<m/2 trigonometric polynomial exactly."""
        return (self.m - 1) // 2


@dataclass(frozen=True)
class SampledFunction:
    """A function on the torus stored by its (complex) grid values."""

    grid: TorusGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.shape != (self.grid.m,):
            raise ValueError(
                f"values shape {values.shape} does not match grid m={self.grid.m}"
            )
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_callable(cls, grid: TorusGrid, f) -> "SampledFunction":
        return cls(grid, np.asarray(f(grid.points), dtype=complex))

    @classmethod
    def constant(cls, grid: TorusGrid, value: complex) -> "SampledFunction":
        return cls(grid, np.full(grid.m, value, dtype=complex))

    def is_real(self, tol: float = REAL_TOL) -> bool:
        return float(np.max(np.abs(self.values.imag))) <= tol

    def assert_real(self, tol: float = REAL_TOL) -> None:
        worst = float(np.max(np.abs(self.values.imag)))
        if worst > tol:
            raise ValueError(f"function tagged real has |Im| up to {worst:.3e}")

    def conj(self) -> "SampledFunction":
        return SampledFunction(self.grid, np.conj(self.values))

    def __sub__(self, other: "SampledFunction") -> "SampledFunction":
        require_same_grid(self, other)
        return SampledFunction(self.grid, self.values - other.values)


@dataclass(frozen=True)
class FunctionTuple:
    """An element of A^d: d sampled functions sharing one grid."""

    components: tuple[SampledFunction, ...]

    def __post_init__(self):
        comps = tuple(self.components)
        if not comps:
            raise ValueError("FunctionTuple needs at least one component")
        grid = comps[0].grid
        for c in comps[1:]:
            if c.grid != grid:
                raise GridMismatchError("tuple components live on different grids")
        object.__setattr__(self, "components", comps)

    @property
    def d(self) -> int:
        return len(self.components)

    @property
    def grid(self) -> TorusGrid:
        return self.components[0].grid

    def value_matrix(self) -> np.ndarray:
        """Grid values stacked as an (m, d) array."""
        return np.stack([c.values for c in self.components], axis=1)


def require_same_grid(f: SampledFunction, g: SampledFunction) -> None:
    if f.grid != g.grid:
        raise GridMismatchError(
            f"grid mismatch: m={f.grid.m} vs m={g.grid.m}"
        )


def integrate(f: SampledFunction) -> complex:
    """Normalized integral (1/m) sum_p f(z_p); exact for trigonometric
    polynomials of degree < m/2."""
    return complex(np.mean(f.values))


def fourier_coeff(f: SampledFunction, k: int) -> complex:
    """k-th Fourier coefficient (1/m) sum_p f(z_p) e^{-ik z_p}.

    Raises
    ------
    AliasingError
        If |k| >= m/2: the rectangle rule folds coefficient k onto
        k mod m and the result would be corrupted by aliasing.
    """
    m = f.grid.m
    if 2 * abs(k) >= m:
        raise AliasingError(f"coefficient k={k} aliases on an m={m} grid")
    return _fourier_coeff_unchecked(f, k)


def _fourier_coeff_unchecked(f: SampledFunction, k: int) -> complex:
    return complex(np.mean(f.values * np.exp(-1j * k * f.grid.points)))


def l2_distance(f: SampledFunction, g: SampledFunction) -> float:
    """L2(T) distance under the normalized measure:
    sqrt((1/m) sum_p |f(z_p) - g(z_p)|^2)."""
    require_same_grid(f, g)
    diff = f.values - g.values
    return float(np.sqrt(np.mean(np.abs(diff) ** 2)))


def window_membership(grid: TorusGrid, z: float, delta: float) -> np.ndarray:
    """Boolean mask of grid points whose circular distance to z is <= delta
    (closed window, with a tiny slack so exact-boundary points stay in)."""
    raw = np.abs(np.remainder(grid.points - z + np.pi, 2.0 * np.pi) - np.pi)
    return raw <= delta + _BOUNDARY_EPS


def window_integral(f: SampledFunction, z: float, delta: float) -> complex:
    """Unnormalized windowed integral int_{z-delta}^{z+delta} f(t) dt,
    approximated by (2*pi/m) * sum over grid points within circular
    distance delta of z.

    This is the one deliberately unnormalized integral in the package: it
    feeds nonlinear targets where the absolute scale matters.
    """
    if not 0.0 < delta < np.pi:
        raise ValueError(f"window half-width must satisfy 0 < delta < pi, got {delta}")
    mask = window_membership(f.grid, z, delta)
    return complex(f.grid.spacing * np.sum(f.values[mask]))
