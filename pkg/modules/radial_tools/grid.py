"""Radial grids, sampled radial fields and quadrature on R^N."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import sparse
from scipy.special import gamma as gamma_fn

DEFAULT_R_MAX = 40.0
DEFAULT_NODES = 4001


def unit_sphere_area(N: int) -> float:
    """Surface measure of the unit sphere in R^N (2 for N=1, so half-line integrals double)."""
    return float(2.0 * np.pi ** (N / 2.0) / gamma_fn(N / 2.0))


def _readonly(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class RadialGrid:
    """
    Uniform discretization of [0, R_max] carrying the radial volume element.

    Weights are composite trapezoid weights times omega_N r^{N-1}; the origin
    has zero weight for N >= 2.
    """
    dimension: int
    r: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be a positive integer")
        if self.r.ndim != 1 or self.r.size < 3:
            raise ValueError("a radial grid needs at least 3 nodes")
        if self.r[0] != 0.0 or np.any(np.diff(self.r) <= 0):
            raise ValueError("grid nodes must start at 0 and increase strictly")
        if self.weights.shape != self.r.shape or np.any(self.weights < 0):
            raise ValueError("weights must be nonnegative and match the nodes")

    @classmethod
    def uniform(cls, N: int, R_max: float = DEFAULT_R_MAX, n_nodes: int = DEFAULT_NODES) -> "RadialGrid":
        """Build the uniform trapezoid grid used everywhere in the toolkit."""
        if R_max <= 0:
            raise ValueError("R_max must be positive")
        if n_nodes < 3:
            raise ValueError("a radial grid needs at least 3 nodes")
        r = np.linspace(0.0, float(R_max), int(n_nodes))
        h = r[1] - r[0]
        trap = np.full(r.size, h)
        trap[0] = trap[-1] = 0.5 * h
        weights = unit_sphere_area(N) * r ** (N - 1) * trap
        if N >= 2:
            weights[0] = 0.0
        return cls(dimension=int(N), r=_readonly(r), weights=_readonly(weights))

    @property
    def R_max(self) -> float:
        return float(self.r[-1])

    @property
    def h(self) -> float:
        return float(self.r[1] - self.r[0])

    @property
    def size(self) -> int:
        return int(self.r.size)

    def integrate(self, values: np.ndarray) -> float:
        """Quadrature of sampled radial values over R^N."""
        return float(np.dot(self.weights, values))

    def same_as(self, other: "RadialGrid") -> bool:
        """True when both grids have the same dimension and nodes."""
        return (
            self is other
            or (self.dimension == other.dimension and self.size == other.size and np.array_equal(self.r, other.r))
        )

    @cached_property
    def derivative_matrix(self) -> sparse.csr_matrix:
        """
        Second-order first-derivative stencil with u'(0) = 0 (even extension).

        For N >= 2 the origin carries no weight, so the node next to it uses a
        forward stencil and no weighted quantity depends on the origin value.
        """
        n, h = self.size, self.h
        D = sparse.diags([np.full(n - 1, -0.5 / h), np.full(n - 1, 0.5 / h)], [-1, 1], format="lil")
        D[0, 1] = 0.0
        if self.dimension >= 2:
            D[1, 0] = 0.0
            D[1, 1], D[1, 2], D[1, 3] = -1.5 / h, 2.0 / h, -0.5 / h
        D[n - 1, n - 1], D[n - 1, n - 2], D[n - 1, n - 3] = 1.5 / h, -2.0 / h, 0.5 / h
        return D.tocsr()

    @cached_property
    def second_derivative_matrix(self) -> sparse.csr_matrix:
        """Second-difference stencil with the even reflection at the origin."""
        n, h = self.size, self.h
        main = np.full(n, -2.0 / h ** 2)
        off = np.full(n - 1, 1.0 / h ** 2)
        D2 = sparse.diags([off, main, off], [-1, 0, 1], format="lil")
        D2[0, 1] = 2.0 / h ** 2
        D2[n - 1, n - 1], D2[n - 1, n - 2] = 2.0 / h ** 2, -5.0 / h ** 2
        D2[n - 1, n - 3], D2[n - 1, n - 4] = 4.0 / h ** 2, -1.0 / h ** 2
        return D2.tocsr()


@dataclass(frozen=True, eq=False)
class RadialField:
    """A radial function sampled on a RadialGrid."""
    grid: RadialGrid
    values: np.ndarray

    def __post_init__(self):
        values = _readonly(self.values)
        if values.shape != self.grid.r.shape:
            raise ValueError(f"field has {values.size} values for a grid of {self.grid.size} nodes")
        if not np.all(np.isfinite(values)):
            raise ValueError("field values must be finite")
        object.__setattr__(self, "values", values)

    @classmethod
    def from_function(cls, grid: RadialGrid, fn) -> "RadialField":
        """Sample a vectorized callable of r on the grid."""
        return cls(grid, fn(grid.r))

    @classmethod
    def zeros(cls, grid: RadialGrid) -> "RadialField":
        return cls(grid, np.zeros(grid.size))

    def with_values(self, values) -> "RadialField":
        return RadialField(self.grid, values)

    def scaled(self, factor: float) -> "RadialField":
        return RadialField(self.grid, factor * self.values)

    @property
    def r(self) -> np.ndarray:
        return self.grid.r


def integrate_radial(f: RadialField) -> float:
    """Integral over R^N of a radial field."""
    return f.grid.integrate(f.values)


def radial_derivative(u: RadialField, even: bool = True) -> RadialField:
    """u'(r) by second-order differences; even=False drops the u'(0)=0 condition."""
    du = u.grid.derivative_matrix @ u.values
    if not even:
        h, v = u.grid.h, u.values
        du[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h)
    return RadialField(u.grid, du)


def radial_laplacian(u: RadialField) -> RadialField:
    """u'' + (N-1)u'/r, replaced by N u''(0) at the origin."""
    grid = u.grid
    d2 = grid.second_derivative_matrix @ u.values
    d1 = grid.derivative_matrix @ u.values
    lap = d2.copy()
    if grid.dimension > 1:
        lap[1:] += (grid.dimension - 1) * d1[1:] / grid.r[1:]
        lap[0] = grid.dimension * d2[0]
    return RadialField(grid, lap)


def lq_norm(u: RadialField, q: float) -> float:
    """(int |u|^q)^{1/q}."""
    if q < 1:
        raise ValueError("lq_norm needs q >= 1")
    return integrate_radial(u.with_values(np.abs(u.values) ** q)) ** (1.0 / q)


def inner_product(u: RadialField, v: RadialField) -> float:
    """L2 pairing of two fields on the same grid."""
    return u.grid.integrate(u.values * v.values)
