"""Shared domain types: grids on (0, pi), multi-component fields, reaction systems.

Fields store their values node-major, shape (nodes..., m), so the pointwise
reaction solve works on contiguous per-node blocks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

# Sup-norm above which a run is declared blown up (stability experiments need
# a deterministic "unstable" verdict; NaN/Inf also counts).
BLOWUP_THRESHOLD = 1.0e8


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid on [0, pi] with N intervals, nodes x_j = j*pi/N, j = 0..N."""

    n_intervals: int

    def __post_init__(self):
        if self.n_intervals < 4:
            raise ValueError(
                f"n_intervals must be >= 4 (third-order shift needs 4 cosine modes), got {self.n_intervals}"
            )

    @property
    def h(self) -> float:
        return np.pi / self.n_intervals

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(0.0, np.pi, self.n_intervals + 1)


def make_grid_1d(n_intervals: int) -> Grid1D:
    return Grid1D(int(n_intervals))


@dataclass(frozen=True)
class Grid2D:
    """Tensor-product uniform grid on [0, pi]^2."""

    n_intervals_x: int
    n_intervals_y: int

    def __post_init__(self):
        if self.n_intervals_x < 4 or self.n_intervals_y < 4:
            raise ValueError("each direction needs n_intervals >= 4")

    @property
    def hx(self) -> float:
        return np.pi / self.n_intervals_x

    @property
    def hy(self) -> float:
        return np.pi / self.n_intervals_y

    @property
    def nodes_x(self) -> np.ndarray:
        return np.linspace(0.0, np.pi, self.n_intervals_x + 1)

    @property
    def nodes_y(self) -> np.ndarray:
        return np.linspace(0.0, np.pi, self.n_intervals_y + 1)


def make_grid_2d(n_intervals_x: int, n_intervals_y: int | None = None) -> Grid2D:
    if n_intervals_y is None:
        n_intervals_y = n_intervals_x
    return Grid2D(int(n_intervals_x), int(n_intervals_y))


def _as_node_major(values: np.ndarray, node_shape: tuple[int, ...]) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    if values.shape == node_shape:
        values = values[..., np.newaxis]
    if values.shape[: len(node_shape)] != node_shape or values.ndim != len(node_shape) + 1:
        raise ValueError(f"values shape {values.shape} incompatible with node shape {node_shape}")
    return np.ascontiguousarray(values)


@dataclass(frozen=True)
class Field:
    """m-component values on a Grid1D, shape (N+1, m)."""

    grid: Grid1D
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(
            self, "values", _as_node_major(self.values, (self.grid.n_intervals + 1,))
        )

    @property
    def m(self) -> int:
        return self.values.shape[-1]

    def with_values(self, values: np.ndarray) -> "Field":
        return Field(self.grid, values)

    def blown_up(self, threshold: float = BLOWUP_THRESHOLD) -> bool:
        return not np.all(np.isfinite(self.values)) or np.max(np.abs(self.values)) > threshold

    @staticmethod
    def zeros(grid: Grid1D, m: int = 1) -> "Field":
        return Field(grid, np.zeros((grid.n_intervals + 1, m)))

    @staticmethod
    def from_function(grid: Grid1D, fn: Callable) -> "Field":
        return Field(grid, np.atleast_1d(np.asarray(fn(grid.nodes), dtype=float)))


@dataclass(frozen=True)
class Field2D:
    """m-component values on a Grid2D, shape (Nx+1, Ny+1, m); values[i, j] = u(x_i, y_j)."""

    grid: Grid2D
    values: np.ndarray

    def __post_init__(self):
        node_shape = (self.grid.n_intervals_x + 1, self.grid.n_intervals_y + 1)
        object.__setattr__(self, "values", _as_node_major(self.values, node_shape))

    @property
    def m(self) -> int:
        return self.values.shape[-1]

    def with_values(self, values: np.ndarray) -> "Field2D":
        return Field2D(self.grid, values)

    def blown_up(self, threshold: float = BLOWUP_THRESHOLD) -> bool:
        return not np.all(np.isfinite(self.values)) or np.max(np.abs(self.values)) > threshold

    @staticmethod
    def zeros(grid: Grid2D, m: int = 1) -> "Field2D":
        return Field2D(grid, np.zeros((grid.n_intervals_x + 1, grid.n_intervals_y + 1, m)))


@dataclass(frozen=True)
class ReactionSystem:
    """Pointwise nonlinear term f(x, t, u) with its m x m Jacobian df/du.

    Both callables are vectorized over nodes: ``u`` has shape (..., m), ``eval``
    returns (..., m) and ``jacobian`` returns (..., m, m).  ``x`` is the node
    coordinate array (1D grids) or an (X, Y) pair (2D grids); reactions that do
    not depend on position ignore it.
    """

    m: int
    eval: Callable = field(repr=False)
    jacobian: Callable = field(repr=False)

    def check_jacobian(self, x, t: float, u: np.ndarray, eps: float = 1.0e-6,
                       tol: float = 1.0e-4) -> float:
        """Finite-difference consistency check; returns the worst mismatch."""
        u = np.asarray(u, dtype=float)
        jac = self.jacobian(x, t, u)
        worst = 0.0
        f0 = self.eval(x, t, u)
        for j in range(self.m):
            du = np.zeros_like(u)
            du[..., j] = eps
            fd = (self.eval(x, t, u + du) - f0) / eps
            worst = max(worst, float(np.max(np.abs(fd - jac[..., :, j]))))
        if worst > tol:
            raise ValueError(f"jacobian inconsistent with eval: mismatch {worst:.3e}")
        return worst


def zero_reaction(m: int = 1) -> ReactionSystem:
    """f == 0 (pure diffusion)."""

    def _eval(x, t, u):
        return np.zeros_like(u)

    def _jac(x, t, u):
        return np.zeros(u.shape + (m,))

    return ReactionSystem(m=m, eval=_eval, jacobian=_jac)


def source_reaction(source: Callable, m: int = 1) -> ReactionSystem:
    """u-independent source term f(x, t, u) = s(x, t)."""

    def _eval(x, t, u):
        s = np.asarray(source(x, t), dtype=float)
        if s.shape != u.shape:
            s = np.broadcast_to(s[..., np.newaxis] if s.ndim == u.ndim - 1 else s, u.shape)
        return np.array(s, dtype=float)

    def _jac(x, t, u):
        return np.zeros(u.shape + (m,))

    return ReactionSystem(m=m, eval=_eval, jacobian=_jac)


@dataclass
class SchemeState:
    """Two-level state of the two-step scheme: u^n, u^{n-1}, t_n, dt."""

    u_curr: Field | Field2D
    u_prev: Field | Field2D
    time: float
    dt: float

    def __post_init__(self):
        if self.dt <= 0.0:
            raise ValueError("dt must be positive")
        if self.u_curr.grid != self.u_prev.grid or self.u_curr.m != self.u_prev.m:
            raise ValueError("u_curr and u_prev must share grid and component count")


def laplacian_symbol(grid: Grid1D | float, k: int) -> float:
    """Eigenvalue of the second-difference stencil on sin(kx): 2 h^-2 (cos(hk) - 1)."""
    h = grid.h if hasattr(grid, "h") else float(grid)
    return 2.0 / h**2 * (np.cos(h * k) - 1.0)


# Descriptive alias for the same operation.
discrete_laplacian_symbol = laplacian_symbol
