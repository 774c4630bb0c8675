"""Three-point finite-difference discretisations on truncated uniform grids.

Full line: nodes ``x_i = -L + i dx``, ``i = 1..n``, Dirichlet at ``+-L``.

Half line: Dirichlet at 0 uses nodes ``i dx, i = 1..n``; Neumann at 0 keeps
the node ``x_0 = 0`` and the mirror ghost ``u_{-1} = u_1``.  The Neumann row
``(2 u_0 - 2 u_1) / dx^2`` is made symmetric by the diagonal similarity
``w_0 = u_0 / sqrt(2)``, which turns the first off-diagonal into
``-sqrt(2) c / dx^2`` and makes ``sum w_i^2 dx`` the trapezoid norm of ``u``.
``TridiagonalOperator.node_scale`` records this similarity (``u = w / scale``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .model import BCMode, montgomery_potential_value

__all__ = [
    "Grid",
    "TridiagonalOperator",
    "build_operator",
    "build_full_line",
    "build_half_line",
    "choose_box",
    "BOX_MARGIN",
    "BOX_PAD",
    "DX_MAX",
    "POINTS_PER_WAVELENGTH",
]

BOX_MARGIN = 1.5
BOX_PAD = 4.0
DX_MAX = 0.02
POINTS_PER_WAVELENGTH = 60


@dataclass(frozen=True)
class Grid:
    x_min: float
    x_max: float
    n: int
    include_left: bool = False

    def __post_init__(self):
        if self.n < 3:
            raise ValueError(f"grid needs at least 3 interior nodes, got {self.n}")
        if not self.x_max > self.x_min:
            raise ValueError("grid endpoints must satisfy x_min < x_max")

    @property
    def dx(self) -> float:
        if self.include_left:
            return (self.x_max - self.x_min) / self.n
        return (self.x_max - self.x_min) / (self.n + 1)

    @property
    def nodes(self) -> np.ndarray:
        start = 0 if self.include_left else 1
        return self.x_min + self.dx * np.arange(start, start + self.n)

    @property
    def radius(self) -> float:
        return max(abs(self.x_min), abs(self.x_max))


@dataclass(frozen=True, eq=False)
class TridiagonalOperator:
    diag: np.ndarray
    offdiag: np.ndarray
    grid: Grid
    bc_mode: BCMode
    node_scale: np.ndarray = field(repr=False)
    potential: np.ndarray = field(repr=False)
    kinetic: float = 1.0
    alpha: float | None = None

    @property
    def n(self) -> int:
        return self.diag.size

    @property
    def x(self) -> np.ndarray:
        return self.grid.nodes

    @property
    def dx(self) -> float:
        return self.grid.dx

    def norm_bound(self) -> float:
        """Gershgorin-type scale ``max|d| + 2 max|e|``."""
        return float(np.max(np.abs(self.diag)) + 2.0 * np.max(np.abs(self.offdiag)))

    def matvec(self, v: np.ndarray) -> np.ndarray:
        out = self.diag * v
        out[:-1] += self.offdiag * v[1:]
        out[1:] += self.offdiag * v[:-1]
        return out

    def kinetic_energy(self, v: np.ndarray) -> float:
        """Kinetic part of ``v^T T v`` as a sum of squared differences."""
        u = v / self.node_scale
        kin = float(np.sum(np.diff(u) ** 2)) + u[-1] ** 2
        if self.bc_mode is not BCMode.HALF_NEUMANN:
            kin += u[0] ** 2
        return self.kinetic / self.dx**2 * kin

    def energy(self, v: np.ndarray) -> float:
        """``v^T T v`` in difference form, free of the ``2c - 2c`` cancellation."""
        return self.kinetic_energy(v) + float(np.dot(self.potential, v * v))

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)


def _check_box(L: float, n: int) -> None:
    if not L > 0:
        raise ValueError(f"box half-width must be positive, got {L!r}")
    if n < 3:
        raise ValueError(f"need n >= 3 interior nodes, got {n!r}")


def build_operator(
    potential: Callable[[np.ndarray], np.ndarray],
    L: float,
    n: int,
    bc: BCMode = BCMode.FULL_LINE,
    kinetic: float = 1.0,
    alpha: float | None = None,
) -> TridiagonalOperator:
    """``-kinetic d^2/dx^2 + potential`` on ``[-L, L]`` or ``[0, L]``."""
    _check_box(L, n)
    if bc is BCMode.FULL_LINE:
        grid = Grid(-L, L, n)
    elif bc is BCMode.HALF_DIRICHLET:
        grid = Grid(0.0, L, n)
    else:
        grid = Grid(0.0, L, n, include_left=True)
    x = grid.nodes
    c = kinetic / grid.dx**2
    w = np.asarray(potential(x), dtype=float)
    diag = 2.0 * c + w
    off = np.full(n - 1, -c)
    scale = np.ones(n)
    if bc is BCMode.HALF_NEUMANN:
        off[0] = -math.sqrt(2.0) * c
        scale[0] = 1.0 / math.sqrt(2.0)
    return TridiagonalOperator(diag, off, grid, bc, scale, w, kinetic, alpha)


def build_full_line(alpha: float, L: float, n: int) -> TridiagonalOperator:
    return build_operator(
        lambda x: montgomery_potential_value(x, alpha), L, n, BCMode.FULL_LINE, alpha=alpha
    )


def build_half_line(alpha: float, L: float, n: int, bc: BCMode) -> TridiagonalOperator:
    if bc is BCMode.FULL_LINE:
        raise ValueError("half-line builder needs a Neumann or Dirichlet condition at 0")
    return build_operator(
        lambda x: montgomery_potential_value(x, alpha), L, n, bc, alpha=alpha
    )


def _weyl_count(lam: float, alpha: float) -> float:
    """Semiclassical number of eigenvalues below ``lam``."""
    if lam <= (alpha**2 if alpha < 0 else 0.0):
        return 0.0
    t_max = math.sqrt(2.0 * (alpha + math.sqrt(lam)))
    t = np.linspace(-t_max, t_max, 4001)
    p = np.sqrt(np.clip(lam - montgomery_potential_value(t, alpha), 0.0, None))
    return float(np.trapezoid(p, t)) / math.pi


def _lambda_estimate(alpha: float, j_max: int) -> float:
    """Generous over-estimate of ``lambda_{j_max}(alpha)`` from phase-space counting."""
    lo = alpha**2 if alpha < 0 else 0.0
    hi = lo + 1.0
    while _weyl_count(hi, alpha) < j_max + 1:
        hi = lo + 2.0 * (hi - lo)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if _weyl_count(mid, alpha) < j_max + 1:
            lo = mid
        else:
            hi = mid
    # the count is only asymptotic; pad for low levels
    return 1.25 * hi + 2.0


def choose_box(
    alpha: float,
    j_max: int,
    points_per_wavelength: int = POINTS_PER_WAVELENGTH,
    margin: float = BOX_MARGIN,
    pad: float = BOX_PAD,
) -> tuple[float, int]:
    """Box half-width ``L`` and full-line node count ``n`` (odd, so 0 is a node)."""
    if j_max < 1:
        raise ValueError(f"j_max must be >= 1, got {j_max!r}")
    lam = _lambda_estimate(alpha, j_max)
    t_turn = math.sqrt(2.0 * (alpha + math.sqrt(lam)))
    L = t_turn * margin + pad
    floor = alpha**2 if alpha < 0 else 0.0
    k_max = math.sqrt(max(lam - floor, 1e-12))
    dx = min(DX_MAX, 2.0 * math.pi / (points_per_wavelength * k_max))
    n = int(math.ceil(2.0 * L / dx))
    if n % 2 == 0:
        n += 1
    return L, n
