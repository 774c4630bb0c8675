"""One-dimensional quadrature for the semiclassical integrals.

``integrate_singular`` is a tanh-sinh (double-exponential) rule.  It handles
integrable algebraic endpoint singularities such as ``(x - a)^(-1/2)`` and
square-root endpoint zeros with geometric convergence in the number of
levels.  ``integrate_smooth`` is a doubling Gauss-Legendre rule for
integrands that are smooth up to and including the endpoints.

Integrands must be vectorised: they receive a 1-d ``numpy`` array of nodes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "QuadratureSpec",
    "QuadratureResult",
    "QuadratureError",
    "NonConvergenceError",
    "IntegrandNaNError",
    "integrate_singular",
    "integrate_smooth",
]

DEFAULT_REL_TOL = 1e-10
DEFAULT_MAX_LEVELS = 12

# |t| <= T_MAX keeps endpoint distances ~1e-60, far below any contribution
# that matters for (x - a)^(-1/2) behaviour.
_T_MAX = 4.5
_ENDPOINT_NAN_BAND = 1e-14
_MIN_LEVELS = 3


class QuadratureError(RuntimeError):
    """Base class; ``best`` carries the last available estimate, if any."""

    def __init__(self, message: str, best: "QuadratureResult | None" = None):
        super().__init__(message)
        self.best = best


class NonConvergenceError(QuadratureError):
    pass


class IntegrandNaNError(QuadratureError):
    def __init__(self, message: str, node: float):
        super().__init__(message)
        self.node = node


@dataclass(frozen=True)
class QuadratureSpec:
    a: float
    b: float
    rel_tol: float = DEFAULT_REL_TOL
    max_levels: int = DEFAULT_MAX_LEVELS

    def __post_init__(self):
        if not (self.a < self.b):
            raise ValueError(f"need a < b, got [{self.a}, {self.b}]")
        if not (1e-15 < self.rel_tol < 1e-2):
            raise ValueError(f"rel_tol must lie in (1e-15, 1e-2), got {self.rel_tol}")
        if self.max_levels < 1:
            raise ValueError("max_levels must be >= 1")


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error_estimate: float
    levels_used: int


def _ts_nodes(t: np.ndarray, a: float, b: float):
    """Nodes, endpoint distances and weights of the tanh-sinh map at ``t``."""
    c = 0.5 * (b - a)
    u = 0.5 * math.pi * np.sinh(t)
    # distances computed without cancellation
    da = 2.0 * c / (1.0 + np.exp(-2.0 * u))
    db = 2.0 * c / (1.0 + np.exp(2.0 * u))
    x = np.where(t < 0, a + da, b - db)
    w = 0.5 * math.pi * np.cosh(t) * da * db / c
    return x, da, db, w


def _evaluate(f, x, da, db, complement):
    with np.errstate(all="ignore"):
        y = f(x, da, db) if complement else f(x)
    y = np.asarray(y, dtype=float)
    if y.shape != x.shape:
        y = np.broadcast_to(y, x.shape).astype(float)
    bad = ~np.isfinite(y)
    if bad.any():
        near = np.minimum(da, db) <= _ENDPOINT_NAN_BAND
        if np.any(bad & ~near):
            i = int(np.flatnonzero(bad & ~near)[0])
            raise IntegrandNaNError(
                f"integrand is not finite at interior node x={x[i]!r}", node=float(x[i])
            )
        y = np.where(bad, 0.0, y)
    return y


def integrate_singular(
    f: Callable, spec: QuadratureSpec, *, complement: bool = False
) -> QuadratureResult:
    """Tanh-sinh quadrature of ``f`` over ``(spec.a, spec.b)``.

    The integrand is only evaluated at interior nodes.  With
    ``complement=True`` it is called as ``f(x, x - a, b - x)`` where the two
    distances are computed exactly, so factors such as ``b - x`` do not lose
    digits to rounding near the endpoints.

    Convergence is declared when two successive levels agree to
    ``rel_tol`` times the L1 norm of the integrand, which also behaves for
    integrals that vanish.
    """
    a, b = float(spec.a), float(spec.b)
    step = 1.0
    t = np.arange(-_T_MAX, _T_MAX + 0.5 * step, step)
    x, da, db, w = _ts_nodes(t, a, b)
    y = _evaluate(f, x, da, db, complement)
    total = float(np.dot(w, y))
    total_abs = float(np.dot(w, np.abs(y)))
    prev = step * total
    err = math.inf
    for level in range(1, spec.max_levels + 1):
        step *= 0.5
        t = np.arange(-_T_MAX + step, _T_MAX, 2.0 * step)
        x, da, db, w = _ts_nodes(t, a, b)
        y = _evaluate(f, x, da, db, complement)
        total += float(np.dot(w, y))
        total_abs += float(np.dot(w, np.abs(y)))
        value = step * total
        err = abs(value - prev)
        prev = value
        if level >= _MIN_LEVELS and err <= spec.rel_tol * step * total_abs:
            return QuadratureResult(value, err, level)
    best = QuadratureResult(prev, err, spec.max_levels)
    raise NonConvergenceError(
        f"tanh-sinh did not reach rel_tol={spec.rel_tol} on [{a}, {b}] "
        f"after {spec.max_levels} levels (estimate {prev!r}, error {err:.3g})",
        best=best,
    )


_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _leggauss(n: int):
    if n not in _GL_CACHE:
        _GL_CACHE[n] = np.polynomial.legendre.leggauss(n)
    return _GL_CACHE[n]


def integrate_smooth(f: Callable, spec: QuadratureSpec) -> QuadratureResult:
    """Gauss-Legendre with node doubling (8, 16, 32, ... points)."""
    a, b = float(spec.a), float(spec.b)
    c, m = 0.5 * (b - a), 0.5 * (b + a)
    prev = None
    err = math.inf
    n = 8
    for level in range(0, spec.max_levels + 1):
        s, w = _leggauss(n)
        x = m + c * s
        y = np.asarray(f(x), dtype=float)
        if not np.all(np.isfinite(y)):
            i = int(np.flatnonzero(~np.isfinite(y))[0])
            raise IntegrandNaNError(f"integrand is not finite at x={x[i]!r}", node=float(x[i]))
        value = c * float(np.dot(w, y))
        scale = c * float(np.dot(w, np.abs(y)))
        if prev is not None:
            err = abs(value - prev)
            if err <= spec.rel_tol * scale:
                return QuadratureResult(value, err, level)
        prev = value
        n *= 2
    raise NonConvergenceError(
        f"Gauss-Legendre did not reach rel_tol={spec.rel_tol} on [{a}, {b}]",
        best=QuadratureResult(prev, err, spec.max_levels),
    )
