"""Potentials, turning points and the alpha <-> h <-> E rescaling dictionary.

The Montgomery operator is ``-d^2/dt^2 + (t^2/2 - alpha)^2`` on the real line.
For ``alpha > 0`` the dilation ``t = sqrt(alpha) s`` maps it to
``alpha^2 (-h^2 d^2/ds^2 + V(s))`` with ``V(s) = (s^2/2 - 1)^2`` and
``h = alpha^(-3/2)``.  Eigenvalues rescale as ``E = lambda / alpha^2``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "BCMode",
    "ModelParams",
    "EnergyPoint",
    "TurningPoints",
    "potential_value",
    "montgomery_potential_value",
    "turning_points",
    "rescale_alpha_to_h",
    "rescale_h_to_alpha",
]


class BCMode(enum.Enum):
    FULL_LINE = "full"
    HALF_NEUMANN = "neumann"
    HALF_DIRICHLET = "dirichlet"


def rescale_alpha_to_h(alpha: float) -> float:
    if not alpha > 0:
        raise ValueError(f"alpha must be positive to define h, got {alpha!r}")
    return alpha ** -1.5


def rescale_h_to_alpha(h: float) -> float:
    if not h > 0:
        raise ValueError(f"h must be positive, got {h!r}")
    return h ** (-2.0 / 3.0)


@dataclass(frozen=True)
class ModelParams:
    alpha: float
    bc_mode: BCMode = BCMode.FULL_LINE

    @property
    def h(self) -> float:
        """Semiclassical parameter; ``inf`` when ``alpha <= 0``."""
        if self.alpha > 0:
            return rescale_alpha_to_h(self.alpha)
        return math.inf


@dataclass(frozen=True)
class EnergyPoint:
    lam: float
    alpha: float
    j: int

    def __post_init__(self):
        if self.j < 1:
            raise ValueError("level index j starts at 1")

    @property
    def E(self) -> float:
        if not self.alpha > 0:
            raise ValueError("rescaled energy needs alpha > 0")
        return self.lam / self.alpha**2


@dataclass(frozen=True)
class TurningPoints:
    x_plus: float
    x_minus: float


def potential_value(x):
    """Double-well potential ``(x^2/2 - 1)^2``; accepts scalars or arrays."""
    return (0.5 * np.square(x) - 1.0) ** 2


def montgomery_potential_value(x, alpha: float):
    return (0.5 * np.square(x) - alpha) ** 2


def turning_points(E: float) -> TurningPoints:
    if E < 0:
        raise ValueError(f"turning points need E >= 0, got {E!r}")
    r = math.sqrt(E)
    x_plus = math.sqrt(2.0 + 2.0 * r)
    # explicit split at the separatrix E = 1
    x_minus = math.sqrt(2.0 - 2.0 * r) if E <= 1.0 else 0.0
    return TurningPoints(x_plus=x_plus, x_minus=x_minus)
