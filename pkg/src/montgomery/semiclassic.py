"""Classical and semiclassical functionals of the double well ``V = (x^2/2-1)^2``.

All integrals with a turning point at an endpoint go through the tanh-sinh
rule in :mod:`montgomery.quad`.  The factor ``E - V(x)`` is never formed by
subtraction; it is rebuilt from exact endpoint distances::

    E - V(x) = (x_+ - x)(x_+ + x)(x^2 - 2 + 2 sqrt(E)) / 4

and for ``E < 1`` the last factor is ``(x - x_-)(x + x_-)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from .model import TurningPoints, turning_points
from .quad import QuadratureSpec, integrate_singular

__all__ = [
    "SEPARATRIX_GUARD",
    "SeparatrixError",
    "in_guard_band",
    "ClassicalProfile",
    "BohrSommerfeldPrediction",
    "capital_C",
    "capital_F",
    "capital_F_theta",
    "theta_plus",
    "theta_minus",
    "phi",
    "measure_moment",
    "action",
    "action_deriv",
    "find_Ec",
    "capital_G",
    "F_prime",
    "second_derivative_limit",
    "second_derivative_limit_alt",
    "bohr_sommerfeld",
    "action_window",
    "regime1_constants",
    "bottom_regime_bound",
    "classical_profile",
]

SEPARATRIX_GUARD = 1e-3
ACTION_MU_MAX = 50.0
MAX_MOMENT = 8
_TOL = 1e-12


class SeparatrixError(ValueError):
    """Energy too close to the separatrix ``E = 1`` where the integrals blow up."""


def in_guard_band(E: float) -> bool:
    # the relative slack keeps decimal band edges such as 1.001 admissible
    return abs(E - 1.0) < SEPARATRIX_GUARD * (1.0 - 1e-9)


def _check_regular(E: float) -> None:
    if not E > 0:
        raise ValueError(f"energy must be positive, got {E!r}")
    if in_guard_band(E):
        raise SeparatrixError(
            f"E={E!r} is within {SEPARATRIX_GUARD} of the separatrix E=1; the "
            "time integral diverges there like (1/2) log(1/|E-1|)"
        )


def _spec(a, b, rel_tol=_TOL):
    return QuadratureSpec(a, b, rel_tol=rel_tol)


def _half_line_integral(E: float, phi_fn, power: float, rel_tol: float = _TOL) -> float:
    """``int_{x_-}^{x_+} phi(x) (E - V(x))^power dx`` for regular ``E``."""
    tp = turning_points(E)
    xp, xm = tp.x_plus, tp.x_minus
    below = E < 1.0
    shift = 2.0 * math.sqrt(E) - 2.0

    def integrand(x, da, db):
        right = db * (xp + x)
        left = da * (x + xm) if below else x * x + shift
        return phi_fn(x) * (0.25 * right * left) ** power

    return integrate_singular(integrand, _spec(xm, xp, rel_tol), complement=True).value


def _one(x):
    return np.ones_like(x)


def _two_minus_x2(x):
    return 2.0 - x * x


def capital_C(E: float) -> float:
    """Reciprocal of the half-line time integral ``int (E - V)^(-1/2)``."""
    _check_regular(E)
    return 1.0 / _half_line_integral(E, _one, -0.5)


def capital_F(E: float, rel_tol: float = _TOL) -> float:
    """``int_{x_-}^{x_+} (2 - x^2) / sqrt(E - V) dx`` computed directly."""
    _check_regular(E)
    return _half_line_integral(E, _two_minus_x2, -0.5, rel_tol)


def theta_plus(eta: float) -> float:
    if not 0.0 < eta < 1.0:
        raise ValueError(f"theta_plus needs eta in (0, 1), got {eta!r}")

    # on [-eta, 1]: tau + eta = da, 1 - tau = db
    def integrand(tau, da, db):
        return tau / np.sqrt(db * (1.0 + tau) * da)

    return integrate_singular(integrand, _spec(-eta, 1.0), complement=True).value


def theta_minus(eta: float) -> float:
    if not eta > 1.0:
        raise ValueError(f"theta_minus needs eta > 1, got {eta!r}")

    # on [-1, 1]: 1 + tau = da, 1 - tau = db
    def integrand(tau, da, db):
        return tau / np.sqrt(da * db * (tau + eta))

    return integrate_singular(integrand, _spec(-1.0, 1.0), complement=True).value


def capital_F_theta(E: float) -> float:
    """``F(E)`` through the change of variables ``eta = E^(-1/2)``."""
    _check_regular(E)
    eta = E ** -0.5
    theta = theta_plus(eta) if E > 1.0 else theta_minus(eta)
    return -math.sqrt(2.0) * eta ** -0.5 * theta


def _phi_regular(E: float) -> float:
    return capital_C(E) * capital_F(E)


def phi(E: float) -> float:
    """Limit of ``lambda'(alpha)/alpha`` at rescaled energy ``E``.

    Continuous on ``[0, inf)``.  Inside the guard band around ``E = 1`` both
    integrals grow like ``(1/2) log(1/|E-1|)`` with leading coefficients 2 and 1,
    so ``phi - 2`` decays like the inverse logarithm; the value is continued
    from the band edge on the same side with that law.
    """
    if E < 0:
        raise ValueError(f"phi needs E >= 0, got {E!r}")
    if E == 0.0:
        return 0.0
    if E == 1.0:
        return 2.0
    d = abs(E - 1.0)
    if not in_guard_band(E):
        return _phi_regular(E)
    edge = 1.0 + math.copysign(SEPARATRIX_GUARD, E - 1.0)
    # one ulp outside the band
    edge = math.nextafter(edge, 2.0 if E > 1.0 else 0.0)
    ratio = math.log(1.0 / abs(edge - 1.0)) / math.log(1.0 / d)
    return 2.0 + (_phi_regular(edge) - 2.0) * ratio


def measure_moment(E: float, k: int) -> float:
    """``<m_E, x^k>`` for the limiting eigenfunction density at energy ``E``."""
    if E < 0:
        raise ValueError(f"measure needs E >= 0, got {E!r}")
    if not 0 <= k <= MAX_MOMENT:
        raise ValueError(f"moment order must be in [0, {MAX_MOMENT}], got {k!r}")
    if k % 2 == 1:
        return 0.0
    if E == 0.0:
        return 2.0 ** (k / 2)
    if E == 1.0:
        return 1.0 if k == 0 else 0.0
    _check_regular(E)
    if k == 0:
        return 1.0
    num = _half_line_integral(E, lambda x: x**k, -0.5)
    return num * capital_C(E)


def _full_action_integral(mu: float, power: float) -> float:
    """``int_{-x_+}^{x_+} (mu - V)^power dx`` for ``mu > 1`` (single well)."""
    xp = turning_points(mu).x_plus
    shift = 2.0 * math.sqrt(mu) - 2.0

    def integrand(x, da, db):
        return (0.25 * da * db * (x * x + shift)) ** power

    return integrate_singular(integrand, _spec(-xp, xp), complement=True).value


def _check_action_domain(mu: float) -> None:
    if not mu > 1.0:
        raise ValueError(
            f"action needs mu > 1, got {mu!r}: below the separatrix the level "
            "set splits into two wells"
        )


def action(mu: float) -> float:
    """Phase-space area ``(1/2 pi) |{xi^2 + V <= mu}|``."""
    _check_action_domain(mu)
    return _full_action_integral(mu, 0.5) / math.pi


def action_deriv(mu: float) -> float:
    _check_action_domain(mu)
    return _full_action_integral(mu, -0.5) / (2.0 * math.pi)


def find_Ec(bracket_lo: float = 1.5, bracket_hi: float = 4.0) -> float:
    """Unique zero of ``F`` on ``(1, inf)``."""
    if not bracket_lo > 1.0:
        raise ValueError("bracket must lie above the separatrix E = 1")
    if bracket_lo == 1.5 and bracket_hi == 4.0:
        return _ec_default()
    return _find_Ec(bracket_lo, bracket_hi)


def _find_Ec(lo: float, hi: float) -> float:
    f_lo, f_hi = capital_F(lo), capital_F(hi)
    if not (f_lo > 0.0 > f_hi):
        raise ValueError(
            f"F has no sign change on [{lo}, {hi}] (F={f_lo:.4g}, {f_hi:.4g}); "
            "widen the bracket"
        )
    return brentq(capital_F, lo, hi, xtol=1e-13, rtol=4 * np.finfo(float).eps)


@lru_cache(maxsize=1)
def _ec_default() -> float:
    return _find_Ec(1.5, 4.0)


def capital_G(E: float) -> float:
    """Half-line action integral over the squared half-line time integral."""
    _check_action_domain(E)
    num = _half_line_integral(E, _one, 0.5)
    den = _half_line_integral(E, _one, -0.5)
    return num / den**2


def F_prime(E: float, step: float = 1e-5) -> float:
    return (capital_F(E + step, 1e-14) - capital_F(E - step, 1e-14)) / (2.0 * step)


def second_derivative_limit(step: float = 1e-5) -> float:
    """Large-level limit of ``lambda_j''`` at its critical point."""
    ec = find_Ec()
    return -3.0 * F_prime(ec, step) * capital_G(ec)


def second_derivative_limit_alt(step: float = 1e-5) -> float:
    """Same constant written as ``(3 pi / 2) |F'| C^2 action``."""
    ec = find_Ec()
    return 1.5 * math.pi * abs(F_prime(ec, step)) * capital_C(ec) ** 2 * action(ec)


@dataclass(frozen=True)
class BohrSommerfeldPrediction:
    j: int
    h: float
    mu: float


@lru_cache(maxsize=1)
def action_window() -> tuple[float, float, float, float]:
    """Admissible ``mu`` interval and the matching action range."""
    lo = 1.0 + SEPARATRIX_GUARD
    return lo, ACTION_MU_MAX, action(lo), action(ACTION_MU_MAX)


def bohr_sommerfeld(j: int, h: float) -> BohrSommerfeldPrediction:
    """Leading-order quantised energy ``mu`` with ``action(mu) = (j + 1/2) h``."""
    if j < 0:
        raise ValueError("Bohr-Sommerfeld index starts at 0")
    if not h > 0:
        raise ValueError("h must be positive")
    target = (j + 0.5) * h
    lo, hi, a_lo, a_hi = action_window()
    if not a_lo <= target <= a_hi:
        raise ValueError(
            f"target action {(j + 0.5)}*{h} = {target:.6g} is outside "
            f"[{a_lo:.6g}, {a_hi:.6g}]; admissible pairs satisfy "
            f"{a_lo:.6g} <= (j + 1/2) h <= {a_hi:.6g}"
        )
    if target == a_lo:
        return BohrSommerfeldPrediction(j, h, lo)
    mu = brentq(lambda m: action(m) - target, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps)
    return BohrSommerfeldPrediction(j, h, mu)


@lru_cache(maxsize=1)
def regime1_constants() -> tuple[float, float]:
    """``K1`` and the limit of ``lambda' / (alpha lambda^(1/2))`` when ``lambda >> alpha^2``."""
    r2 = math.sqrt(2.0)

    # 1 - s^4/4 = (sqrt2 - s)(sqrt2 + s)(1 + s^2/2) / 2
    def weight(s, da, db):
        return 1.0 / np.sqrt(0.5 * da * db * (1.0 + 0.5 * s * s))

    spec = _spec(-r2, r2)
    k1 = 1.0 / integrate_singular(weight, spec, complement=True).value
    m2 = integrate_singular(lambda s, da, db: s * s * weight(s, da, db), spec, complement=True).value
    return k1, -k1 * m2


def bottom_regime_bound(E: float) -> float:
    if not 0.0 <= E < 1.0:
        raise ValueError(f"bottom-regime bound needs E in [0, 1), got {E!r}")
    return 4.0 / (3.0 * turning_points(E).x_plus + math.sqrt(2.0))


@dataclass(frozen=True)
class ClassicalProfile:
    E: float
    turning: TurningPoints
    C: float
    F: float
    Phi: float
    action: float | None
    action_deriv: float | None
    moment2: float


def classical_profile(E: float) -> ClassicalProfile:
    _check_regular(E)
    c = capital_C(E)
    f = capital_F(E)
    above = E > 1.0
    return ClassicalProfile(
        E=E,
        turning=turning_points(E),
        C=c,
        F=f,
        Phi=c * f,
        action=action(E) if above else None,
        action_deriv=action_deriv(E) if above else None,
        moment2=measure_moment(E, 2),
    )
