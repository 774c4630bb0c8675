"""Eigenvalue curves ``alpha -> lambda_j(alpha)`` and functionals of their eigenvectors.

Every scalar is computed on two nested grids (``dx`` and ``dx/2``) and
Richardson-extrapolated, ``Q = (4 Q_fine - Q_coarse) / 3``.  The three-point
stencil and the trapezoid rule are both second order, so this removes the
leading ``dx^2`` term.

Level bookkeeping: below ``alpha = 3`` the full line is used and the level is
picked by Sturm count; from ``alpha = 3`` on, odd levels ``2k - 1`` are the
half-line Neumann level ``k`` and even levels ``2k`` the Dirichlet level ``k``,
which keeps exponentially close pairs apart.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from . import semiclassic
from .eig import EigenPair, eigenvector, kth_eigenvalue, solve_shifted_orthogonal
from .fdop import TridiagonalOperator, build_full_line, build_half_line, choose_box
from .model import BCMode, rescale_alpha_to_h

__all__ = [
    "Box",
    "CurveSample",
    "CriticalPoint",
    "IdentityResiduals",
    "QuotientScan",
    "GapBound",
    "BoundsCheck",
    "SemiclassicalComparison",
    "NoSignChangeError",
    "PARITY_ALPHA",
    "level_family",
    "eigenvalue",
    "eigen_curve",
    "lambda_second",
    "fd_lambda_prime",
    "fd_lambda_second",
    "find_critical",
    "identity_residuals",
    "quotient_scan",
    "gap_second_derivative_bound",
    "analytic_bounds_check",
    "semiclassical_comparison",
    "pick_level",
    "gap_bound_value",
    "gaussian_upper_bound",
    "harmonic_lower_bound",
]

PARITY_ALPHA = 3.0
ALPHA_C_XTOL = 1e-7
SCAN_STEP = 0.05
GAMMA_DEFAULT = 0.6
ALPHA_STAR = (24.0 / 25.0) ** (1.0 / 3.0)


class NoSignChangeError(ValueError):
    pass


@dataclass(frozen=True)
class Box:
    """Truncation half-width and coarse full-line node count (odd)."""

    L: float
    n: int

    @classmethod
    def for_level(cls, alpha: float, j: int) -> "Box":
        L, n = choose_box(alpha, j)
        return cls(L, n)

    def enlarged(self, extra: float) -> "Box":
        dx = 2.0 * self.L / (self.n + 1)
        cells = (self.n + 1) // 2 + int(round(extra / dx))
        return Box(cells * dx, 2 * cells - 1)


@dataclass(frozen=True)
class CurveSample:
    alpha: float
    j: int
    lam: float
    lambda_prime: float
    lambda_second: float | None = None
    method_meta: dict = field(default_factory=dict, compare=False)

    @property
    def E(self) -> float | None:
        return self.lam / self.alpha**2 if self.alpha > 0 else None


@dataclass(frozen=True)
class CriticalPoint:
    j: int
    alpha_c: float
    lambda_at: float
    second_deriv: float

    @property
    def quotient(self) -> float:
        return self.lambda_at / self.alpha_c**2

    @property
    def is_minimum(self) -> bool:
        return self.second_deriv > 0


def level_family(j: int, alpha: float) -> tuple[BCMode, int]:
    """Discretisation family and in-family index for level ``j``."""
    if j < 1:
        raise ValueError(f"level index j starts at 1, got {j!r}")
    if alpha < PARITY_ALPHA:
        return BCMode.FULL_LINE, j
    return (BCMode.HALF_NEUMANN if j % 2 else BCMode.HALF_DIRICHLET), (j + 1) // 2


def _operator(alpha: float, bc: BCMode, box: Box, refine: int) -> TridiagonalOperator:
    n_full = (box.n + 1) * 2**refine - 1
    if bc is BCMode.FULL_LINE:
        return build_full_line(alpha, box.L, n_full)
    cells = (n_full + 1) // 2
    n = cells if bc is BCMode.HALF_NEUMANN else cells - 1
    return build_half_line(alpha, box.L, n, bc)


def _richardson(coarse: float, fine: float) -> float:
    return (4.0 * fine - coarse) / 3.0


def _resolve_box(j: int, alpha: float, box: Box | None) -> Box:
    return box if box is not None else Box.for_level(alpha, j)


def _meta(bc: BCMode, k: int, box: Box) -> dict:
    return {"bc": bc.value, "index": k, "L": box.L, "n_coarse": box.n,
            "dx_coarse": 2.0 * box.L / (box.n + 1)}


def eigenvalue(j: int, alpha: float, *, box: Box | None = None, richardson: bool = True) -> float:
    """Richardson-extrapolated ``lambda_j(alpha)`` (no eigenvector)."""
    bc, k = level_family(j, alpha)
    box = _resolve_box(j, alpha, box)
    vals = []
    for refine in (0, 1) if richardson else (0,):
        T = _operator(alpha, bc, box, refine)
        vals.append(eigenvector(T, kth_eigenvalue(T, k)).value)
    return _richardson(*vals) if richardson else vals[0]


@dataclass(frozen=True)
class _GridFunctionals:
    lam: float
    lam1: float
    pot2: float
    kin: float
    x2: float
    ipf2_lhs_integral: float
    u0: float
    du0: float
    lam2: float | None


def _grid_functionals(alpha: float, bc: BCMode, k: int, box: Box, refine: int,
                      second: bool) -> _GridFunctionals:
    T = _operator(alpha, bc, box, refine)
    ep: EigenPair = eigenvector(T, kth_eigenvalue(T, k))
    v, x, dx = ep.vector, T.x, T.dx
    w = 0.5 * x * x - alpha
    rho = v * v * dx
    lam1 = -2.0 * float(np.dot(w, rho))
    pot2 = float(np.dot(w * w, rho))
    kin = T.kinetic_energy(v) * dx
    x2 = float(np.dot(x * x, rho))
    g = (x - math.sqrt(2.0 * max(alpha, 0.0))) * w
    if bc is BCMode.FULL_LINE:
        m = T.n // 2
        wt = np.ones(T.n - m)
        wt[0] = 0.5
        half = float(np.dot(g[m:] * wt, rho[m:]))
        u = v[m:m + 3]
        u0 = u[0]
        du0 = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * dx)
    else:
        # half-line vector has norm 1 on [0, L]; the full-line one is u / sqrt 2
        half = 0.5 * float(np.dot(g, rho))
        uh = v / T.node_scale
        if bc is BCMode.HALF_NEUMANN:
            u0 = uh[0]
            du0 = (-3.0 * uh[0] + 4.0 * uh[1] - uh[2]) / (2.0 * dx)
        else:
            u0 = 0.0
            du0 = (4.0 * uh[0] - uh[1]) / (2.0 * dx)
        u0 /= math.sqrt(2.0)
        du0 /= math.sqrt(2.0)
    lam2 = None
    if second:
        rhs = (2.0 * w + lam1) * v
        dv = solve_shifted_orthogonal(T, ep.value, rhs, v)
        lam2 = 2.0 - 4.0 * float(np.dot(w * v, dv)) * dx
    return _GridFunctionals(ep.value, lam1, pot2, kin, x2, half, float(u0), float(du0), lam2)


def _extrapolated(j, alpha, box, second):
    bc, k = level_family(j, alpha)
    box = _resolve_box(j, alpha, box)
    c = _grid_functionals(alpha, bc, k, box, 0, second)
    f = _grid_functionals(alpha, bc, k, box, 1, second)
    out = {}
    for name in c.__dataclass_fields__:
        a, b = getattr(c, name), getattr(f, name)
        out[name] = None if a is None else _richardson(a, b)
    return out, _meta(bc, k, box)


def eigen_curve(j: int, alpha: float, *, second: bool = False, box: Box | None = None) -> CurveSample:
    """``lambda_j``, its Feynman-Hellmann derivative and optionally ``lambda_j''``."""
    q, meta = _extrapolated(j, alpha, box, second)
    return CurveSample(alpha, j, q["lam"], q["lam1"], q["lam2"], meta)


def lambda_second(j: int, alpha: float, *, box: Box | None = None) -> float:
    return eigen_curve(j, alpha, second=True, box=box).lambda_second


def _fixed_box(j: int, alpha: float, step: float) -> Box:
    return Box.for_level(alpha + 2.0 * step, j)


def fd_lambda_prime(j: int, alpha: float, step: float = 1e-3, *, box: Box | None = None) -> float:
    """Centred difference of ``lambda_j`` at steps ``step`` and ``step/2``, Richardson-combined."""
    box = box or _fixed_box(j, alpha, step)
    d = []
    for s in (step, 0.5 * step):
        d.append((eigenvalue(j, alpha + s, box=box) - eigenvalue(j, alpha - s, box=box)) / (2 * s))
    return _richardson(*d)


def fd_lambda_second(j: int, alpha: float, step: float = 1e-3, *, box: Box | None = None) -> float:
    box = box or _fixed_box(j, alpha, step)
    d = []
    for s in (step, 0.5 * step):
        hi = eigen_curve(j, alpha + s, box=box).lambda_prime
        lo = eigen_curve(j, alpha - s, box=box).lambda_prime
        d.append((hi - lo) / (2 * s))
    return _richardson(*d)


def _scan_sign_change(j: int, alpha_hi: float, step: float):
    scanned = []
    prev = None
    for i in range(1, int(math.floor(alpha_hi / step + 1e-9)) + 1):
        a = i * step
        bc, k = level_family(j, a)
        box = Box.for_level(a, j)
        d = _grid_functionals(a, bc, k, box, 0, False).lam1
        scanned.append((a, d))
        if prev is not None and prev[1] < 0.0 <= d:
            return (prev[0], a), scanned
        prev = (a, d)
    listing = ", ".join(f"{a:.2f}:{d:.3g}" for a, d in scanned)
    raise NoSignChangeError(
        f"lambda'_{j} has no sign change on (0, {alpha_hi}] at step {step}; "
        f"scanned alpha:lambda' = {listing}"
    )


def find_critical(j: int, bracket: tuple[float, float] | None = None, *,
                  alpha_hi: float | None = None, step: float = SCAN_STEP) -> CriticalPoint:
    """Locate the first zero of ``lambda_j'`` and classify it by ``lambda_j''``."""
    if bracket is None:
        hi = alpha_hi if alpha_hi is not None else PARITY_ALPHA + 0.5 * j
        bracket, _ = _scan_sign_change(j, hi, step)
    a, b = bracket
    box = Box.for_level(b + step, j)

    def deriv(alpha):
        return eigen_curve(j, alpha, box=box).lambda_prime

    fa, fb = deriv(a), deriv(b)
    if fa * fb > 0:
        raise NoSignChangeError(
            f"lambda'_{j} has the same sign at both ends of [{a}, {b}]: {fa!r}, {fb!r}"
        )
    ac = brentq(deriv, a, b, xtol=ALPHA_C_XTOL)
    s = eigen_curve(j, ac, second=True, box=box)
    return CriticalPoint(j, ac, s.lam, s.lambda_second)


@dataclass(frozen=True)
class IdentityResiduals:
    j: int
    alpha: float
    lam: float
    lambda_prime: float
    dilation: float
    ipf2: float
    newid2: float
    energy_split: float


def identity_residuals(j: int, alpha: float, *, box: Box | None = None) -> IdentityResiduals:
    """Signed residuals of the exact identities satisfied by ``(lambda_j, u_j)``.

    ``dilation``: ``alpha lambda' + lambda - 3 |(t^2/2 - alpha) u|^2``.
    ``ipf2``: the half-line integration-by-parts identity, with ``u(0)`` and
    ``u'(0)`` from the grid.  ``newid2``: ``3 |(t^2/2 - alpha) u|^2 - lambda``,
    which vanishes at critical points.  ``energy_split``:
    ``|u'|^2 + |(t^2/2 - alpha) u|^2 - lambda``.
    """
    if not alpha > 0:
        raise ValueError(f"identity suite needs alpha > 0, got {alpha!r}")
    q, _ = _extrapolated(j, alpha, box, False)
    lam, lam1, pot2 = q["lam"], q["lam1"], q["pot2"]
    lhs = 2.0 * q["ipf2_lhs_integral"] - math.sqrt(alpha / 2.0) * lam1
    rhs = (lam - alpha**2) * q["u0"] ** 2 + q["du0"] ** 2
    return IdentityResiduals(
        j=j, alpha=alpha, lam=lam, lambda_prime=lam1,
        dilation=alpha * lam1 + lam - 3.0 * pot2,
        ipf2=lhs - rhs,
        newid2=3.0 * pot2 - lam,
        energy_split=q["kin"] + pot2 - lam,
    )


@dataclass(frozen=True)
class QuotientScan:
    j_num: int
    j_den: int
    alphas: np.ndarray
    ratios: np.ndarray
    min_ratio: float
    argmin: float


def quotient_scan(pair: tuple[int, int], alpha_range: tuple[float, float],
                  step: float, *, refine: bool = True) -> QuotientScan:
    """``lambda_hi / lambda_lo`` on a grid, with a bounded refinement of its minimum."""
    j_lo, j_hi = sorted(pair)
    if j_lo == j_hi or (j_hi - j_lo) % 2:
        raise ValueError(f"quotient levels must differ and share parity, got {pair!r}")
    a0, a1 = alpha_range
    if not (a1 > a0 and step > 0):
        raise ValueError("need alpha_range[0] < alpha_range[1] and step > 0")
    m = int(math.floor((a1 - a0) / step + 1e-9))
    alphas = a0 + step * np.arange(m + 1)
    if a1 - alphas[-1] > 1e-9 * step:
        alphas = np.append(alphas, a1)

    def ratio(a):
        return eigenvalue(j_hi, a) / eigenvalue(j_lo, a)

    ratios = np.array([ratio(a) for a in alphas])
    i = int(np.argmin(ratios))
    best_a, best_r = float(alphas[i]), float(ratios[i])
    if refine and len(alphas) > 2:
        lo = float(alphas[max(i - 1, 0)])
        hi = float(alphas[min(i + 1, len(alphas) - 1)])
        res = minimize_scalar(ratio, bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-6})
        if res.fun < best_r:
            best_a, best_r = float(res.x), float(res.fun)
    return QuotientScan(j_hi, j_lo, alphas, ratios, best_r, best_a)


@dataclass(frozen=True)
class GapBound:
    bound: float
    hypothesis: bool
    ratio: float


def gap_bound_value(lam_j: float, lam_j2: float) -> GapBound:
    bound = (2.0 / 3.0) * (3.0 * lam_j2 - 7.0 * lam_j) / (lam_j2 - lam_j)
    return GapBound(bound, 3.0 * lam_j2 > 7.0 * lam_j, lam_j2 / lam_j)


def gap_second_derivative_bound(j: int, alpha_c: float) -> GapBound:
    """Lower bound for ``lambda_j''(alpha_c)`` from the gap to ``lambda_{j+2}``."""
    if j not in (1, 2):
        raise ValueError(f"gap bound is stated for j in {{1, 2}}, got {j!r}")
    return gap_bound_value(eigenvalue(j, alpha_c), eigenvalue(j + 2, alpha_c))


@dataclass(frozen=True)
class BoundsCheck:
    alpha: float
    lambda1: float
    lambda3: float
    gaussian_bound: float
    harmonic_lower: float
    upper_a: float | None
    upper_b: float | None
    window_lambda1_ok: bool | None
    window_lambda3_ok: bool | None
    slack: float

    @property
    def gaussian_ok(self) -> bool:
        return self.lambda1 <= self.gaussian_bound + self.slack

    @property
    def harmonic_ok(self) -> bool:
        return self.lambda3 >= self.harmonic_lower - self.slack

    @property
    def upper_ok(self) -> bool:
        if self.upper_a is None:
            return True
        return self.lambda1 <= min(self.upper_a, self.upper_b) + self.slack

    @property
    def all_ok(self) -> bool:
        flags = [self.gaussian_ok, self.harmonic_ok, self.upper_ok,
                 self.window_lambda1_ok, self.window_lambda3_ok]
        return all(f for f in flags if f is not None)


LAMBDA1_WINDOW_MAX = 0.8 * (9.0 / 5.0) ** (1.0 / 3.0)
LAMBDA3_WINDOW_MIN = math.sqrt(15.0) - 1.2 * ALPHA_STAR - 9.0 / 25.0


def gaussian_upper_bound(alpha: float) -> float:
    return alpha**2 - 6.0 ** (-1.0 / 3.0) * alpha + 0.75 ** (4.0 / 3.0)


def harmonic_lower_bound(alpha: float, gamma: float = GAMMA_DEFAULT) -> float:
    return 5.0 * math.sqrt(gamma) - 2.0 * gamma * alpha - gamma**2


def analytic_bounds_check(alpha: float, *, gamma: float = GAMMA_DEFAULT,
                          slack: float = 1e-6) -> BoundsCheck:
    """Compare ``lambda_1`` and ``lambda_3`` against closed-form trial-state bounds."""
    l1 = eigenvalue(1, alpha)
    l3 = eigenvalue(3, alpha)
    ua = ub = None
    if alpha > 0:
        ua = 1.0 / (4.0 * alpha) + 0.75 * alpha**2
        ub = 3.0 / (10.0 * alpha) + 11.0 * alpha**2 / 16.0
    in_window = 0.0 < alpha <= ALPHA_STAR
    return BoundsCheck(
        alpha=alpha, lambda1=l1, lambda3=l3,
        gaussian_bound=gaussian_upper_bound(alpha),
        harmonic_lower=harmonic_lower_bound(alpha, gamma),
        upper_a=ua, upper_b=ub,
        window_lambda1_ok=(l1 <= LAMBDA1_WINDOW_MAX + slack) if in_window else None,
        window_lambda3_ok=(l3 >= LAMBDA3_WINDOW_MIN - slack) if in_window else None,
        slack=slack,
    )


@dataclass(frozen=True)
class SemiclassicalComparison:
    j: int
    alpha: float
    h: float
    E: float
    ratio: float
    phi: float
    phi_error: float
    mu: float
    bs_error: float
    moment: float
    moment_limit: float
    moment_error: float


E_WINDOW_MAX = 5.0


def semiclassical_comparison(j: int, alpha: float) -> SemiclassicalComparison:
    """Compare level ``j`` at ``alpha`` with its classical and Bohr-Sommerfeld limits.

    The Bohr-Sommerfeld index of full-line level ``j`` is ``j - 1``.  Moments
    are taken in the rescaled variable ``x = t / sqrt(alpha)``.
    """
    if not alpha > 1:
        raise ValueError(f"semiclassical comparison needs alpha > 1, got {alpha!r}")
    q, _ = _extrapolated(j, alpha, None, False)
    E = q["lam"] / alpha**2
    if semiclassic.in_guard_band(E):
        raise semiclassic.SeparatrixError(
            f"level {j} at alpha={alpha} has E={E!r} inside the separatrix guard band"
        )
    if not 1.0 + semiclassic.SEPARATRIX_GUARD < E < E_WINDOW_MAX:
        raise ValueError(f"E={E!r} outside the comparison window (1, {E_WINDOW_MAX})")
    h = rescale_alpha_to_h(alpha)
    ratio = q["lam1"] / alpha
    ph = semiclassic.phi(E)
    mu = semiclassic.bohr_sommerfeld(j - 1, h).mu
    mom = q["x2"] / alpha
    lim = semiclassic.measure_moment(E, 2)
    return SemiclassicalComparison(
        j=j, alpha=alpha, h=h, E=E, ratio=ratio, phi=ph, phi_error=abs(ratio - ph),
        mu=mu, bs_error=abs(E - mu), moment=mom, moment_limit=lim,
        moment_error=abs(mom - lim),
    )


def pick_level(alpha: float, E_target: float) -> int:
    """Full-line level whose Bohr-Sommerfeld energy is closest to ``E_target``."""
    h = rescale_alpha_to_h(alpha)
    jb = semiclassic.action(E_target) / h - 0.5
    cands = [max(int(math.floor(jb)), 0), int(math.ceil(jb))]
    best = min(cands, key=lambda i: abs(semiclassic.bohr_sommerfeld(i, h).mu - E_target))
    return best + 1
