"""Acceptance criteria 1-11 as callable checks with embedded tolerances.

Each ``criterion_N`` returns a ``CriterionResult``; ``run_all`` runs them in
order.  Used by ``montgomery verify`` and by the test suite.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import curves, semiclassic
from .eig import eigenvector, kth_eigenvalue
from .fdop import build_operator
from .quad import QuadratureSpec, integrate_singular, integrate_smooth

__all__ = ["CriterionResult", "CRITERIA", "run_all", "located_critical"]

TABLE1_ALPHA = (0.35, 1.13, 1.14, 1.55, 1.78, 2.06)
TABLE1_QUOTIENT = (4.78, 1.27, 2.69, 2.25, 2.41, 2.34)
SEMICLASSICAL_ALPHAS = (5.0, 10.0, 20.0, 40.0)
SEMICLASSICAL_E = 2.35
IDENTITY_POINTS = [(j, a) for j in (1, 2, 3) for a in (0.5, 1.0, 2.0)]


@dataclass(frozen=True)
class CriterionResult:
    number: int
    name: str
    passed: bool
    measured: str
    seconds: float

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] criterion {self.number:>2} {self.name}: {self.measured} ({self.seconds:.1f}s)"


def _timed(number, name):
    def wrap(fn):
        def run() -> CriterionResult:
            t0 = time.perf_counter()
            ok, measured = fn()
            return CriterionResult(number, name, bool(ok), measured, time.perf_counter() - t0)
        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        return run
    return wrap


@lru_cache(maxsize=None)
def located_critical(j: int) -> curves.CriticalPoint:
    return curves.find_critical(j)


@_timed(1, "E_c")
def criterion_1():
    t0 = time.perf_counter()
    ec = semiclassic._find_Ec(1.5, 4.0)
    dt = time.perf_counter() - t0
    return abs(ec - 2.35) <= 0.01 and dt < 1.0, f"E_c={ec:.10f} in {dt:.3f}s"


@_timed(2, "Table 1 critical points")
def criterion_2():
    t0 = time.perf_counter()
    ok = True
    parts = []
    for j, (a_ref, q_ref) in enumerate(zip(TABLE1_ALPHA, TABLE1_QUOTIENT), start=1):
        cp = located_critical(j)
        good = abs(cp.alpha_c - a_ref) <= 0.02 and abs(cp.quotient - q_ref) <= 0.05
        ok &= good
        parts.append(f"j={j}:{cp.alpha_c:.4f}/{cp.quotient:.3f}")
    ok &= time.perf_counter() - t0 < 300
    return ok, " ".join(parts)


@_timed(3, "quotient minima")
def criterion_3():
    t0 = time.perf_counter()
    q31 = curves.quotient_scan((1, 3), (0.05, 1.0), 0.05)
    q42 = curves.quotient_scan((2, 4), (0.0, 8.0), 0.05)
    ok = abs(q31.min_ratio - 4.075) <= 0.010 and abs(q42.min_ratio - 2.82) <= 0.02
    ok &= time.perf_counter() - t0 < 300
    return ok, (f"min l3/l1={q31.min_ratio:.5f}@{q31.argmin:.3f}, "
                f"min l4/l2={q42.min_ratio:.5f}@{q42.argmin:.3f}")


@_timed(4, "analytic bounds")
def criterion_4():
    alphas = np.round(np.arange(-2.0, 4.0 + 1e-9, 0.1), 12)
    window = np.linspace(curves.ALPHA_STAR / 20, curves.ALPHA_STAR, 20)
    violations = 0
    checked = 0
    for a in np.concatenate([alphas, window]):
        b = curves.analytic_bounds_check(float(a))
        checked += 1
        violations += not b.all_ok
    return violations == 0, f"{violations} violations over {checked} alpha values"


@_timed(5, "critical-point facts")
def criterion_5():
    cps = [located_critical(j) for j in range(1, 7)]
    ok = 0.0 < cps[0].alpha_c < curves.ALPHA_STAR
    ok &= all(cp.alpha_c**2 < cp.lambda_at for cp in cps if cp.j % 2)
    ok &= all(cp.second_deriv > 0 for cp in cps)
    l2 = " ".join(f"{cp.second_deriv:.4f}" for cp in cps)
    return ok, f"alpha_c1={cps[0].alpha_c:.5f}, lambda''={l2}"


@_timed(6, "identity suite")
def criterion_6():
    ac1 = located_critical(1).alpha_c
    worst = {"fh": 0.0, "dilation": 0.0, "ipf2": 0.0, "energy": 0.0, "newid2": 0.0}
    for j, a in IDENTITY_POINTS + [(1, ac1)]:
        s = curves.eigen_curve(j, a)
        fd = curves.fd_lambda_prime(j, a)
        r = curves.identity_residuals(j, a)
        # at a critical point lambda' ~ 0, so scale by lambda instead
        worst["fh"] = max(worst["fh"], abs(s.lambda_prime - fd) / max(abs(fd), s.lam))
        worst["dilation"] = max(worst["dilation"], abs(r.dilation) / r.lam)
        worst["ipf2"] = max(worst["ipf2"], abs(r.ipf2) / r.lam)
        worst["energy"] = max(worst["energy"], abs(r.energy_split) / r.lam)
    for j in range(1, 7):
        cp = located_critical(j)
        r = curves.identity_residuals(j, cp.alpha_c)
        worst["newid2"] = max(worst["newid2"], abs(r.newid2) / r.lam)
    limits = {"fh": 1e-5, "dilation": 1e-5, "ipf2": 1e-4, "energy": 1e-5, "newid2": 1e-4}
    ok = all(worst[k] <= limits[k] for k in limits)
    return ok, ", ".join(f"{k}={v:.2e}" for k, v in worst.items())


def _decreasing(xs) -> bool:
    return all(b < a for a, b in zip(xs, xs[1:]))


@_timed(7, "semiclassical convergence")
def criterion_7():
    rows = []
    for a in SEMICLASSICAL_ALPHAS:
        j = curves.pick_level(a, SEMICLASSICAL_E)
        rows.append(curves.semiclassical_comparison(j, a))
    in_window = all(2.0 <= r.E <= 2.7 for r in rows)
    phi = [r.phi_error for r in rows]
    bs = [r.bs_error for r in rows]
    mom = [r.moment_error for r in rows]
    slope = float(np.polyfit(np.log([r.h for r in rows]), np.log(bs), 1)[0])
    ok = in_window and _decreasing(phi) and _decreasing(bs) and _decreasing(mom) and slope >= 1.0
    return ok, (f"j={[r.j for r in rows]} E={[round(float(r.E), 4) for r in rows]} "
                f"|phi| {phi[0]:.2e}->{phi[-1]:.2e}, |bs| {bs[0]:.2e}->{bs[-1]:.2e}, "
                f"|moment| {mom[0]:.2e}->{mom[-1]:.2e}, BS order {slope:.2f}")


@_timed(8, "lambda'' limit")
def criterion_8():
    lim = semiclassic.second_derivative_limit()
    gaps = {j: (located_critical(j).second_deriv - lim) / lim for j in (10, 20, 30)}
    ok = abs(gaps[30]) < abs(gaps[10]) and abs(gaps[30]) <= 0.15
    return ok, f"limit={lim:.6f}, gaps " + ", ".join(f"j={j}:{g:+.2e}" for j, g in gaps.items())


@_timed(9, "bottom regime")
def criterion_9():
    v = curves.eigen_curve(1, 100.0).lambda_prime * 10.0
    return abs(v - 1.0 / math.sqrt(2.0)) < 0.05, f"lambda'_1(100)*sqrt(100)={v:.6f}"


def laplacian_errors(n: int = 50) -> float:
    T = build_operator(lambda x: 0.0 * x, 0.5 * (n + 1), n)
    worst = 0.0
    for k in (1, 2, 3, n // 2, n - 1, n):
        exact = 2.0 - 2.0 * math.cos(k * math.pi / (n + 1))
        worst = max(worst, abs(kth_eigenvalue(T, k) - exact))
    return worst


def quadrature_errors() -> float:
    checks = [
        (integrate_singular(lambda x, da, db: da**-0.5, QuadratureSpec(0, 1), complement=True), 2.0),
        (integrate_singular(lambda x, da, db: (da * db) ** -0.5, QuadratureSpec(-1, 1),
                            complement=True), math.pi),
        (integrate_singular(lambda x, da, db: (da * db) ** -0.5, QuadratureSpec(0, 1),
                            complement=True), math.pi),
        (integrate_smooth(np.sin, QuadratureSpec(0, math.pi)), 2.0),
        (integrate_smooth(lambda x: x**3, QuadratureSpec(0, 1)), 0.25),
    ]
    return max(abs(r.value - ref) for r, ref in checks)


def box_stability(j: int = 1, alpha: float = 1.0) -> float:
    box = curves.Box.for_level(alpha, j)
    return abs(curves.eigenvalue(j, alpha, box=box) - curves.eigenvalue(j, alpha, box=box.enlarged(2.0)))


def richardson_order(j: int = 1, alpha: float = 1.0) -> float:
    """Error ratio under n-doubling against a Richardson-extrapolated finer pair."""
    bc, k = curves.level_family(j, alpha)
    box = curves.Box.for_level(alpha, j)
    lam = []
    for refine in range(4):
        T = curves._operator(alpha, bc, box, refine)
        lam.append(eigenvector(T, kth_eigenvalue(T, k)).value)
    ref = (4.0 * lam[3] - lam[2]) / 3.0
    return (lam[0] - ref) / (lam[1] - ref)


@_timed(10, "solver unit oracles")
def criterion_10():
    lap = laplacian_errors()
    qd = quadrature_errors()
    box = box_stability()
    order = richardson_order()
    ok = lap <= 1e-12 and qd <= 1e-10 and box < 1e-9 and 3.5 <= order <= 4.5
    return ok, f"laplacian {lap:.1e}, quadrature {qd:.1e}, box {box:.1e}, order {order:.4f}"


@_timed(11, "eigenvalue asymptotics")
def criterion_11():
    r = curves.eigenvalue(1, 100.0) / (math.sqrt(2.0) * 10.0)
    split = curves.eigenvalue(2, 8.0) - curves.eigenvalue(1, 8.0)
    return 0.95 <= r <= 1.05 and split < 1e-6, f"lambda_1(100)/(sqrt2*10)={r:.6f}, split(8)={split:.1e}"


CRITERIA = (criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7, criterion_8, criterion_9, criterion_10, criterion_11)


def run_all(only=None) -> list[CriterionResult]:
    out = []
    for i, fn in enumerate(CRITERIA, start=1):
        if only is None or i in only:
            out.append(fn())
    return out
