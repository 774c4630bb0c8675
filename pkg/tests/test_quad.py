import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from montgomery.quad import (
    IntegrandNaNError,
    NonConvergenceError,
    QuadratureSpec,
    integrate_singular,
    integrate_smooth,
)

SINGULAR = [
    (lambda x, da, db: da**-0.5, (0.0, 1.0), 2.0),
    (lambda x, da, db: (da * db) ** -0.5, (-1.0, 1.0), math.pi),
    (lambda x, da, db: (da * db) ** -0.5, (0.0, 1.0), math.pi),
]


@pytest.mark.parametrize("f, ab, exact", SINGULAR)
def test_singular_trivial(f, ab, exact):
    r = integrate_singular(f, QuadratureSpec(*ab), complement=True)
    assert abs(r.value - exact) <= 1e-10
    assert r.error_estimate >= 0 and r.levels_used <= QuadratureSpec(*ab).max_levels


def test_singular_plain_callable():
    r = integrate_singular(lambda x: x**-0.5, QuadratureSpec(0.0, 1.0))
    assert r.value == pytest.approx(2.0, abs=1e-10)


@pytest.mark.parametrize("f, ab, exact", [(np.sin, (0, math.pi), 2.0), (lambda x: x**3, (0, 1), 0.25)])
def test_smooth_trivial(f, ab, exact):
    assert abs(integrate_smooth(f, QuadratureSpec(*ab)).value - exact) <= 1e-10


def test_inverse_k1_against_midpoint():
    # oracle: s = sqrt2 sin(theta) turns the integrand into sqrt2 / sqrt(1 + sin^2)
    n = 10**7
    theta = -0.5 * math.pi + (np.arange(n) + 0.5) * (math.pi / n)
    oracle = float(np.sum(math.sqrt(2) / np.sqrt(1 + np.sin(theta) ** 2))) * math.pi / n
    r2 = math.sqrt(2)

    def f(s, da, db):
        return 1.0 / np.sqrt(0.5 * da * db * (1 + 0.5 * s * s))

    value = integrate_singular(f, QuadratureSpec(-r2, r2), complement=True).value
    assert value == pytest.approx(oracle, rel=1e-12)


@pytest.mark.parametrize("f, ab, exact", SINGULAR)
def test_tighter_tolerance_never_worse(f, ab, exact):
    errs = [abs(integrate_singular(f, QuadratureSpec(*ab, rel_tol=tol), complement=True).value - exact)
            for tol in (1e-4, 5e-5, 2.5e-5, 1.25e-5, 1e-8, 5e-9)]
    for a, b in zip(errs, errs[1:]):
        assert b <= a + 1e-15


@pytest.mark.parametrize("c", [-1.0, 3.0])
def test_linearity(c):
    spec = QuadratureSpec(0.0, 1.0)
    base = integrate_singular(lambda x: np.cos(x) / np.sqrt(x), spec).value
    scaled = integrate_singular(lambda x: c * np.cos(x) / np.sqrt(x), spec).value
    assert abs(scaled - c * base) <= 2 * spec.rel_tol * abs(c * base)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.1, 2.9))
def test_additivity_smooth(c):
    f = lambda x: np.exp(-x) * np.cos(3 * x)
    whole = integrate_smooth(f, QuadratureSpec(0.0, 3.0))
    left = integrate_smooth(f, QuadratureSpec(0.0, c))
    right = integrate_smooth(f, QuadratureSpec(c, 3.0))
    slack = whole.error_estimate + left.error_estimate + right.error_estimate + 1e-14
    assert abs(whole.value - left.value - right.value) <= slack


def test_nan_interior_names_node():
    f = lambda x: np.where(np.abs(x - 0.5) < 0.1, np.nan, 1.0)
    with pytest.raises(IntegrandNaNError) as info:
        integrate_singular(f, QuadratureSpec(0.0, 1.0))
    assert abs(info.value.node - 0.5) < 0.1
    with pytest.raises(IntegrandNaNError):
        integrate_smooth(f, QuadratureSpec(0.0, 1.0))


def test_nan_at_endpoint_is_dropped():
    f = lambda x, da, db: np.where(da < 1e-15, np.nan, 1.0)
    r = integrate_singular(f, QuadratureSpec(0.0, 1.0), complement=True)
    assert r.value == pytest.approx(1.0, abs=1e-12)


def test_nonconvergence_carries_estimate():
    with pytest.raises(NonConvergenceError) as info:
        integrate_singular(lambda x: np.sin(200 * x), QuadratureSpec(0.0, 1.0, max_levels=2))
    assert info.value.best is not None and math.isfinite(info.value.best.value)


@pytest.mark.parametrize("kw", [dict(a=1.0, b=0.0), dict(a=0.0, b=1.0, rel_tol=1e-16),
                                dict(a=0.0, b=1.0, rel_tol=0.1), dict(a=0.0, b=1.0, max_levels=0)])
def test_spec_validation(kw):
    with pytest.raises(ValueError):
        QuadratureSpec(**kw)
