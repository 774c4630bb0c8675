import math

import numpy as np
import pytest
from scipy.optimize import brentq

from montgomery import semiclassic as sc
from montgomery.model import turning_points

import oracles

EC_RECORDED = 2.3507101458250212
LIMIT_RECORDED = 1.7403512908521692


@pytest.mark.parametrize("E", [0.5, 1.5, 2.35, 4.0])
def test_C_against_oracle(E):
    assert sc.capital_C(E) > 0
    assert sc.capital_C(E) == pytest.approx(oracles.C(E), rel=1e-9)


@pytest.mark.parametrize("E", [0.5, 1.7, 2.35, 4.0])
def test_F_direct_oracle_and_theta_form(E):
    f = sc.capital_F(E)
    assert f == pytest.approx(oracles.F(E), rel=1e-8, abs=1e-10)
    assert sc.capital_F_theta(E) == pytest.approx(f, rel=1e-6, abs=1e-9)


def test_C_logarithmic_decay_near_separatrix():
    es = [1.1, 1.01, 1.001]
    cs = [sc.capital_C(E) for E in es]
    assert cs[0] > cs[1] > cs[2] > 0
    # C log(1/(E-1)) creeps up toward 2
    scaled = [c * math.log(1 / (E - 1)) for c, E in zip(cs, es)]
    assert scaled[0] < scaled[1] < scaled[2] < 2


def test_guard_band_refuses():
    for E in (1.0, 1.0005, 0.9995):
        with pytest.raises(sc.SeparatrixError):
            sc.capital_C(E)
        with pytest.raises(sc.SeparatrixError):
            sc.capital_F(E)


def test_F_signs():
    assert sc.capital_F(0.5) > 0
    assert sc.capital_F(4.0) < 0
    assert abs(sc.capital_F(sc.find_Ec())) <= 1e-7


def test_F_decreasing_above_separatrix():
    vals = [sc.capital_F(E) for E in np.linspace(1.05, 5.0, 50)]
    assert np.all(np.diff(vals) < 0)


def test_F_positive_below_and_diverging_above():
    assert all(sc.capital_F(E) > 0 for E in np.linspace(0.05, 0.95, 20))
    assert sc.capital_F(100.0) < sc.capital_F(10.0) < 0


def test_theta_functions():
    ec = sc.find_Ec()
    assert abs(sc.theta_plus(ec**-0.5)) < 1e-8
    assert sc.theta_minus(2.0) < 0
    eta = 0.9
    lhs = sc.capital_F(eta**-2)
    rhs = -math.sqrt(2) * eta**-0.5 * sc.theta_plus(eta)
    assert lhs == pytest.approx(rhs, rel=1e-6)
    with pytest.raises(ValueError):
        sc.theta_plus(1.5)
    with pytest.raises(ValueError):
        sc.theta_minus(0.5)


def test_phi_special_values():
    assert sc.phi(1.0) == 2.0
    assert sc.phi(0.0) == 0.0
    assert abs(sc.phi(sc.find_Ec())) < 1e-7
    with pytest.raises(ValueError):
        sc.phi(-1.0)


def test_phi_continuous_across_separatrix():
    for sign in (1, -1):
        d = [abs(sc.phi(1 + sign * 10.0**-k) - 2) for k in range(2, 6)]
        assert all(b < a for a, b in zip(d, d[1:]))


@pytest.mark.parametrize("E", [0.5, 1.5, 2.35, 4.0])
def test_phi_is_two_minus_moment(E):
    assert sc.phi(E) == pytest.approx(2 - sc.measure_moment(E, 2), abs=1e-10)
    assert sc.phi(E) == pytest.approx(oracles.C(E) * oracles.F(E), rel=1e-8, abs=1e-10)


def test_measure_moments():
    assert sc.measure_moment(0.0, 2) == 2.0
    assert sc.measure_moment(1.0, 2) == 0.0
    assert sc.measure_moment(sc.find_Ec(), 2) == pytest.approx(2.0, abs=1e-8)
    for E in (0.5, 1.5, 2.35, 4.0):
        assert sc.measure_moment(E, 0) == pytest.approx(1.0, abs=1e-8)
        assert sc.measure_moment(E, 1) == 0.0 and sc.measure_moment(E, 3) == 0.0
        m4 = oracles.time_integral(E, lambda x: x**4) * oracles.C(E)
        assert sc.measure_moment(E, 4) == pytest.approx(m4, rel=1e-8)
    with pytest.raises(ValueError):
        sc.measure_moment(2.0, 9)


@pytest.mark.parametrize("mu", [1.5, 2.35, 4.0])
def test_action_derivative_identity(mu):
    assert math.pi * sc.action_deriv(mu) * sc.capital_C(mu) == pytest.approx(1.0, abs=1e-8)


def test_action_oracle_and_monotone():
    assert sc.action(2.35) == pytest.approx(oracles.action(2.35), rel=1e-10)
    vals = [sc.action(m) for m in (1.2, 1.5, 2, 3, 4)]
    assert all(b > a for a, b in zip(vals, vals[1:]))
    with pytest.raises(ValueError):
        sc.action(0.9)


def test_find_Ec():
    ec = sc.find_Ec()
    assert abs(ec - 2.35) <= 0.01
    assert sc.find_Ec(2.0, 3.0) == pytest.approx(ec, abs=1e-8)
    assert ec == pytest.approx(EC_RECORDED, abs=1e-10)
    oracle = brentq(oracles.F, 2.0, 3.0, xtol=1e-12)
    assert ec == pytest.approx(oracle, abs=1e-8)
    with pytest.raises(ValueError):
        sc.find_Ec(3.0, 4.0)


@pytest.mark.parametrize("E", [1.5, 2.35, 4.0])
def test_G_consistency(E):
    g = sc.capital_G(E)
    assert g > 0
    assert g == pytest.approx(0.5 * math.pi * oracles.action(E) * oracles.C(E) ** 2, rel=1e-8)


def test_second_derivative_limit():
    ec = sc.find_Ec()
    assert sc.F_prime(ec) < 0
    lim = sc.second_derivative_limit()
    assert lim > 0
    assert lim == pytest.approx(LIMIT_RECORDED, rel=1e-9)
    assert sc.second_derivative_limit(1e-4) == pytest.approx(lim, rel=1e-7)
    # oracle: (3 pi / 2) |F'| C^2 action, all from the midpoint rule
    fp = (oracles.F(ec + 1e-4) - oracles.F(ec - 1e-4)) / 2e-4
    alt = 1.5 * math.pi * abs(fp) * oracles.C(ec) ** 2 * oracles.action(ec)
    assert lim == pytest.approx(alt, rel=1e-6)
    assert sc.second_derivative_limit_alt() == pytest.approx(lim, rel=1e-9)


def test_bohr_sommerfeld():
    ec = sc.find_Ec()
    for j in (0, 10, 37):
        h = sc.action(ec) / (j + 0.5)
        p = sc.bohr_sommerfeld(j, h)
        assert p.mu == pytest.approx(ec, abs=1e-9)
        assert abs(sc.action(p.mu) - (j + 0.5) * h) <= 1e-10
    assert sc.bohr_sommerfeld(10, sc.action(2.35) / 10.5).mu == pytest.approx(2.35, abs=1e-9)


def test_bohr_sommerfeld_range_error():
    with pytest.raises(ValueError, match="admissible"):
        sc.bohr_sommerfeld(0, 0.01)
    with pytest.raises(ValueError):
        sc.bohr_sommerfeld(-1, 0.1)


def test_regime1_constants():
    k1, lim = sc.regime1_constants()
    assert k1 > 0 and lim < 0
    n = 10**6
    th = -0.5 * math.pi + (np.arange(n) + 0.5) * (math.pi / n)
    s2 = np.sin(th) ** 2
    w = math.sqrt(2) / np.sqrt(1 + s2)
    inv_k1 = float(np.sum(w)) * math.pi / n
    m2 = float(np.sum(2 * s2 * w)) * math.pi / n
    assert k1 == pytest.approx(1 / inv_k1, rel=1e-12)
    assert lim == pytest.approx(-m2 / inv_k1, rel=1e-12)


def test_bottom_regime_bound():
    assert sc.bottom_regime_bound(0.0) == pytest.approx(1 / math.sqrt(2))
    expected = 4 / (3 * math.sqrt(2 + math.sqrt(2)) + math.sqrt(2))
    assert sc.bottom_regime_bound(0.5) == pytest.approx(expected)
    vals = [sc.bottom_regime_bound(E) for E in (0, 0.3, 0.6, 0.9)]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    with pytest.raises(ValueError):
        sc.bottom_regime_bound(1.0)


@pytest.mark.parametrize("E", [0.5, 2.35])
def test_classical_profile(E):
    p = sc.classical_profile(E)
    assert p.turning == turning_points(E)
    assert p.Phi == pytest.approx(p.C * p.F)
    assert p.Phi == pytest.approx(2 - p.moment2, abs=1e-10)
    if E > 1:
        assert math.pi * p.action_deriv * p.C == pytest.approx(1.0, abs=1e-8)
    else:
        assert p.action is None
