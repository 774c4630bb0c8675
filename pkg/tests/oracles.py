"""Independent reference computations: smooth substitutions plus a dense midpoint rule."""
import math

import numpy as np

N_MID = 400_000


def _mid(a, b, n=N_MID):
    h = (b - a) / n
    return a + (np.arange(n) + 0.5) * h, h


def time_integral(E, g=lambda x: 1.0 + 0.0 * x, n=N_MID):
    """int_{x_-}^{x_+} g(x) (E - V)^(-1/2) dx on the half line, E > 0, E != 1."""
    r = math.sqrt(E)
    xp2 = 2 + 2 * r
    if E > 1:
        # x = x_+ sin(theta): integrand 2 g / sqrt(x^2 + 2 sqrt(E) - 2)
        th, h = _mid(0.0, 0.5 * math.pi, n)
        x = math.sqrt(xp2) * np.sin(th)
        return float(np.sum(2 * g(x) / np.sqrt(x * x + 2 * r - 2))) * h
    xm2 = 2 - 2 * r
    # y = x^2 = mid + half sin(theta): integrand g / sqrt(y)
    th, h = _mid(-0.5 * math.pi, 0.5 * math.pi, n)
    y = 0.5 * (xp2 + xm2) + 0.5 * (xp2 - xm2) * np.sin(th)
    x = np.sqrt(y)
    return float(np.sum(g(x) / x)) * h


def action(mu, n=N_MID):
    """(1/pi) int_{-x_+}^{x_+} sqrt(mu - V) dx for mu > 1."""
    r = math.sqrt(mu)
    xp = math.sqrt(2 + 2 * r)
    th, h = _mid(-0.5 * math.pi, 0.5 * math.pi, n)
    x = xp * np.sin(th)
    c = np.cos(th)
    return float(np.sum(xp * xp * c * c * np.sqrt(x * x + 2 * r - 2) / 2)) * h / math.pi


def C(E):
    return 1.0 / time_integral(E)


def F(E):
    return time_integral(E, lambda x: 2 - x * x)
