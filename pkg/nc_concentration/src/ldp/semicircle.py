"""The semicircular law gamma_{a,r}: density (2 / (pi r^2)) sqrt(r^2 - (t - a)^2) on [a - r, a + r].

gamma_{0,2} has even moments equal to the Catalan numbers and moment generating
function M(lam) = sum_n lam^(2n) / ((n+1)! n!) = I_1(2 lam) / lam.
"""
from __future__ import annotations

import math

import numpy as np
from scipy import special

from nc_concentration.exception.custom_exception import ParameterError

# series is used up to this |lam|; beyond it the scaled Bessel form is exact to rounding
_SERIES_LIMIT = 20.0
_MIN_NODES = 16


def _check_radius(r: float) -> None:
    if not r > 0:
        raise ParameterError(f"Semicircle radius must be > 0, got {r}")


def semicircle_moment(order: int, a: float = 0.0, r: float = 2.0) -> float:
    """gamma_{a,r}(t^order) by Gauss-Chebyshev quadrature of the second kind.

    The rule with n nodes is exact for polynomials of degree 2n - 1, so the
    moment is exact up to rounding.
    """
    if int(order) != order or order < 0:
        raise ParameterError(f"Moment order must be a non-negative integer, got {order}")
    _check_radius(r)
    x, w = special.roots_chebyu(max(int(order) // 2 + 1, _MIN_NODES))
    return float(2.0 / math.pi * np.sum(w * (a + r * x) ** int(order)))


def semicircle_mgf(lam: float) -> float:
    """M(lam) of gamma_{0,2} by summing its power series."""
    lam = float(lam)
    if lam == 0.0:
        return 1.0
    x2 = lam * lam
    term = 1.0
    total = 1.0
    n = 0
    while True:
        # t_{n+1} / t_n = lam^2 / ((n + 2)(n + 1))
        term *= x2 / ((n + 2) * (n + 1))
        n += 1
        total += term
        if term <= np.finfo(float).eps * total or not math.isfinite(total):
            return total


def _log_mgf_unit(mu: float) -> float:
    """log M(mu) for gamma_{0,2}."""
    mu = abs(float(mu))
    if mu <= _SERIES_LIMIT:
        return math.log(semicircle_mgf(mu))
    # I_1(2 mu) = ive(1, 2 mu) e^{2 mu}
    return math.log(special.ive(1, 2.0 * mu)) + 2.0 * mu - math.log(mu)


def semicircle_log_mgf(lam: float, a: float = 0.0, r: float = 2.0) -> float:
    """log E exp(lam X) for X ~ gamma_{a,r}, equal to lam a + log M(lam r / 2)."""
    _check_radius(r)
    return float(lam) * a + _log_mgf_unit(float(lam) * r / 2.0)


def semicircle_mgf_quadrature(lam: float, a: float = 0.0, r: float = 2.0, nodes: int = 64) -> float:
    """E exp(lam X) for X ~ gamma_{a,r} by quadrature, used to cross-check the series."""
    _check_radius(r)
    x, w = special.roots_chebyu(nodes)
    return float(2.0 / math.pi * np.sum(w * np.exp(lam * (a + r * x))))


def semicircle_sf(x: float, a: float = 0.0, r: float = 2.0) -> float:
    """gamma_{a,r}([x, inf)) in closed form: 1/2 - (arcsin u + u sqrt(1 - u^2)) / pi, u = (x - a)/r clipped."""
    _check_radius(r)
    u = min(max((float(x) - a) / r, -1.0), 1.0)
    return float(max(0.5 - (math.asin(u) + u * math.sqrt(1.0 - u * u)) / math.pi, 0.0))
