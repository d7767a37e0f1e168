"""Closed-form tail and moment bounds for sums of independent bounded self-adjoint summands.

All bounds consume only the aggregated profile (S, R): S is the sum of the variance
proxies sigma_j^2 and R the uniform bound sup_j M_j.
"""
from __future__ import annotations

import math

import numpy as np
from scipy import integrate, optimize, special

from nc_concentration.exception.custom_exception import (
    DegenerateError,
    DomainError,
    ParameterError,
    PreconditionError,
)
from nc_concentration.model.models import MomentProfile

PHI_SERIES_CUTOFF = 1e-4


def phi(x: float) -> float:
    """Bennett function (1 + x) log(1 + x) - x."""
    x = float(x)
    if math.isnan(x) or x < 0:
        raise DomainError(f"phi is defined for x >= 0, got {x}")
    if x < PHI_SERIES_CUTOFF:
        # sum_{k>=2} (-1)^k x^k / (k (k - 1)); eight terms reach double precision here
        total = 0.0
        power = x
        for k in range(2, 10):
            power *= x
            total += (-1) ** k * power / (k * (k - 1))
        return total
    return (1.0 + x) * math.log1p(x) - x


def _check_t(t: float) -> float:
    t = float(t)
    if math.isnan(t) or t < 0:
        raise DomainError(f"t must be >= 0, got {t}")
    return t


def bennett_tail(prof: MomentProfile, t: float) -> float:
    t = _check_t(t)
    if prof.S == 0:
        raise DegenerateError("Bennett bound is 0/0 for a profile with S = 0")
    return math.exp(-(prof.S / prof.R**2) * phi(t * prof.R / prof.S))


def bernstein_tail(prof: MomentProfile, t: float) -> float:
    t = _check_t(t)
    if t == 0:
        return 1.0
    return math.exp(-(t * t) / (2.0 * prof.S + (2.0 / 3.0) * t * prof.R))


def symmetric_bernstein_tail(prof: MomentProfile, t: float) -> float:
    """Two-sided form 2 * bernstein_tail, left unclipped as it enters the moment integral."""
    return 2.0 * bernstein_tail(prof, t)


def prohorov_tail(prof: MomentProfile, t: float) -> float:
    t = _check_t(t)
    if prof.S == 0:
        raise DegenerateError("Prohorov bound is undefined for a profile with S = 0")
    return math.exp(-(t / (2.0 * prof.R)) * math.asinh(t * prof.R / (2.0 * prof.S)))


def chernoff_lambda_opt(prof: MomentProfile, t: float) -> float:
    """Minimizer (1/R) log(1 + tR/S) of the exponential-moment bound."""
    t = float(t)
    if math.isnan(t) or t <= 0:
        raise DomainError(f"t must be > 0, got {t}")
    if prof.S == 0:
        raise DegenerateError("Chernoff parameter is undefined for a profile with S = 0")
    return math.log1p(t * prof.R / prof.S) / prof.R


def _pre_chernoff_bound(prof: MomentProfile, t: float, lam: float) -> float:
    """exp(-lam t + (S/R^2)(e^(lam R) - 1 - lam R)) before optimizing over lam."""
    lr = lam * prof.R
    return math.exp(-lam * t + (prof.S / prof.R**2) * (math.expm1(lr) - lr))


def rosenthal_bound(prof: MomentProfile, p: float, sharp: bool = False) -> float:
    """Moment bound 4(sqrt(Sp) + Rp); ``sharp`` gives 4 sqrt(Sp) + (4 sqrt(2)/3) e^(1/e) R p."""
    p = float(p)
    if math.isnan(p) or p < 2:
        raise ParameterError(f"Rosenthal bound needs p >= 2, got {p}")
    if sharp:
        return 4.0 * math.sqrt(prof.S * p) + (4.0 * math.sqrt(2.0) / 3.0) * math.exp(1.0 / math.e) * prof.R * p
    return 4.0 * (math.sqrt(prof.S * p) + prof.R * p)


def rosenthal_layer_cake(prof: MomentProfile, p: float) -> float:
    """(2p int_0^inf t^(p-1) exp(-t^2/(2S + 2tR/3)) dt)^(1/p) by adaptive quadrature.

    The integrand is rescaled by its peak value so large p stays finite; the
    result never exceeds ``rosenthal_bound(prof, p, sharp=True)``.
    """
    p = float(p)
    if math.isnan(p) or p < 2:
        raise ParameterError(f"Rosenthal bound needs p >= 2, got {p}")
    S, R = prof.S, prof.R

    def log_f(t: float) -> float:
        if t <= 0:
            return -math.inf
        return (p - 1.0) * math.log(t) - t * t / (2.0 * S + (2.0 / 3.0) * t * R)

    upper = 10.0 * (math.sqrt(2.0 * S * p) + R * p) + 1.0
    res = optimize.minimize_scalar(lambda t: -log_f(t), bounds=(1e-12, upper), method="bounded",
                                   options={"xatol": 1e-10 * upper})
    t_star = float(res.x)
    g_star = log_f(t_star)

    def scaled(t: float) -> float:
        return math.exp(log_f(t) - g_star) if t > 0 else 0.0

    left, _ = integrate.quad(scaled, 0.0, t_star, epsabs=0.0, epsrel=1e-10, limit=200)
    right, _ = integrate.quad(scaled, t_star, math.inf, epsabs=0.0, epsrel=1e-10, limit=200)
    log_moment = math.log(2.0 * p) + g_star + math.log(left + right)
    return math.exp(log_moment / p)


def regularized_upper_gamma(alpha: float, p: float) -> float:
    """Gamma(alpha, p) as gammaincc(alpha, p) * Gamma(alpha)."""
    return float(special.gammaincc(alpha, p)) * math.exp(float(special.gammaln(alpha)))


def incomplete_gamma_upper_check(alpha: float, p: float) -> tuple[float, float]:
    """(Gamma(alpha, p), 2 e^(-p) p^(alpha-1)), valid when p >= 2 alpha - 2.

    Quadrature runs on e^(-u) (1 + u/p)^(alpha-1) over [0, inf), which is the
    upper incomplete Gamma divided by e^(-p) p^(alpha-1); :func:`regularized_upper_gamma`
    is the library reference it is tested against.
    """
    alpha, p = float(alpha), float(p)
    if math.isnan(alpha) or alpha < 1:
        raise ParameterError(f"alpha must be >= 1, got {alpha}")
    if math.isnan(p) or p <= 0:
        raise DomainError(f"p must be > 0, got {p}")
    if p < 2 * alpha - 2:
        raise PreconditionError(
            f"Incomplete Gamma estimate needs p >= 2*alpha - 2 (p={p}, alpha={alpha})",
            hypothesis="p >= 2*alpha - 2",
        )
    scale_log = -p + (alpha - 1.0) * math.log(p)
    ratio, _ = integrate.quad(
        lambda u: math.exp(-u + (alpha - 1.0) * math.log1p(u / p)),
        0.0, math.inf, epsabs=0.0, epsrel=1e-11, limit=200,
    )
    gamma_val = ratio * math.exp(scale_log)
    if not math.isfinite(gamma_val):
        gamma_val = regularized_upper_gamma(alpha, p)
    return gamma_val, 2.0 * math.exp(scale_log)


def tail_bounds_at(prof: MomentProfile, t: float) -> dict[str, float]:
    """Bennett, Bernstein and Prohorov values at t, with the degenerate and t < 0 cases resolved.

    For t < 0 every bound is the trivial 1. For S = 0 the sum is almost surely 0;
    Bennett and Prohorov take their S -> 0 limit (0 for t > 0, 1 at t = 0) while
    Bernstein stays finite and is evaluated as is.
    """
    t = float(t)
    if t < 0:
        return {"bennett": 1.0, "bernstein": 1.0, "prohorov": 1.0}
    if prof.S == 0:
        limit = 1.0 if t == 0 else 0.0
        return {"bennett": limit, "bernstein": bernstein_tail(prof, t), "prohorov": limit}
    return {
        "bennett": bennett_tail(prof, t),
        "bernstein": bernstein_tail(prof, t),
        "prohorov": prohorov_tail(prof, t),
    }


def tail_grid(prof: MomentProfile, t_values) -> dict[str, np.ndarray]:
    """Vectorised evaluation of the three tails on a grid (used for ordering checks and exports)."""
    ts = np.asarray(t_values, dtype=float)
    out = {name: np.empty_like(ts) for name in ("bennett", "bernstein", "prohorov")}
    for i, t in enumerate(ts):
        for name, value in tail_bounds_at(prof, t).items():
            out[name][i] = value
    return out


def hoeffding_half_width(trials: int, confidence: float) -> float:
    """sqrt(log(2/delta) / (2N)) with delta = 1 - confidence; two-sided interval for a [0, 1] mean."""
    if trials < 1:
        raise ParameterError(f"trials must be >= 1, got {trials}")
    if not 0.0 < confidence < 1.0:
        raise ParameterError(f"confidence must lie in (0, 1), got {confidence}")
    return math.sqrt(math.log(2.0 / (1.0 - confidence)) / (2.0 * trials))
