"""Exact scalar oracles: binomial selector moments, Gaussian p-norms, Catalan numbers,
and the witness chains behind the lower bounds on the selector residual f(p).

The selector moment inequality reads

    || (1/k) sum_i delta_i - 1 ||_p  <=  C sqrt(p/k) + f(p)/k,     E delta_i = k/m.

Taking m = p, k = a m and keeping only the binomial term j = ceil(gamma m)
forces f(p) to grow linearly in p.
"""
from __future__ import annotations

import math
from typing import Literal

import numpy as np
from scipy import special

from nc_concentration.logger import GLOBAL_LOGGER as log
from nc_concentration.exception.custom_exception import ParameterError, PreconditionError
from nc_concentration.model.models import LowerBoundWitness
from nc_concentration.utils.config_loader import get_settings

LowerBoundVariant = Literal["fixed-gamma", "optimized-gamma"]

_REL = 1e-12


def _leq(x: float, y: float, rel: float = _REL) -> bool:
    return x <= y + rel * max(abs(x), abs(y), 1.0)


def _selector_log_terms(m: int, lam: float, k: float, p: float) -> np.ndarray:
    j = np.arange(m + 1, dtype=float)
    log_binom = special.gammaln(m + 1) - special.gammaln(j + 1) - special.gammaln(m - j + 1)
    log_prob = log_binom + special.xlogy(j, lam) + special.xlog1py(m - j, -lam)
    dev = np.abs(j / k - 1.0)
    with np.errstate(divide="ignore"):
        log_dev = np.where(dev > 0, p * np.log(np.where(dev > 0, dev, 1.0)), -np.inf)
    return log_prob + log_dev


def selector_moment_exact(m: int, lam: float, k: float, p: float) -> float:
    """(E |(1/k) sum_{i<=m} delta_i - 1|^p)^(1/p) with delta_i ~ Bernoulli(lam), summed in log space."""
    if int(m) != m or m < 1:
        raise ParameterError(f"m must be a positive integer, got {m}")
    if not 0.0 < lam <= 1.0:
        raise ParameterError(f"Selection rate must lie in (0, 1], got {lam}")
    if not k > 0:
        raise ParameterError(f"k must be > 0, got {k}")
    if math.isnan(p) or p < 1:
        raise ParameterError(f"Moment order must satisfy p >= 1, got {p}")
    m = int(m)
    if math.isinf(p):
        j = np.arange(m + 1, dtype=float)
        log_prob = special.xlogy(j, lam) + special.xlog1py(m - j, -lam)
        support = j[np.isfinite(log_prob)]
        return float(np.max(np.abs(support / k - 1.0)))
    terms = _selector_log_terms(m, lam, k, p)
    if not np.any(np.isfinite(terms)):
        return 0.0
    return float(math.exp(special.logsumexp(terms) / p))


def gaussian_pnorm_exact(p: float) -> float:
    """(E |g|^p)^(1/p) for standard normal g.

    Even integer orders use (p-1)!! exactly; other orders use
    E|g|^p = 2^(p/2) Gamma((p+1)/2) / sqrt(pi) in log form.
    """
    p = float(p)
    if math.isnan(p) or p < 1:
        raise ParameterError(f"Moment order must satisfy p >= 1, got {p}")
    if math.isinf(p):
        return math.inf
    if p.is_integer() and int(p) % 2 == 0 and p <= 256:
        double_factorial = math.prod(range(int(p) - 1, 0, -2))
        return math.exp(math.log(double_factorial) / p)
    log_moment = 0.5 * p * math.log(2.0) + special.gammaln((p + 1.0) / 2.0) - 0.5 * math.log(math.pi)
    return math.exp(log_moment / p)


def catalan_numbers(n_max: int) -> list[int]:
    """C_0 .. C_{n_max} from C_{n+1} = sum_i C_i C_{n-i}."""
    if n_max < 0:
        raise ParameterError(f"n_max must be >= 0, got {n_max}")
    out = [1]
    for n in range(n_max):
        out.append(sum(out[i] * out[n - i] for i in range(n + 1)))
    return out


def _binomial_term(m: int, j: int, k: float, lam: float) -> float:
    """|j/k - 1| C(m,j)^(1/m) lam^(j/m) (1-lam)^(1-j/m), the j-th term's share of the p = m moment."""
    log_binom = special.gammaln(m + 1) - special.gammaln(j + 1) - special.gammaln(m - j + 1)
    log_term = (
        math.log(abs(j / k - 1.0))
        + log_binom / m
        + (j / m) * math.log(lam)
        + (1.0 - j / m) * math.log1p(-lam)
    )
    return math.exp(log_term)


def _fixed_gamma(p: float, C: float) -> LowerBoundWitness:
    gamma = 0.25
    m = int(round(p))
    a = (7.0 / 8.0) ** 3 / (32.0 * C) ** 4
    if not a <= 0.125:
        raise PreconditionError(f"a = {a:.6g} exceeds 1/8 for C = {C}", hypothesis="a <= 1/8")
    if not a > 2.0 ** (-m):
        raise PreconditionError(
            f"a = {a:.6g} does not exceed 2^-m = {2.0 ** (-m):.6g} (m = {m}); increase p",
            hypothesis="a > 2^-m",
        )
    k = a * m
    j = math.ceil(gamma * m)
    binom_root = math.exp((special.gammaln(m + 1) - special.gammaln(j + 1) - special.gammaln(m - j + 1)) / m)
    dev = abs(j / k - 1.0)
    term_j = _binomial_term(m, j, k, a)
    exact = selector_moment_exact(m, a, k, m)
    sqrt_part = C * math.sqrt(m / k)
    implied_f = k * (exact - sqrt_part)
    lower = a ** 0.25 * (7.0 / 8.0) ** 0.75 / 32.0 * p

    floor_16 = a ** (gamma - 1.0) * (1.0 - a) ** (1.0 - gamma) / 16.0
    floor_8 = a ** (gamma - 1.0 + 1.0 / m) * (1.0 - a) ** (1.0 - gamma) / 8.0
    values = {
        "j_over_k": j / k,
        "gamma_over_a": gamma / a,
        "abs_dev": dev,
        "binom_root": binom_root,
        "floor_16": floor_16,
        "floor_8": floor_8,
        "term_j": term_j,
        "sqrt_part": sqrt_part,
        "choice_lhs": 32.0 * C * a**0.25,
        "choice_rhs": (1.0 - a) ** 0.75,
        "margin_lhs": 2.0 * C * a**-0.5,
        "margin_rhs": ((1.0 - a) / a) ** 0.75 / 16.0,
        "c0_over_C_times_p": (7.0 / 8.0) ** 1.5 / 32.0**2 / C * p,
    }
    checks = {
        "j/k >= gamma/a": _leq(gamma / a, j / k),
        "gamma/a >= 1/(4a)": _leq(0.25 / a, gamma / a),
        "1/(4a) >= 2": _leq(2.0, 0.25 / a),
        "|j/k-1| >= 1/(8a)": _leq(1.0 / (8.0 * a), dev),
        "1 <= C(m,j)^(1/m) <= 2": _leq(1.0, binom_root) and _leq(binom_root, 2.0),
        "floor_16 <= floor_8": _leq(floor_16, floor_8),
        "floor_8 <= term_j": _leq(floor_8, term_j),
        "term_j <= exact": _leq(term_j, exact),
        "32C a^(1/4) <= (1-a)^(3/4)": _leq(values["choice_lhs"], values["choice_rhs"]),
        "2C a^(-1/2) <= ((1-a)/a)^(3/4)/16": _leq(values["margin_lhs"], values["margin_rhs"]),
        "exact > C sqrt(p/k)": exact > sqrt_part,
        "implied_f >= lower": _leq(lower, implied_f),
        "lower = c0/C p": math.isclose(lower, values["c0_over_C_times_p"], rel_tol=1e-12),
    }
    return LowerBoundWitness(variant="fixed-gamma", p=p, Cconst=C, m=m, k=k, a=a, gamma=gamma, j=j,
                             values=values, checks=checks, exact_moment=exact, implied_f=implied_f, lower=lower)


def _optimized_gamma(p: float, C: float) -> LowerBoundWitness:
    if not C >= 1.5:
        raise PreconditionError(f"Optimized gamma needs C >= 1.5, got C = {C}", hypothesis="C >= 1.5")
    m = int(round(p))
    gamma = 1.0 / (2.0 * math.log(8.0 * math.e**2 * C))
    base = gamma / (8.0 * math.e * C)
    a = base ** (2.0 / (1.0 - 2.0 * gamma))
    if not a > 2.0 ** (-m):
        raise PreconditionError(
            f"a = {a:.6g} does not exceed 2^-m = {2.0 ** (-m):.6g} (m = {m}); increase p",
            hypothesis="a > 2^-m",
        )
    k = a * m
    j = math.ceil(gamma * m)
    dev = abs(j / k - 1.0)
    term_j = _binomial_term(m, j, k, a)
    exact = selector_moment_exact(m, a, k, m)
    sqrt_part = C * math.sqrt(m / k)
    implied_f = k * (exact - sqrt_part)
    lower = base ** (1.0 / (1.0 - 2.0 * gamma)) * C * p
    explicit = p / (32.0 * math.sqrt(2.0) * math.exp(1.5 + 2.0 / math.e) * math.log(8.0 * math.e**2 * C))
    floor = gamma / 4.0 * a ** (gamma - 1.0) * (1.0 - a) ** (1.0 - gamma)
    values = {
        "base": base,
        "abs_dev": dev,
        "floor": floor,
        "term_j": term_j,
        "sqrt_part": sqrt_part,
        "a_power": a ** (0.5 - gamma),
        "explicit": explicit,
    }
    checks = {
        "a <= gamma/2": _leq(a, gamma / 2.0),
        "gamma <= 1/4": _leq(gamma, 0.25),
        "|j/k-1| >= gamma/(2a)": _leq(gamma / (2.0 * a), dev),
        "floor <= term_j": _leq(floor, term_j),
        "term_j <= exact": _leq(term_j, exact),
        "a^(1/2-gamma) <= gamma/(8eC)": _leq(values["a_power"], base, rel=1e-9),
        "exact > C sqrt(p/k)": exact > sqrt_part,
        "implied_f >= lower": _leq(lower, implied_f),
        "lower >= explicit": _leq(explicit, lower),
    }
    return LowerBoundWitness(variant="optimized-gamma", p=p, Cconst=C, m=m, k=k, a=a, gamma=gamma, j=j,
                             values=values, checks=checks, exact_moment=exact, implied_f=implied_f, lower=lower)


def lower_bound_f(
    p: float, Cconst: float | None = None, variant: LowerBoundVariant = "fixed-gamma"
) -> tuple[float, LowerBoundWitness]:
    """Lower bound on f(p) with every intermediate inequality evaluated numerically.

    fixed-gamma:     gamma = 1/4, a = (7/8)^3 / (32C)^4, lower = c0/C p with c0 = (7/8)^(3/2)/32^2
    optimized-gamma: gamma = 1/(2 log(8e^2 C)), lower = (gamma/(8eC))^(1/(1-2gamma)) C p
    """
    C = get_settings().constants.C if Cconst is None else float(Cconst)
    if not C > 0:
        raise ParameterError(f"C must be > 0, got {C}")
    if math.isnan(p) or math.isinf(p) or p < 1:
        raise ParameterError(f"p must be finite and >= 1, got {p}")
    if variant == "fixed-gamma":
        witness = _fixed_gamma(float(p), C)
    elif variant == "optimized-gamma":
        witness = _optimized_gamma(float(p), C)
    else:
        raise ParameterError(f"Unknown lower-bound variant {variant!r}")
    failed = [name for name, ok in witness.checks.items() if not ok]
    if failed:
        log.warning("Lower-bound chain has failing links", variant=variant, p=p, C=C, failed=failed)
    else:
        log.info("Lower-bound chain verified", variant=variant, p=p, C=C, lower=witness.lower)
    return witness.lower, witness
