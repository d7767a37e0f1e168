"""Log-MGFs of scalar laws, their numerical Fenchel-Legendre transform, and the
large-deviation upper bound -inf_{s >= t} Lambda*(s).

The mixture law g_theta puts weight 1 - theta on the standard Gaussian and theta on
the semicircle gamma_{0,2}:

    Lambda_theta(lam) = log((1 - theta) e^{lam^2/2} + theta M(lam)).

Its normalized tails decay like the Gaussian's (rate x^2/2), but Lambda_theta
stays a bounded distance log(1 - theta) away from lam^2/2.
"""
from __future__ import annotations

import math
from typing import Callable, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy import optimize, special, stats

from nc_concentration.logger import GLOBAL_LOGGER as log
from nc_concentration.exception.custom_exception import ConcentrationError, ParameterError, WindowError
from nc_concentration.model.models import LawKind, LegendreSearch, RateFunctionEval
from nc_concentration.src.ldp.semicircle import semicircle_log_mgf, semicircle_sf
from nc_concentration.utils.config_loader import get_settings

LogMgf = Callable[[float], float]


def _check_theta(theta: float, closed: bool = True) -> None:
    ok = 0.0 <= theta <= 1.0 if closed else 0.0 < theta < 1.0
    if not ok:
        interval = "[0, 1]" if closed else "(0, 1)"
        raise ParameterError(f"Mixture weight theta must lie in {interval}, got {theta}")


def gaussian_log_mgf(lam: float) -> float:
    return 0.5 * float(lam) ** 2


def mixture_log_mgf(theta: float, lam: float) -> float:
    _check_theta(theta)
    lam = float(lam)
    if theta == 0.0:
        return 0.5 * lam * lam
    if theta == 1.0:
        return semicircle_log_mgf(lam)
    return float(special.logsumexp([0.5 * lam * lam, semicircle_log_mgf(lam)], b=[1.0 - theta, theta]))


def mixture_log_mgf_gap(theta: float, lam: float) -> float:
    """Lambda_theta(lam) - lam^2/2; tends to log(1 - theta) as |lam| grows."""
    return mixture_log_mgf(theta, lam) - 0.5 * float(lam) ** 2


def check_mixture_bound(theta: float, lam: float) -> tuple[float, float]:
    """(lhs, rhs) with lhs = |Lambda_theta - lam^2/2 - log(1-theta)| and rhs = theta/(1-theta) e^{2|lam| - lam^2/2}.

    lhs = log(1 + theta/(1-theta) M(lam) e^{-lam^2/2}) is evaluated in that form,
    which keeps it accurate where it is close to zero.
    """
    _check_theta(theta, closed=False)
    lam = float(lam)
    odds = theta / (1.0 - theta)
    log_ratio = math.log(odds) + semicircle_log_mgf(lam) - 0.5 * lam * lam
    lhs = float(np.logaddexp(0.0, log_ratio))
    rhs = odds * math.exp(2.0 * abs(lam) - 0.5 * lam * lam)
    return lhs, rhs


class ScalarLaw(BaseModel):
    """A scalar law known through its log-MGF."""

    model_config = ConfigDict(frozen=True)

    kind: LawKind
    a: float = 0.0
    r: float = Field(2.0, gt=0.0)
    theta: Optional[float] = None

    @model_validator(mode="after")
    def _theta_for_mixture(self) -> "ScalarLaw":
        if self.kind == LawKind.MIXTURE:
            if self.theta is None or not 0.0 <= self.theta <= 1.0:
                raise ValueError("mixture needs theta in [0, 1]")
        return self

    @classmethod
    def gaussian(cls) -> "ScalarLaw":
        return cls(kind=LawKind.GAUSSIAN_STD)

    @classmethod
    def semicircle(cls, a: float = 0.0, r: float = 2.0) -> "ScalarLaw":
        return cls(kind=LawKind.SEMICIRCLE, a=a, r=r)

    @classmethod
    def mixture(cls, theta: float) -> "ScalarLaw":
        return cls(kind=LawKind.MIXTURE, theta=theta)

    @property
    def centered(self) -> bool:
        return self.kind != LawKind.SEMICIRCLE or self.a == 0.0

    def log_mgf(self, lam: float) -> float:
        if self.kind == LawKind.GAUSSIAN_STD:
            return gaussian_log_mgf(lam)
        if self.kind == LawKind.SEMICIRCLE:
            return semicircle_log_mgf(lam, self.a, self.r)
        return mixture_log_mgf(float(self.theta), lam)

    def mgf(self, lam: float) -> float:
        return math.exp(self.log_mgf(lam))

    def sf(self, x: float) -> float:
        if self.kind == LawKind.GAUSSIAN_STD:
            return float(stats.norm.sf(x))
        if self.kind == LawKind.SEMICIRCLE:
            return semicircle_sf(x, self.a, self.r)
        theta = float(self.theta)
        return (1.0 - theta) * float(stats.norm.sf(x)) + theta * semicircle_sf(x)


def parse_law(text: str) -> ScalarLaw:
    """``gauss``, ``semicircle``, ``semicircle:<a>,<r>`` or ``mixture:<theta>``."""
    name, _, arg = text.partition(":")
    try:
        if name in ("gauss", "gaussian", LawKind.GAUSSIAN_STD.value) and not arg:
            return ScalarLaw.gaussian()
        if name == LawKind.SEMICIRCLE.value:
            if not arg:
                return ScalarLaw.semicircle()
            a, r = (float(v) for v in arg.split(","))
            return ScalarLaw.semicircle(a, r)
        if name == LawKind.MIXTURE.value and arg:
            return ScalarLaw.mixture(float(arg))
    except ValueError as e:
        raise ParameterError(f"Malformed law {text!r}", e) from e
    raise ParameterError(f"Unknown law {text!r}; expected gauss, semicircle[:a,r] or mixture:theta")


def default_search() -> LegendreSearch:
    cfg = get_settings().legendre
    return LegendreSearch(lam_lo=cfg.lam_lo, lam_hi=cfg.lam_hi, grid_n=cfg.grid_n, refine_tol=cfg.refine_tol)


def _as_log_mgf(logmgf: LogMgf | ScalarLaw) -> tuple[LogMgf, bool]:
    if isinstance(logmgf, ScalarLaw):
        return logmgf.log_mgf, logmgf.centered
    return logmgf, True


def _legendre(logmgf: LogMgf, x: float, search: LegendreSearch, centered: bool) -> RateFunctionEval:
    lo, hi = search.lam_lo, search.lam_hi
    if centered:
        # for a centered law the sup over lam is attained on the side of sign(x)
        lo, hi = (max(lo, 0.0), hi) if x >= 0 else (lo, min(hi, 0.0))
        if lo >= hi:
            raise WindowError(f"Search window [{search.lam_lo}, {search.lam_hi}] excludes the side of x = {x}")
    grid = np.linspace(lo, hi, search.grid_n)
    try:
        values = np.array([lam * x - logmgf(lam) for lam in grid])
    except (OverflowError, ValueError, ConcentrationError) as e:
        raise WindowError(f"log-MGF failed inside the window [{lo}, {hi}]", e) from e
    if not np.all(np.isfinite(values)):
        bad = grid[~np.isfinite(values)]
        raise WindowError(f"log-MGF is not finite on [{lo}, {hi}], first at lam = {bad[0]:g}")

    i = int(np.argmax(values))
    best_lam, best = float(grid[i]), float(values[i])
    left, right = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
    if right > left:
        res = optimize.minimize_scalar(
            lambda lam: -(lam * x - logmgf(lam)),
            bounds=(float(left), float(right)),
            method="bounded",
            options={"xatol": search.refine_tol},
        )
        if res.success and math.isfinite(res.fun) and -res.fun > best:
            best_lam, best = float(res.x), float(-res.fun)

    at_boundary = (i == 0 and lo == search.lam_lo) or (i == grid.size - 1 and hi == search.lam_hi)
    return RateFunctionEval(x=float(x), value=best, argmax_lambda=best_lam, at_boundary=at_boundary, grid_spec=search)


def fenchel_legendre(
    logmgf: LogMgf | ScalarLaw, x: float, search: LegendreSearch | None = None, centered: bool | None = None
) -> RateFunctionEval:
    """Lambda*(x) = sup_lam [lam x - Lambda(lam)] by a grid scan and bounded Brent refinement.

    For a centered law only lam >= 0 is searched when x >= 0 (lam <= 0 when x < 0).
    An argmax on the window edge is returned with ``at_boundary`` set; the true
    sup may then be larger, or infinite when x lies outside the support.
    """
    fn, law_centered = _as_log_mgf(logmgf)
    centered = law_centered if centered is None else centered
    search = search or default_search()
    result = _legendre(fn, float(x), search, centered)
    if result.at_boundary:
        log.warning("Legendre argmax on the search window edge", x=x, argmax_lambda=result.argmax_lambda,
                    value=result.value, lam_lo=search.lam_lo, lam_hi=search.lam_hi)
    return result


def ldp_upper_bound(
    logmgf: LogMgf | ScalarLaw, t: float, search: LegendreSearch | None = None,
    centered: bool | None = None, span: float | None = None, points: int = 33,
) -> float:
    """-inf_{s >= t} Lambda*(s), scanning s on [t, t + span] and refining the minimizer.

    For a centered law Lambda* is increasing on s >= 0, so the scan usually
    returns -Lambda*(max(t, 0)).
    """
    fn, law_centered = _as_log_mgf(logmgf)
    centered = law_centered if centered is None else centered
    search = search or default_search()
    t = float(t)
    if centered and t <= 0:
        # Lambda*(0) = -Lambda(0) = 0 and s = 0 is admissible
        return 0.0
    span = 4.0 * max(1.0, abs(t)) if span is None else span
    s_grid = np.linspace(t, t + span, points)
    rates = np.array([_legendre(fn, s, search, centered).value for s in s_grid])
    i = int(np.argmin(rates))
    best = float(rates[i])
    if i > 0:
        res = optimize.minimize_scalar(
            lambda s: _legendre(fn, s, search, centered).value,
            bounds=(float(s_grid[i - 1]), float(s_grid[min(i + 1, points - 1)])),
            method="bounded",
            options={"xatol": 1e-8},
        )
        if res.success and res.fun < best:
            best = float(res.fun)
    log.info("LDP upper bound evaluated", t=t, bound=-best, argmin_s=float(s_grid[i]))
    return -best


def mixture_tail_rate(theta: float, t: float, n: int) -> float:
    """(1/n) log P(g_theta >= sqrt(n) t); tends to -t^2/2 for t > 0."""
    _check_theta(theta)
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    x = math.sqrt(n) * float(t)
    log_parts = [float(stats.norm.logsf(x))]
    weights = [1.0 - theta]
    sf_semi = semicircle_sf(x)
    if sf_semi > 0.0:
        log_parts.append(math.log(sf_semi))
        weights.append(theta)
    return float(special.logsumexp(log_parts, b=weights)) / n


def rate_curve(
    logmgf: LogMgf | ScalarLaw, lam_grid, search: LegendreSearch | None = None, centered: bool | None = None
) -> list[dict]:
    """Rows (lam, Lambda(lam), Lambda*(lam)) with the transform evaluated at x = lam, for CSV export."""
    fn, law_centered = _as_log_mgf(logmgf)
    centered = law_centered if centered is None else centered
    search = search or default_search()
    rows = []
    for lam in lam_grid:
        ev = _legendre(fn, float(lam), search, centered)
        rows.append({"lam": float(lam), "log_mgf": fn(float(lam)), "rate": ev.value, "at_boundary": ev.at_boundary})
    return rows
