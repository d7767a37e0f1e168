"""Subcommand handlers behind the dispatcher.

Every handler receives the resolved parameter map and seed and returns a
``CommandResult``. Verification subcommands set ``passed`` from their checks;
pure evaluations report ``passed = True`` once they complete.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Mapping

import numpy as np

from nc_concentration.logger import GLOBAL_LOGGER as log
from nc_concentration.exception.custom_exception import FitError, UsageError
from nc_concentration.model.models import (
    BoundKind,
    InvertibilityTailRecord,
    LegendreSearch,
    MomentProfile,
    SelectorParams,
)
from nc_concentration.src.bounds import (
    cs_moment_bound,
    cs_tail_bound,
    incomplete_gamma_upper_check,
    rosenthal_bound,
    rosenthal_layer_cake,
    tail_bounds_at,
)
from nc_concentration.src.csfourier import (
    build_dft,
    candes_tao_gate,
    draw_selectors,
    estimate_invertibility_tail,
    phase_diagram,
    rip_constant_exact,
    rip_constant_sampled,
)
from nc_concentration.src.ensembles import (
    default_t_grid,
    estimate_pnorm,
    estimate_tails,
    gaussian_pnorm_exact,
    lower_bound_f,
    profile_of,
    resolve_spec,
    selector_moment_exact,
    verify_dominance,
)
from nc_concentration.src.ldp import (
    fenchel_legendre,
    ldp_upper_bound,
    parse_law,
    rate_curve,
    semicircle_moment,
)
from nc_concentration.utils.config_loader import get_settings
from nc_concentration.utils.rng import named_stream

TAIL_KINDS = ("bennett", "bernstein", "prohorov")


@dataclass
class CommandResult:
    records: list[dict[str, Any]]
    passed: bool = True
    summary: dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class Command:
    name: str
    handler: Callable[["Params", int], CommandResult]
    keys: frozenset[str]
    randomized: bool = False
    random_keys: frozenset[str] = frozenset()

    def needs_seed(self, params: Mapping[str, Any]) -> bool:
        """Always for Monte Carlo runs; otherwise only when a random-draw parameter is set."""
        if self.randomized:
            return True
        return any(params.get(key) is not None for key in self.random_keys)


class Params:
    """Typed access to a subcommand's parameter map."""

    def __init__(self, subcommand: str, values: Mapping[str, Any]):
        self.subcommand = subcommand
        self.values = dict(values)

    def has(self, key: str) -> bool:
        return self.values.get(key) is not None

    def raw(self, key: str, default: Any = None) -> Any:
        value = self.values.get(key)
        return default if value is None else value

    def require(self, key: str) -> Any:
        if not self.has(key):
            raise UsageError(f"'{self.subcommand}' needs --{key.replace('_', '-')}")
        return self.values[key]

    def real(self, key: str, default: float | None = None) -> float:
        value = self.raw(key, default) if default is not None else self.require(key)
        return float(value)

    def integer(self, key: str, default: int | None = None) -> int:
        value = self.raw(key, default) if default is not None else self.require(key)
        return int(value)

    def floats(self, key: str, default: Iterable[float] | None = None) -> list[float]:
        value = self.raw(key, None)
        if value is None:
            if default is None:
                self.require(key)
            value = default
        if isinstance(value, (int, float)):
            value = [value]
        return [float(v) for v in value]

    def ints(self, key: str, default: Iterable[int] | None = None) -> list[int]:
        return [int(v) for v in self.floats(key, default)]

    def flag(self, key: str) -> bool:
        return bool(self.raw(key, False))


def _constant(params: Params) -> float:
    return params.real("C", get_settings().constants.C)


def _confidence(params: Params) -> float:
    return params.real("confidence", get_settings().monte_carlo.confidence)


# ---------- bounds ----------

def bounds_eval(params: Params, seed: int) -> CommandResult:
    kind = params.raw("kind", "all")
    records: list[dict[str, Any]] = []
    if kind in (*TAIL_KINDS, "all"):
        profile = MomentProfile(S=params.real("S"), R=params.real("R"))
        for t in params.floats("t"):
            values = tail_bounds_at(profile, t)
            for name in TAIL_KINDS if kind == "all" else (kind,):
                records.append({"kind": name, "t": t, "S": profile.S, "R": profile.R, "value": values[name]})
    elif kind == BoundKind.ROSENTHAL.value:
        profile = MomentProfile(S=params.real("S"), R=params.real("R"))
        sharp = params.flag("sharp")
        for p in params.floats("p"):
            records.append({
                "kind": kind, "p": p, "S": profile.S, "R": profile.R, "sharp": sharp,
                "value": rosenthal_bound(profile, p, sharp=sharp),
                "layer_cake": rosenthal_layer_cake(profile, p),
            })
    elif kind == BoundKind.CS_MOMENT.value:
        sel = SelectorParams(m=params.integer("m"), k=params.real("k"), r=params.real("r"), Cconst=_constant(params))
        for p in params.floats("p"):
            records.append({"kind": kind, "p": p, "m": sel.m, "k": sel.k, "r": sel.r, "C": sel.Cconst,
                            "value": cs_moment_bound(sel, p)})
    elif kind == BoundKind.CS_TAIL.value:
        C, eps = _constant(params), params.real("eps")
        for t in params.floats("t"):
            records.append({"kind": kind, "t": t, "eps": eps, "C": C,
                            "branch": "gaussian" if t * eps <= C else "exponential",
                            "value": cs_tail_bound(t, eps, C)})
    elif kind == "incomplete-gamma":
        alpha = params.real("alpha")
        for p in params.floats("p"):
            gamma_val, bound = incomplete_gamma_upper_check(alpha, p)
            records.append({"kind": kind, "alpha": alpha, "p": p, "gamma_val": gamma_val,
                            "value": bound, "pass": gamma_val <= bound})
        return CommandResult(records, passed=all(r["pass"] for r in records))
    else:
        raise UsageError(f"Unknown bound kind {kind!r}")
    return CommandResult(records)


# ---------- Monte Carlo ----------

def _spec(params: Params):
    return resolve_spec(params.require("spec"))


def mc_tail(params: Params, seed: int) -> CommandResult:
    spec = _spec(params)
    grid = params.floats("t_grid", default_t_grid(spec))
    estimates = estimate_tails(spec, grid, params.integer("trials", 10_000), seed, _confidence(params))
    return CommandResult([e.model_dump() for e in estimates], summary={"profile": profile_of(spec).model_dump()})


def mc_rosenthal(params: Params, seed: int) -> CommandResult:
    spec = _spec(params)
    profile = profile_of(spec)
    trials = params.integer("trials", 10_000)
    records = []
    for p in params.floats("p_list", (2.0, 4.0, 8.0, 16.0)):
        est = estimate_pnorm(spec, p, trials, seed)
        bound = rosenthal_bound(profile, p)
        records.append({"p": p, "estimate": est.value, "stderr": est.stderr, "bound": bound,
                        "pass": est.value - 3.0 * est.stderr <= bound})
    return CommandResult(records, passed=all(r["pass"] for r in records),
                         summary={"profile": profile.model_dump()})


def mc_dominance(params: Params, seed: int) -> CommandResult:
    spec = _spec(params)
    grid = params.floats("t_grid", default_t_grid(spec))
    report = verify_dominance(spec, grid, params.integer("trials", 10_000), seed, _confidence(params))
    return CommandResult(
        [r.model_dump(by_alias=True) for r in report.records],
        passed=report.passed,
        summary={"profile": report.profile.model_dump(),
                 "violations": [{"t": t, "bound": kind} for t, kind in report.violations]},
    )


# ---------- optimality oracles ----------

def opt_selector(params: Params, seed: int) -> CommandResult:
    if params.has("m"):
        m, lam, k = params.integer("m"), params.real("lam"), params.real("k")
        records = [{"m": m, "lam": lam, "k": k, "p": p, "value": selector_moment_exact(m, lam, k, p)}
                   for p in params.floats("p")]
        return CommandResult(records)
    variant = params.raw("variant", "fixed-gamma")
    records, passed = [], True
    for p in params.floats("p"):
        _, witness = lower_bound_f(p, _constant(params), variant)
        record = witness.model_dump()
        record["pass"] = witness.holds
        passed = passed and witness.holds
        records.append(record)
    return CommandResult(records, passed=passed)


def opt_gaussian(params: Params, seed: int) -> CommandResult:
    records = []
    for p in params.floats("p"):
        value = gaussian_pnorm_exact(p)
        records.append({"p": p, "value": value, "stirling": math.sqrt(p / math.e)})
    return CommandResult(records)


# ---------- compressed sensing ----------

def _omega(params: Params, n: int, stream: np.random.Generator, seed: int) -> list[int]:
    if params.has("omega"):
        return params.ints("omega")
    if params.has("k"):
        return draw_selectors(n, params.real("k"), stream, seed).omega.tolist()
    return list(range(n))


def cs_rip(params: Params, seed: int) -> CommandResult:
    n, s = params.integer("n"), params.integer("s")
    sampled = params.has("num_supports")
    if sampled and params.flag("exact"):
        raise UsageError("'cs rip' takes --exact or --supports, not both")
    if params.has("omega") and params.has("k"):
        raise UsageError("'cs rip' takes --omega or --k, not both")
    trials = params.integer("trials", 1)
    if trials < 1:
        raise UsageError(f"'cs rip' needs --trials >= 1, got {trials}")
    if trials > 1 and not (params.has("k") or sampled):
        raise UsageError("'cs rip --trials' repeats random draws; give --k or --supports")
    dft = build_dft(n)
    records: list[dict[str, Any]] = []
    for trial in range(trials):
        omega = _omega(params, n, named_stream(seed, 0, trial), seed)
        if sampled:
            result = rip_constant_sampled(dft, omega, s, params.integer("num_supports"), named_stream(seed, 1, trial))
        else:
            result = rip_constant_exact(dft, omega, s)
        record = {"trial": trial, "n": n, "omega_size": len(omega), **result.model_dump()}
        if params.flag("gate"):
            record["gate"] = candes_tao_gate(dft, omega, s)
        records.append(record)
    summary: dict[str, Any] = {"max_delta": max(r["delta"] for r in records)}
    if trials == 1:
        summary["omega"] = omega
    return CommandResult(records, summary=summary)


def cs_recover(params: Params, seed: int) -> CommandResult:
    n, s = params.integer("n"), params.integer("s")
    summaries = phase_diagram(n, s, params.floats("k"), params.integer("trials", 200), seed,
                              amp_law=params.raw("amp_law", "unit"), confidence=_confidence(params))
    records = [summary.model_dump(exclude={"records"}) for summary in summaries]
    return CommandResult(records)


def cs_tail(params: Params, seed: int) -> CommandResult:
    n, s = params.integer("n"), params.integer("s")
    support = params.ints("T", range(s))
    records = estimate_invertibility_tail(
        n, params.real("k"), s, support, params.floats("t_eps"), params.integer("trials", 1000), seed,
        Cconst=_constant(params), confidence=_confidence(params),
    )
    summary: dict[str, Any] = {}
    if params.flag("fit"):
        summary["fit"] = fit_constant(records)
    return CommandResult([r.model_dump() for r in records], summary=summary)


def fit_constant(records: Iterable[InvertibilityTailRecord | Mapping[str, Any]], model: str = "csld") -> dict:
    """Least-squares C in log(empirical / s) = -t^2 / (2 C^2 e), fitted through the origin.

    Only records with empirical > 0 and t > 0 are used. The fit is descriptive:
    nothing downstream asserts against it.
    """
    if model != "csld":
        raise FitError(f"Unknown fit model {model!r}")
    rows = [r.model_dump() if isinstance(r, InvertibilityTailRecord) else dict(r) for r in records]
    usable = [r for r in rows if r.get("empirical", 0) > 0 and r.get("t", 0) > 0 and r.get("s", 0) > 0]
    if len(usable) < 3:
        raise FitError(f"Need at least 3 records with a positive empirical tail, got {len(usable)}")
    t = np.array([float(r["t"]) for r in usable])
    y = np.log(np.array([float(r["empirical"]) / float(r["s"]) for r in usable]))
    u = -(t * t) / (2.0 * math.e)
    (slope,), *_ = np.linalg.lstsq(u[:, None], y, rcond=None)
    if not slope > 0:
        raise FitError(f"Fitted slope {slope:.6g} is not positive; the tail does not decay in t^2")
    c_hat = 1.0 / math.sqrt(slope)
    residual = float(np.sqrt(np.mean((y - slope * u) ** 2)))
    log.info("Constant fitted", model=model, C_hat=c_hat, residual=residual, used=len(usable))
    return {"model": model, "C_hat": c_hat, "residual": residual, "used": len(usable)}


# ---------- large deviations ----------

def _search(params: Params) -> LegendreSearch | None:
    keys = ("lam_lo", "lam_hi", "grid_n")
    if not any(params.has(k) for k in keys):
        return None
    cfg = get_settings().legendre
    return LegendreSearch(
        lam_lo=params.real("lam_lo", cfg.lam_lo),
        lam_hi=params.real("lam_hi", cfg.lam_hi),
        grid_n=params.integer("grid_n", cfg.grid_n),
        refine_tol=cfg.refine_tol,
    )


def ldp_eval(params: Params, seed: int) -> CommandResult:
    law = parse_law(params.raw("law", "gauss"))
    what = params.raw("what", "rate")
    search = _search(params)
    records: list[dict[str, Any]] = []
    if what == "mgf":
        records = [{"lam": lam, "value": law.mgf(lam)} for lam in params.floats("lam")]
    elif what == "logmgf":
        records = [{"lam": lam, "value": law.log_mgf(lam)} for lam in params.floats("lam")]
    elif what == "rate":
        for x in params.floats("x"):
            ev = fenchel_legendre(law, x, search)
            records.append({"x": x, "value": ev.value, "argmax_lambda": ev.argmax_lambda,
                            "at_boundary": ev.at_boundary})
    elif what == "upper":
        records = [{"t": t, "value": ldp_upper_bound(law, t, search)} for t in params.floats("x")]
    elif what == "sf":
        records = [{"x": x, "value": law.sf(x)} for x in params.floats("x")]
    elif what == "moment":
        if law.kind.value != "semicircle":
            raise UsageError("--what moment is available for the semicircle law only")
        records = [{"order": order, "value": semicircle_moment(order, law.a, law.r)}
                   for order in params.ints("order")]
    elif what == "curve":
        records = rate_curve(law, params.floats("lam"), search)
    else:
        raise UsageError(f"Unknown quantity {what!r}")
    return CommandResult(records, summary={"law": law.model_dump()})


_COMMON = frozenset({"confidence", "C"})

COMMANDS: dict[str, Command] = {
    c.name: c
    for c in (
        Command("bounds eval", bounds_eval,
                frozenset({"kind", "S", "R", "t", "p", "sharp", "m", "k", "r", "eps", "alpha"}) | _COMMON),
        Command("mc tail", mc_tail, frozenset({"spec", "t_grid", "trials"}) | _COMMON, randomized=True),
        Command("mc rosenthal", mc_rosenthal, frozenset({"spec", "p_list", "trials"}) | _COMMON, randomized=True),
        Command("mc dominance", mc_dominance, frozenset({"spec", "t_grid", "trials"}) | _COMMON, randomized=True),
        Command("opt selector", opt_selector, frozenset({"p", "variant", "m", "lam", "k"}) | _COMMON),
        Command("opt gaussian", opt_gaussian, frozenset({"p"})),
        Command("cs rip", cs_rip, frozenset({"n", "s", "omega", "k", "trials", "exact", "num_supports", "gate"}),
                random_keys=frozenset({"k", "num_supports"})),
        Command("cs recover", cs_recover, frozenset({"n", "s", "k", "trials", "amp_law"}) | _COMMON,
                randomized=True),
        Command("cs tail", cs_tail, frozenset({"n", "k", "s", "T", "t_eps", "trials", "fit"}) | _COMMON,
                randomized=True),
        Command("ldp eval", ldp_eval,
                frozenset({"law", "what", "x", "lam", "order", "lam_lo", "lam_hi", "grid_n"})),
    )
}
