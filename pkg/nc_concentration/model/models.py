"""Record types shared across modules and serialized into run reports."""
from __future__ import annotations

import math
from enum import Enum
from typing import Annotated, Any, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

U64 = Annotated[int, Field(ge=0, le=2**64 - 1)]
Probability = Annotated[float, Field(ge=0.0, le=1.0)]


# ---------- bounds ----------

class MomentProfile(BaseModel):
    """Aggregated hypotheses of the tail bounds: S = sum of variance proxies, R = uniform bound."""

    model_config = ConfigDict(frozen=True)

    S: float = Field(..., ge=0.0)
    R: float = Field(..., gt=0.0)
    n: int = Field(1, ge=1)

    @model_validator(mode="after")
    def _finite(self) -> "MomentProfile":
        if not (math.isfinite(self.S) and math.isfinite(self.R)):
            raise ValueError("S and R must be finite")
        return self


class SelectorParams(BaseModel):
    """Selector model: m terms, each kept independently with probability lam = k/m."""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    m: int = Field(..., ge=1)
    k: float = Field(..., gt=0.0)
    r: float = Field(..., ge=0.0)
    lam: Optional[float] = Field(None, alias="lambda")
    Cconst: float = Field(2.0, gt=0.0)

    @model_validator(mode="before")
    @classmethod
    def _fill_rate(cls, data: Any) -> Any:
        if isinstance(data, dict) and data.get("lambda", data.get("lam")) is None:
            if "m" in data and "k" in data:
                data = dict(data)
                data["lambda"] = float(data["k"]) / float(data["m"])
                data.pop("lam", None)
        return data

    @model_validator(mode="after")
    def _rate_consistent(self) -> "SelectorParams":
        rate = self.k / self.m
        if self.lam is None or abs(self.lam - rate) > 1e-12:
            raise ValueError(f"lambda must equal k/m = {rate}")
        if not 0.0 < self.lam <= 1.0:
            raise ValueError("lambda must lie in (0, 1]")
        return self


class BoundKind(str, Enum):
    BENNETT = "bennett"
    BERNSTEIN = "bernstein"
    PROHOROV = "prohorov"
    ROSENTHAL = "rosenthal"
    CS_MOMENT = "cs-moment"
    CS_TAIL = "cs-tail"


# ---------- ensembles ----------

class EnsembleKind(str, Enum):
    SELECTOR_DIAGONAL = "selector-diagonal"
    RADEMACHER_FIXED = "rademacher-fixed"
    BOUNDED_UNIFORM = "bounded-uniform"
    FOURIER_SELECTOR = "fourier-selector"


class EnsembleConfig(BaseModel):
    """Serializable description of an ensemble; coefficient matrices are derived from ``coeff_seed``.

    For ``fourier-selector`` the summands live on C^T, ``n_terms`` is the DFT size n and
    ``support`` is T (defaults to ``{0, ..., dim-1}``).
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: EnsembleKind
    dim: int = Field(..., ge=1, le=256)
    n_terms: int = Field(..., ge=1)
    lam: Optional[float] = Field(None, gt=0.0, le=1.0)
    coeff_seed: U64 = 0
    coeff: Literal["random", "identity"] = "random"
    renormalize: bool = True
    support: Optional[list[int]] = None


class TailEstimate(BaseModel):
    """Monte Carlo estimate of the averaged spectral tail with a two-sided Hoeffding interval."""

    model_config = ConfigDict(frozen=True)

    t: float
    mean: Probability
    ci_low: float
    ci_high: float
    trials: int = Field(..., ge=1)
    seed: U64
    confidence: float = Field(..., gt=0.0, lt=1.0)

    @model_validator(mode="after")
    def _ordered(self) -> "TailEstimate":
        if not self.ci_low <= self.mean <= self.ci_high:
            raise ValueError("confidence interval must contain the mean")
        return self


class MomentEstimate(BaseModel):
    model_config = ConfigDict(frozen=True)

    p: float
    value: float = Field(..., ge=0.0)
    stderr: float = Field(0.0, ge=0.0)
    trials: int = Field(..., ge=1)
    seed: U64


class DominanceRecord(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    t: float
    empirical: float
    ci_low: float
    ci_high: float
    bounds: dict[str, float]
    passed: bool = Field(..., alias="pass")


class DominanceReport(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    profile: MomentProfile
    trials: int
    seed: U64
    confidence: float
    records: list[DominanceRecord]
    passed: bool = Field(..., alias="pass")
    violations: list[tuple[float, str]] = Field(default_factory=list)


class LowerBoundWitness(BaseModel):
    """Numbers behind a lower bound on the residual function of the selector moment inequality."""

    variant: Literal["fixed-gamma", "optimized-gamma"]
    p: float
    Cconst: float
    m: int
    k: float
    a: float
    gamma: float
    j: int
    values: dict[str, float]
    checks: dict[str, bool]
    exact_moment: float
    implied_f: float
    lower: float

    @property
    def holds(self) -> bool:
        return all(self.checks.values())


# ---------- csfourier ----------

class RipResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    s: int = Field(..., ge=1)
    delta: float = Field(..., ge=0.0)
    alpha_star: float = Field(..., gt=0.0)
    lam_max: float
    lam_min: float
    supports_examined: int = Field(..., ge=0)
    exact: bool


class RecoveryResult(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    f_true: Any
    f_hat: Any
    residual: float
    rel_error: float
    iterations: int
    converged: bool
    exact: bool


class RecoveryTrial(BaseModel):
    trial: int
    support: list[int]
    omega_size: int
    rel_error: float
    residual: float
    iterations: int
    converged: bool
    exact: bool


class RecoverySummary(BaseModel):
    n: int
    s: int
    k: float
    trials: int
    seed: U64
    amp_law: str
    successes: int
    success_fraction: Probability
    ci_low: float
    ci_high: float
    confidence: float
    mean_omega_size: float
    records: list[RecoveryTrial] = Field(default_factory=list)


class InvertibilityTailRecord(BaseModel):
    n: int
    k: float
    s: int
    t_eps: float
    eps: float
    t: float
    empirical: Probability
    ci_low: float
    ci_high: float
    bound: float
    bound_valid: bool
    omega_in_range_frequency: Probability
    trials: int
    seed: U64


class SampleSizeResult(BaseModel):
    s: int
    n: int
    M: float
    Cconst: float
    variant: Literal["n-over-s", "polynomial", "single-support"]
    k: float
    failure_probability: float
    large_n_condition: Optional[bool] = None


class UniformFailureBound(BaseModel):
    n: int
    s: int
    t: float
    Cconst: float
    support_count: float
    bound: float
    sufficient_condition: bool


# ---------- ldp ----------

class LawKind(str, Enum):
    GAUSSIAN_STD = "gaussian-std"
    SEMICIRCLE = "semicircle"
    MIXTURE = "mixture"


class LegendreSearch(BaseModel):
    model_config = ConfigDict(frozen=True)

    lam_lo: float = -50.0
    lam_hi: float = 50.0
    grid_n: int = Field(2001, ge=3)
    refine_tol: float = Field(1e-10, gt=0.0)

    @model_validator(mode="after")
    def _window(self) -> "LegendreSearch":
        if not self.lam_lo < self.lam_hi:
            raise ValueError("lam_lo must be below lam_hi")
        return self


class RateFunctionEval(BaseModel):
    x: float
    value: float
    argmax_lambda: float
    at_boundary: bool
    grid_spec: LegendreSearch


# ---------- solver ----------

class SolverParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    rho: float = Field(1.0, gt=0.0)
    max_iter: int = Field(50000, ge=1)
    tol_primal: float = Field(1e-9, gt=0.0)
    tol_dual: float = Field(1e-9, gt=0.0)


# ---------- cli ----------

ParamValue = Union[bool, int, float, str, list[float], list[int], list[str], dict[str, Any], None]


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    subcommand: str = Field(..., min_length=1)
    params: dict[str, ParamValue] = Field(default_factory=dict)
    seed: U64 = 0
    out_path: Optional[str] = None
    format: Literal["json", "csv"] = "json"


class RunReport(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    schema_version: str
    version: str
    config: RunConfig
    records: list[dict[str, Any]]
    passed: bool = Field(..., alias="pass")
    summary: dict[str, Any] = Field(default_factory=dict)
    wall_time_ms: int = Field(..., ge=0)
