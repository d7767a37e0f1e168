"""Families of independent, mean-zero, bounded random Hermitian summands a_j = c_j A_j.

    rademacher-fixed   c_j = +-1 with equal probability
    bounded-uniform    c_j uniform on [-1, 1]
    selector-diagonal  c_j = delta_j - lam, delta_j ~ Bernoulli(lam), A_j diagonal
    fourier-selector   c_j = delta_j - lam, A_j = n y_j^T (x) y_j^T on C^T
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np

from nc_concentration.logger import GLOBAL_LOGGER as log
from nc_concentration.exception.custom_exception import InputError, ParameterError
from nc_concentration.model.models import EnsembleConfig, EnsembleKind, MomentProfile
from nc_concentration.src.csfourier.dft import build_dft
from nc_concentration.src.spectral.operators import HermitianMatrix
from nc_concentration.utils.config_loader import get_settings
from nc_concentration.utils.rng import named_stream, trial_stream

SELECTOR_KINDS = (EnsembleKind.SELECTOR_DIAGONAL, EnsembleKind.FOURIER_SELECTOR)
DEFAULT_RATES = {EnsembleKind.SELECTOR_DIAGONAL: 0.5, EnsembleKind.FOURIER_SELECTOR: 0.25}

_BUILTIN = re.compile(r"^(selector|rademacher|uniform|fourier)-d(\d+)-n(\d+)(?:-lam([0-9.]+))?$")
_KIND_BY_PREFIX = {
    "selector": EnsembleKind.SELECTOR_DIAGONAL,
    "rademacher": EnsembleKind.RADEMACHER_FIXED,
    "uniform": EnsembleKind.BOUNDED_UNIFORM,
    "fourier": EnsembleKind.FOURIER_SELECTOR,
}


@dataclass(frozen=True)
class EnsembleSpec:
    kind: EnsembleKind
    coefficients: np.ndarray  # (n_terms, dim, dim), Hermitian slices
    lam: float | None = None
    name: str = ""
    config: EnsembleConfig | None = field(default=None, compare=False)

    @property
    def dim(self) -> int:
        return int(self.coefficients.shape[1])

    @property
    def n_terms(self) -> int:
        return int(self.coefficients.shape[0])

    @property
    def coefficient_norms(self) -> np.ndarray:
        return np.max(np.abs(np.linalg.eigvalsh(self.coefficients)), axis=1)

    @classmethod
    def from_coefficients(cls, kind: EnsembleKind | str, coefficients, lam: float | None = None,
                          renormalize: bool = False, name: str = "") -> "EnsembleSpec":
        kind = EnsembleKind(kind)
        stack = np.asarray(coefficients, dtype=complex)
        if stack.ndim == 2:
            stack = stack[None, :, :]
        if stack.ndim != 3 or stack.shape[1] != stack.shape[2]:
            raise InputError(f"Coefficients must be a stack of square matrices, got shape {stack.shape}")
        stack = np.stack([HermitianMatrix.from_array(a).data for a in stack])
        norms = np.max(np.abs(np.linalg.eigvalsh(stack)), axis=1)
        if not np.any(norms > 0):
            raise ParameterError("All coefficient matrices vanish")
        if renormalize:
            stack = stack / np.where(norms > 0, norms, 1.0)[:, None, None]
        if kind in SELECTOR_KINDS:
            lam = DEFAULT_RATES[kind] if lam is None else float(lam)
            if not 0.0 < lam <= 1.0:
                raise ParameterError(f"Selection rate must lie in (0, 1], got {lam}")
        else:
            lam = None
        stack.setflags(write=False)
        return cls(kind=kind, coefficients=stack, lam=lam, name=name)


def _random_coefficients(kind: EnsembleKind, dim: int, n_terms: int, stream: np.random.Generator) -> np.ndarray:
    if kind == EnsembleKind.SELECTOR_DIAGONAL:
        diag = stream.uniform(-1.0, 1.0, size=(n_terms, dim))
        return np.stack([np.diag(row) for row in diag]).astype(complex)
    g = stream.standard_normal((n_terms, dim, dim)) + 1j * stream.standard_normal((n_terms, dim, dim))
    return 0.5 * (g + np.conj(np.transpose(g, (0, 2, 1))))


def _fourier_coefficients(n: int, support: list[int]) -> np.ndarray:
    dft = build_dft(n)
    restricted = dft.matrix[:, support]
    # x_j = n y_j^T (x) y_j^T, with entries conj(y_j[t]) y_j[t'] to match the support Gram
    return n * np.einsum("jt,ju->jtu", restricted.conj(), restricted)


def build_ensemble(config: EnsembleConfig, name: str = "") -> EnsembleSpec:
    kind = config.kind
    if kind == EnsembleKind.FOURIER_SELECTOR:
        support = list(config.support) if config.support is not None else list(range(config.dim))
        if len(support) != config.dim:
            raise ParameterError(f"Support size {len(support)} differs from dim={config.dim}")
        if config.dim > config.n_terms or min(support) < 0 or max(support) >= config.n_terms:
            raise ParameterError(f"Support must be a subset of {{0..{config.n_terms - 1}}}")
        stack = _fourier_coefficients(config.n_terms, support)
        spec = EnsembleSpec.from_coefficients(kind, stack, lam=config.lam, renormalize=False, name=name)
    else:
        if config.coeff == "identity":
            stack = np.broadcast_to(np.eye(config.dim, dtype=complex), (config.n_terms, config.dim, config.dim))
        else:
            stream = named_stream(config.coeff_seed, list(EnsembleKind).index(kind))
            stack = _random_coefficients(kind, config.dim, config.n_terms, stream)
        spec = EnsembleSpec.from_coefficients(kind, stack, lam=config.lam,
                                              renormalize=config.renormalize, name=name)
    return EnsembleSpec(spec.kind, spec.coefficients, spec.lam, name, config)


def parse_builtin(name: str) -> EnsembleConfig:
    """``<kind>-d<dim>-n<terms>[-lam<rate>]``, e.g. ``rademacher-d4-n8`` or ``fourier-d2-n16-lam0.25``."""
    match = _BUILTIN.match(name)
    if not match:
        raise ParameterError(f"Unknown ensemble name {name!r}")
    prefix, dim, n_terms, lam = match.groups()
    kind = _KIND_BY_PREFIX[prefix]
    dim, n_terms = int(dim), int(n_terms)
    return EnsembleConfig(
        kind=kind,
        dim=dim,
        n_terms=n_terms,
        lam=float(lam) if lam else None,
        coeff="identity" if dim == 1 and kind != EnsembleKind.FOURIER_SELECTOR else "random",
    )


def builtin_spec(name: str) -> EnsembleSpec:
    return build_ensemble(parse_builtin(name), name=name)


def builtin_names(shapes=((1, 16), (4, 8), (8, 8))) -> list[str]:
    """Every built-in kind at every (dim, terms) shape."""
    return [f"{prefix}-d{d}-n{n}" for d, n in shapes for prefix in _KIND_BY_PREFIX]


def resolve_spec(spec) -> EnsembleSpec:
    if isinstance(spec, EnsembleSpec):
        return spec
    if isinstance(spec, str):
        return builtin_spec(spec)
    if isinstance(spec, EnsembleConfig):
        return build_ensemble(spec)
    if isinstance(spec, dict):
        return build_ensemble(EnsembleConfig.model_validate(spec))
    raise ParameterError(f"Cannot build an ensemble from {type(spec).__name__}")


def term_profile(spec: EnsembleSpec) -> tuple[np.ndarray, np.ndarray]:
    """Per-term (sigma_j^2, M_j), with sigma_j^2 = ||E a_j^2|| and M_j = sup ||a_j||."""
    norms = spec.coefficient_norms
    sq = norms**2  # ||A_j^2|| = ||A_j||^2 for Hermitian A_j
    if spec.kind == EnsembleKind.RADEMACHER_FIXED:
        return sq, norms
    if spec.kind == EnsembleKind.BOUNDED_UNIFORM:
        return sq / 3.0, norms
    lam = float(spec.lam)
    return lam * (1.0 - lam) * sq, max(lam, 1.0 - lam) * norms


def profile_of(spec: EnsembleSpec) -> MomentProfile:
    sigma2, bounds = term_profile(spec)
    return MomentProfile(S=float(np.sum(sigma2)), R=float(np.max(bounds)), n=spec.n_terms)


def draw_coefficients(spec: EnsembleSpec, stream: np.random.Generator) -> np.ndarray:
    n = spec.n_terms
    if spec.kind == EnsembleKind.RADEMACHER_FIXED:
        return np.where(stream.random(n) < 0.5, -1.0, 1.0)
    if spec.kind == EnsembleKind.BOUNDED_UNIFORM:
        return stream.uniform(-1.0, 1.0, size=n)
    lam = float(spec.lam)
    return (stream.random(n) < lam).astype(float) - lam


def _check_sample(spec: EnsembleSpec, coeffs: np.ndarray, total: np.ndarray) -> None:
    _, bounds = term_profile(spec)
    term_norms = np.abs(coeffs) * spec.coefficient_norms
    if np.any(term_norms > bounds * (1.0 + 1e-12) + 1e-12):
        raise InputError("Sampled summand exceeds its norm bound")
    if np.max(np.abs(np.linalg.eigvalsh(total))) > np.sum(bounds) * (1.0 + 1e-10) + 1e-12:
        raise InputError("Sampled sum exceeds the triangle-inequality bound")


def sample_matrix(spec: EnsembleSpec, stream: np.random.Generator, debug: bool | None = None) -> np.ndarray:
    """One draw of sum_j a_j as a raw array."""
    coeffs = draw_coefficients(spec, stream)
    total = np.tensordot(coeffs, spec.coefficients, axes=1)
    if debug if debug is not None else get_settings().monte_carlo.debug_checks:
        _check_sample(spec, coeffs, total)
    return total


def sample_sum(spec: EnsembleSpec, stream: np.random.Generator) -> HermitianMatrix:
    return HermitianMatrix.from_array(sample_matrix(spec, stream))


def sample_eigenvalues(spec: EnsembleSpec, stream: np.random.Generator) -> np.ndarray:
    return np.linalg.eigvalsh(sample_matrix(spec, stream))


def norm_bound_total(spec: EnsembleSpec) -> float:
    """sum_j M_j, an almost-sure bound on the operator norm of the sum."""
    return float(np.sum(term_profile(spec)[1]))


def summand_mean_check(spec: EnsembleSpec, trials: int, seed: int, z_max: float = 5.0) -> dict:
    """Entrywise check that the empirical mean of each a_j is within ``z_max`` standard errors of 0.

    Entries of a_j are c_j times fixed numbers, so the entrywise z-score of a_j
    equals the z-score of its coefficient c_j.
    """
    coeffs = np.stack([draw_coefficients(spec, trial_stream(seed, i)) for i in range(trials)])
    mean = coeffs.mean(axis=0)
    sd = coeffs.std(axis=0, ddof=1)
    stderr = sd / math.sqrt(trials)
    z = np.where(stderr > 0, np.abs(mean) / np.where(stderr > 0, stderr, 1.0), np.where(mean == 0, 0.0, np.inf))
    worst = float(np.max(z))
    log.info("Summand mean check", ensemble=spec.name or spec.kind.value, trials=trials, max_z=worst)
    return {"max_z": worst, "passed": bool(worst <= z_max)}
