"""Partial-Fourier measurement model: DFT rows, Bernoulli row selection and support Grams."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Literal, Sequence, Union

import numpy as np
from scipy import linalg, special

from nc_concentration.logger import GLOBAL_LOGGER as log
from nc_concentration.exception.custom_exception import (
    DegenerateError,
    ParameterError,
    PreconditionError,
)
from nc_concentration.model.models import (
    InvertibilityTailRecord,
    SampleSizeResult,
    UniformFailureBound,
)
from nc_concentration.src.bounds.tail_bounds import hoeffding_half_width
from nc_concentration.src.spectral.operators import HermitianMatrix
from nc_concentration.utils.config_loader import get_settings
from nc_concentration.utils.parallel import concat, ordered_map
from nc_concentration.utils.rng import trial_stream


@dataclass(frozen=True)
class DftSystem:
    """Unitary DFT with rows y_w[t] = exp(-2 pi i w t / n) / sqrt(n)."""

    n: int
    matrix: np.ndarray

    def rows(self, omega: Sequence[int]) -> np.ndarray:
        """Selected-row measurement matrix Phi (|omega| x n)."""
        return self.matrix[np.asarray(omega, dtype=np.intp), :]


@dataclass(frozen=True)
class SelectorDraw:
    n: int
    k_expected: float
    omega: np.ndarray
    seed: int = 0

    @property
    def size(self) -> int:
        return int(self.omega.shape[0])


OmegaLike = Union[SelectorDraw, Sequence[int], np.ndarray]


def build_dft(n: int) -> DftSystem:
    if int(n) != n or n < 1:
        raise ParameterError(f"DFT size must be a positive integer, got {n}")
    mat = linalg.dft(int(n), scale="sqrtn")
    mat.setflags(write=False)
    return DftSystem(int(n), mat)


def draw_selectors(n: int, k: float, stream: np.random.Generator, seed: int = 0) -> SelectorDraw:
    """Bernoulli(k/n) row inclusions; E|omega| = k."""
    if not 0 < k <= n:
        raise ParameterError(f"Expected selection count must satisfy 0 < k <= n, got k={k}, n={n}")
    keep = stream.random(n) < (k / n)
    omega = np.flatnonzero(keep).astype(np.intp)
    omega.setflags(write=False)
    return SelectorDraw(n=n, k_expected=float(k), omega=omega, seed=seed)


def omega_indices(omega: OmegaLike, n: int) -> np.ndarray:
    idx = omega.omega if isinstance(omega, SelectorDraw) else np.asarray(omega, dtype=np.intp).ravel()
    if idx.size and (idx.min() < 0 or idx.max() >= n):
        raise ParameterError(f"Row indices must lie in [0, {n})")
    return np.unique(idx)


def support_indices(T: Iterable[int], n: int) -> np.ndarray:
    idx = np.asarray(list(T), dtype=np.intp).ravel()
    if idx.size == 0:
        raise ParameterError("Support must be non-empty")
    if idx.min() < 0 or idx.max() >= n:
        raise ParameterError(f"Support must be a subset of {{0..{n - 1}}}")
    if np.unique(idx).size != idx.size:
        raise ParameterError("Support has repeated indices")
    return np.sort(idx)


def full_gram(dft: DftSystem, omega: OmegaLike) -> np.ndarray:
    """Phi* Phi on all n coordinates; every support Gram is one of its principal submatrices."""
    phi = dft.rows(omega_indices(omega, dft.n))
    return phi.conj().T @ phi


def gram_on_support(dft: DftSystem, omega: OmegaLike, T: Iterable[int]) -> HermitianMatrix:
    """G_T[t, t'] = sum over i in omega of conj(y_i[t]) y_i[t']."""
    cols = support_indices(T, dft.n)
    phi = dft.rows(omega_indices(omega, dft.n))[:, cols]
    return HermitianMatrix.from_array(phi.conj().T @ phi)


def deviation_norm(
    dft: DftSystem,
    omega: OmegaLike,
    T: Iterable[int],
    normalization: Literal["expected-k", "realized-k"] = "expected-k",
    k: float | None = None,
) -> float:
    """Operator norm of (n / kappa) G_T - I, kappa = k (expected) or |omega| (realized)."""
    idx = omega_indices(omega, dft.n)
    if normalization == "realized-k":
        if idx.size == 0:
            raise DegenerateError("Realized-k normalization is undefined for an empty row set")
        kappa = float(idx.size)
    elif normalization == "expected-k":
        if k is None:
            if not isinstance(omega, SelectorDraw):
                raise ParameterError("expected-k normalization needs k or a SelectorDraw")
            k = omega.k_expected
        if not k > 0:
            raise ParameterError(f"k must be > 0, got {k}")
        kappa = float(k)
    else:
        raise ParameterError(f"Unknown normalization {normalization!r}")
    g = gram_on_support(dft, idx, T).data
    dev = (dft.n / kappa) * g - np.eye(g.shape[0])
    return float(np.max(np.abs(np.linalg.eigvalsh(dev))))


def single_support_bound(s: int, t: float, Cconst: float) -> float:
    """s exp(-t^2 / (2 C^2 e)), the fixed-support invertibility tail."""
    return s * math.exp(-(t * t) / (2.0 * Cconst**2 * math.e))


def estimate_invertibility_tail(
    n: int,
    k: float,
    s: int,
    T: Iterable[int],
    t_eps: Union[float, Sequence[float]],
    trials: int,
    seed: int,
    Cconst: float | None = None,
    confidence: float | None = None,
) -> list[InvertibilityTailRecord]:
    """Empirical P(||(n/k) G_T - I|| >= t_eps) against s exp(-t^2/(2C^2 e)).

    eps is taken as sqrt(s/k) so that k = s / eps^2, and t = t_eps / eps. Every
    value in ``t_eps`` is evaluated on the same row draws, so the empirical
    frequencies are non-increasing along a sorted grid. The bound only applies
    while t_eps <= C; records outside carry ``bound_valid = False``.
    """
    settings = get_settings()
    Cconst = settings.constants.C if Cconst is None else Cconst
    confidence = settings.monte_carlo.confidence if confidence is None else confidence
    support = support_indices(T, n)
    if support.size != s:
        raise ParameterError(f"Support size {support.size} differs from s={s}")
    if trials < 1:
        raise ParameterError("trials must be >= 1")
    grid = [float(t_eps)] if np.isscalar(t_eps) else [float(v) for v in t_eps]
    dft = build_dft(n)

    def run(block: range) -> list[tuple[float, int]]:
        out = []
        for trial in block:
            draw = draw_selectors(n, k, trial_stream(seed, trial), seed)
            out.append((deviation_norm(dft, draw, support, "expected-k", k), draw.size))
        return out

    rows = concat(ordered_map(run, trials))
    deviations = np.array([r[0] for r in rows])
    sizes = np.array([r[1] for r in rows])
    in_range = float(np.mean((sizes >= k / 2.0) & (sizes <= 1.5 * k)))
    eps = math.sqrt(s / k)
    h = hoeffding_half_width(trials, confidence)

    records = []
    for te in grid:
        frac = float(np.mean(deviations >= te))
        t = te / eps
        records.append(
            InvertibilityTailRecord(
                n=n, k=k, s=s, t_eps=te, eps=eps, t=t,
                empirical=frac, ci_low=frac - h, ci_high=frac + h,
                bound=single_support_bound(s, t, Cconst),
                bound_valid=te <= Cconst,
                omega_in_range_frequency=in_range,
                trials=trials, seed=seed,
            )
        )
    log.info("Invertibility tail estimated", n=n, k=k, s=s, trials=trials, points=len(records),
             omega_in_range=in_range)
    return records


def sample_size_for_rip(
    s: int, n: int, M: float, Cconst: float | None = None,
    variant: Literal["n-over-s", "polynomial"] = "n-over-s",
) -> SampleSizeResult:
    """Expected row count making every s-sparse support well conditioned (Delta_s < 1/2).

    ``n-over-s``: k = 8 C^2 e (M+1) s^2 log(n/s), failure s^2 e^s (n/s)^(-Ms).
    ``polynomial``: k = 8 C^2 e (M+1) s^2 log n, failure s^(2-s) e^s n^(-Ms).
    """
    Cconst = get_settings().constants.C if Cconst is None else Cconst
    if s < 1 or n < 1:
        raise ParameterError("s and n must be positive")
    if M <= 0:
        raise ParameterError(f"Precision constant M must be > 0, got {M}")
    if s > n / 2:
        raise PreconditionError(f"Sample size formula assumes s <= n/2 (s={s}, n={n})", hypothesis="s <= n/2")
    base = 8.0 * Cconst**2 * math.e * (M + 1.0) * s * s
    large_n = 2.0 * math.log(s) + s * math.log(n * math.e / s) < (M + 1.0) * s * math.log(n / s)
    if variant == "n-over-s":
        k = base * math.log(n / s)
        failure = math.exp(2.0 * math.log(s) + s - M * s * math.log(n / s))
    elif variant == "polynomial":
        k = base * math.log(n)
        failure = math.exp((2.0 - s) * math.log(s) + s - M * s * math.log(n))
    else:
        raise ParameterError(f"Unknown variant {variant!r}")
    return SampleSizeResult(s=s, n=n, M=M, Cconst=Cconst, variant=variant, k=k,
                            failure_probability=failure, large_n_condition=large_n)


def sample_size_for_invertibility(s: int, n: int, M: float, Cconst: float | None = None) -> SampleSizeResult:
    """Single-support row count at t eps = 1/2 with eps^-2 = 8 C^2 e (M log n + log s).

    The tail bound at that point is s exp(-(M log n + log s)) = n^(-M).
    """
    Cconst = get_settings().constants.C if Cconst is None else Cconst
    if s < 1 or n < 2:
        raise ParameterError("need s >= 1 and n >= 2")
    if M <= 0:
        raise ParameterError(f"Precision constant M must be > 0, got {M}")
    inv_eps2 = 8.0 * Cconst**2 * math.e * (M * math.log(n) + math.log(s))
    return SampleSizeResult(s=s, n=n, M=M, Cconst=Cconst, variant="single-support",
                            k=s * inv_eps2, failure_probability=float(n) ** (-M))


def uniform_failure_bound(n: int, s: int, t: float, Cconst: float | None = None) -> UniformFailureBound:
    """Union bound |S| s exp(-t^2/(2 C^2 e)) over all supports with |T| <= s.

    ``sufficient_condition`` is 2 log s + s log(ne/s) < t^2/(2 C^2 e), under which
    the relaxed bound s^2 (ne/s)^s exp(-t^2/(2 C^2 e)) is below one.
    """
    Cconst = get_settings().constants.C if Cconst is None else Cconst
    if not 1 <= s <= n:
        raise ParameterError(f"need 1 <= s <= n, got s={s}, n={n}")
    count = float(sum(special.comb(n, j, exact=True) for j in range(s + 1)))
    exponent = t * t / (2.0 * Cconst**2 * math.e)
    bound = math.exp(math.log(count) + math.log(s) - exponent)
    condition = 2.0 * math.log(s) + s * math.log(n * math.e / s) < exponent
    return UniformFailureBound(n=n, s=s, t=t, Cconst=Cconst, support_count=count,
                               bound=bound, sufficient_condition=condition)
