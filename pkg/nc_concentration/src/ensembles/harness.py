"""Monte Carlo estimates of the averaged spectral tail and of Schatten moments.

The tail probability of a self-adjoint random matrix X is tau(1_[t, inf)(X)) with
tau = E (x) tr/d, i.e. the expected fraction of eigenvalues at or above t. Each
trial contributes a number in [0, 1], so a two-sided Hoeffding interval applies.

Trial i uses the stream keyed by (seed, i). Trials are spread over a thread pool
and reassembled in index order, which makes every estimate bit-identical to the
sequential computation.
"""
from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from nc_concentration.logger import GLOBAL_LOGGER as log
from nc_concentration.exception.custom_exception import DominanceViolation, ParameterError
from nc_concentration.model.models import (
    DominanceRecord,
    DominanceReport,
    MomentEstimate,
    TailEstimate,
)
from nc_concentration.src.bounds.tail_bounds import hoeffding_half_width, tail_bounds_at
from nc_concentration.src.ensembles.generators import profile_of, resolve_spec, sample_eigenvalues
from nc_concentration.src.spectral.operators import norm_from_singular_values
from nc_concentration.utils.config_loader import get_settings
from nc_concentration.utils.parallel import ordered_map
from nc_concentration.utils.rng import trial_stream

BOUND_TOLERANCE = 1e-12


def _check_trials(trials: int) -> None:
    minimum = get_settings().monte_carlo.min_trials
    if trials < minimum:
        raise ParameterError(f"Need at least {minimum} trials, got {trials}")


def trial_spectra(spec, trials: int, seed: int) -> np.ndarray:
    """Eigenvalues of every trial's sum, shape (trials, dim), rows in trial order."""
    spec = resolve_spec(spec)

    def run(block: range) -> np.ndarray:
        return np.stack([sample_eigenvalues(spec, trial_stream(seed, i)) for i in block])

    return np.concatenate(ordered_map(run, trials), axis=0)


def _tail_from_spectra(spectra: np.ndarray, t: float, trials: int, seed: int, confidence: float) -> TailEstimate:
    fractions = np.count_nonzero(spectra >= t, axis=1) / spectra.shape[1]
    mean = float(np.mean(fractions))
    h = hoeffding_half_width(trials, confidence)
    return TailEstimate(t=float(t), mean=mean, ci_low=mean - h, ci_high=mean + h,
                        trials=trials, seed=seed, confidence=confidence)


def estimate_tails(spec, t_grid: Sequence[float], trials: int, seed: int,
                   confidence: float | None = None) -> list[TailEstimate]:
    """Tail estimates on a grid of t, all from the same draws."""
    _check_trials(trials)
    confidence = get_settings().monte_carlo.confidence if confidence is None else confidence
    spectra = trial_spectra(spec, trials, seed)
    return [_tail_from_spectra(spectra, t, trials, seed, confidence) for t in t_grid]


def estimate_tail(spec, t: float, trials: int, seed: int, confidence: float | None = None) -> TailEstimate:
    return estimate_tails(spec, [t], trials, seed, confidence)[0]


def estimate_pnorm(spec, p: float, trials: int, seed: int) -> MomentEstimate:
    """(E ||X||_p^p)^(1/p) under the normalized Schatten norm, with a delta-method standard error.

    For p = inf the value is the largest operator norm seen over the trials.
    """
    p = float(p)
    if math.isnan(p) or p < 1:
        raise ParameterError(f"Moment order must satisfy p >= 1, got {p}")
    _check_trials(trials)
    spectra = trial_spectra(spec, trials, seed)
    dim = spectra.shape[1]
    norms = np.array([norm_from_singular_values(row, p, dim) for row in spectra])
    top = float(np.max(norms))
    if math.isinf(p) or top == 0.0:
        return MomentEstimate(p=p, value=top, stderr=0.0, trials=trials, seed=seed)
    # scale by the largest norm so the p-th powers stay finite
    scaled = (norms / top) ** p
    m = float(np.mean(scaled))
    value = top * m ** (1.0 / p)
    sd = float(np.std(scaled, ddof=1)) if trials > 1 else 0.0
    stderr = top * (1.0 / p) * m ** (1.0 / p - 1.0) * sd / math.sqrt(trials)
    return MomentEstimate(p=p, value=value, stderr=stderr, trials=trials, seed=seed)


def verify_dominance(
    spec,
    t_grid: Sequence[float],
    trials: int,
    seed: int,
    confidence: float | None = None,
    raise_on_violation: bool = False,
) -> DominanceReport:
    """Compare the empirical tail with the Bennett, Bernstein and Prohorov bounds at profile_of(spec).

    A point passes when the lower confidence limit does not exceed any bound.
    """
    spec = resolve_spec(spec)
    confidence = get_settings().monte_carlo.confidence if confidence is None else confidence
    profile = profile_of(spec)
    estimates = estimate_tails(spec, t_grid, trials, seed, confidence)

    records: list[DominanceRecord] = []
    violations: list[tuple[float, str]] = []
    for est in estimates:
        bounds = tail_bounds_at(profile, est.t)
        failed = [kind for kind, value in bounds.items() if est.ci_low > value + BOUND_TOLERANCE]
        violations.extend((est.t, kind) for kind in failed)
        records.append(DominanceRecord(t=est.t, empirical=est.mean, ci_low=est.ci_low,
                                       ci_high=est.ci_high, bounds=bounds, passed=not failed))

    report = DominanceReport(profile=profile, trials=trials, seed=seed, confidence=confidence,
                             records=records, passed=not violations, violations=violations)
    log.info("Dominance verified", ensemble=spec.name or spec.kind.value, points=len(records),
             trials=trials, passed=report.passed, violations=len(violations))
    if violations and raise_on_violation:
        log.error("Empirical tail exceeds a closed-form bound", violations=violations)
        raise DominanceViolation(
            "Empirical tail exceeds closed-form bound at " + ", ".join(f"t={t:g} ({k})" for t, k in violations),
            violations=violations,
        )
    return report


def default_t_grid(spec, points: int = 8) -> list[float]:
    """``points`` evenly spaced t in (0, 3 sqrt(S) + R], where the bounds are informative."""
    profile = profile_of(resolve_spec(spec))
    top = 3.0 * math.sqrt(profile.S) + profile.R
    return [top * (i + 1) / points for i in range(points)]
