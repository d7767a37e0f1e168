"""Exact sparse recovery from partial Fourier measurements by complex basis pursuit.

    minimize ||f||_1  subject to  Phi f = b

solved with ADMM on the splitting f = z:

    f <- Pi(z - u)                   affine projection onto {Phi f = b}
    z <- shrink(f + u, 1 / rho)      complex soft threshold (phase kept)
    u <- u + f - z

Pi(v) = (I - P Phi) v + P b with P = pinv(Phi), computed once per row set.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from nc_concentration.logger import GLOBAL_LOGGER as log
from nc_concentration.exception.custom_exception import DegenerateError, DimensionError, ParameterError
from nc_concentration.model.models import (
    RecoveryResult,
    RecoverySummary,
    RecoveryTrial,
    SolverParams,
)
from nc_concentration.src.bounds.tail_bounds import hoeffding_half_width
from nc_concentration.src.csfourier.dft import DftSystem, OmegaLike, build_dft, draw_selectors, omega_indices
from nc_concentration.utils.config_loader import get_settings
from nc_concentration.utils.parallel import concat, ordered_map
from nc_concentration.utils.rng import trial_stream


@dataclass(frozen=True)
class BasisPursuitSolution:
    x: np.ndarray
    iterations: int
    converged: bool
    primal_residual: float
    dual_residual: float
    feasibility: float


def default_solver_params() -> SolverParams:
    cfg = get_settings().solver
    return SolverParams(rho=cfg.rho, max_iter=cfg.max_iter, tol_primal=cfg.tol_primal, tol_dual=cfg.tol_dual)


def complex_shrink(v: np.ndarray, threshold: float) -> np.ndarray:
    """Soft threshold on the modulus: max(|v| - threshold, 0) * v / |v|."""
    mag = np.abs(v)
    scale = np.maximum(mag - threshold, 0.0) / np.where(mag > 0, mag, 1.0)
    return v * scale


class AffineProjector:
    """Projection onto {f : Phi f = b}; the pseudoinverse is shared read-only across solves."""

    def __init__(self, phi: np.ndarray):
        self.phi = phi
        self.pinv = np.linalg.pinv(phi)
        self.null = np.eye(phi.shape[1]) - self.pinv @ phi

    def __call__(self, v: np.ndarray, offset: np.ndarray) -> np.ndarray:
        return self.null @ v + offset


def basis_pursuit(
    dft: DftSystem,
    omega: OmegaLike,
    b: np.ndarray,
    params: SolverParams | None = None,
    projector: AffineProjector | None = None,
) -> BasisPursuitSolution:
    """Solve min ||f||_1 s.t. Phi f = b for the rows in ``omega``.

    Stops once ||f - z|| <= tol_primal (1 + max(||f||, ||z||)) and
    rho ||z - z_prev|| <= tol_dual (1 + rho ||u||). Hitting max_iter is not an
    error; the result is flagged ``converged = False`` with its residuals. The
    returned vector is the projected iterate, so it satisfies the constraint to
    rounding error whether or not the loop converged.
    """
    params = params or default_solver_params()
    idx = omega_indices(omega, dft.n)
    if idx.size == 0:
        raise DegenerateError("Basis pursuit needs at least one measurement row")
    b = np.asarray(b, dtype=complex).ravel()
    if b.shape[0] != idx.size:
        raise DimensionError(f"Measurement vector has length {b.shape[0]}, expected {idx.size}")
    proj = projector or AffineProjector(dft.rows(idx))
    offset = proj.pinv @ b

    n = dft.n
    z = np.zeros(n, dtype=complex)
    u = np.zeros(n, dtype=complex)
    f = offset.copy()
    r_norm = s_norm = math.inf
    converged = False
    iteration = 0
    for iteration in range(1, params.max_iter + 1):
        f = proj(z - u, offset)
        z_prev = z
        z = complex_shrink(f + u, 1.0 / params.rho)
        u = u + f - z
        r_norm = float(np.linalg.norm(f - z))
        s_norm = float(params.rho * np.linalg.norm(z - z_prev))
        eps_pri = params.tol_primal * (1.0 + max(np.linalg.norm(f), np.linalg.norm(z)))
        eps_dual = params.tol_dual * (1.0 + params.rho * np.linalg.norm(u))
        if r_norm <= eps_pri and s_norm <= eps_dual:
            converged = True
            break

    feas = float(np.linalg.norm(proj.phi @ f - b))
    if not converged:
        log.warning("Basis pursuit hit max_iter", max_iter=params.max_iter,
                    primal_residual=r_norm, dual_residual=s_norm)
    return BasisPursuitSolution(f, iteration, converged, r_norm, s_norm, feas)


def recover_signal(
    dft: DftSystem,
    omega: OmegaLike,
    f_true: np.ndarray,
    params: SolverParams | None = None,
    exact_threshold: float | None = None,
    projector: AffineProjector | None = None,
) -> RecoveryResult:
    """Measure ``f_true`` on ``omega`` and reconstruct it."""
    exact_threshold = get_settings().solver.exact_threshold if exact_threshold is None else exact_threshold
    idx = omega_indices(omega, dft.n)
    f_true = np.asarray(f_true, dtype=complex)
    b = dft.rows(idx) @ f_true
    sol = basis_pursuit(dft, idx, b, params, projector)
    ref = float(np.linalg.norm(f_true))
    err = float(np.linalg.norm(sol.x - f_true))
    rel = err / ref if ref > 0 else err
    return RecoveryResult(
        f_true=f_true, f_hat=sol.x, residual=sol.feasibility, rel_error=rel,
        iterations=sol.iterations, converged=sol.converged, exact=rel <= exact_threshold,
    )


AMP_LAWS = ("unit", "complex-gaussian")


def _amplitudes(law: str, s: int, stream: np.random.Generator) -> np.ndarray:
    if law == "unit":
        return np.ones(s, dtype=complex)
    if law == "complex-gaussian":
        return (stream.standard_normal(s) + 1j * stream.standard_normal(s)) / math.sqrt(2.0)
    raise ParameterError(f"Unknown amplitude law {law!r}")


def recovery_experiment(
    n: int,
    s: int,
    k: float,
    trials: int,
    seed: int,
    amp_law: Literal["unit", "complex-gaussian"] = "unit",
    omega: Sequence[int] | None = None,
    params: SolverParams | None = None,
    confidence: float | None = None,
    keep_records: bool = True,
) -> RecoverySummary:
    """Success rate of exact recovery of random s-sparse signals.

    Each trial draws a uniform support of size s, amplitudes from ``amp_law``
    and, unless ``omega`` is fixed, a Bernoulli(k/n) row set. An empty row set
    counts as a failure.
    """
    if s < 1:
        raise ParameterError(f"Sparsity must be >= 1, got {s}")
    if s > n:
        raise ParameterError(f"Sparsity {s} exceeds signal length {n}")
    if trials < 1:
        raise ParameterError("trials must be >= 1")
    if amp_law not in AMP_LAWS:
        raise ParameterError(f"Unknown amplitude law {amp_law!r}")
    confidence = get_settings().monte_carlo.confidence if confidence is None else confidence
    params = params or default_solver_params()
    dft = build_dft(n)
    fixed = omega_indices(omega, n) if omega is not None else None
    shared = AffineProjector(dft.rows(fixed)) if fixed is not None and fixed.size else None

    def run(block: range) -> list[RecoveryTrial]:
        out = []
        for trial in block:
            stream = trial_stream(seed, trial)
            support = np.sort(stream.choice(n, size=s, replace=False))
            f_true = np.zeros(n, dtype=complex)
            f_true[support] = _amplitudes(amp_law, s, stream)
            rows = fixed if fixed is not None else draw_selectors(n, k, stream, seed).omega
            if rows.size == 0:
                out.append(RecoveryTrial(trial=trial, support=support.tolist(), omega_size=0,
                                         rel_error=1.0, residual=float(np.linalg.norm(f_true)),
                                         iterations=0, converged=False, exact=False))
                continue
            res = recover_signal(dft, rows, f_true, params, projector=shared)
            out.append(RecoveryTrial(trial=trial, support=support.tolist(), omega_size=int(rows.size),
                                     rel_error=res.rel_error, residual=res.residual,
                                     iterations=res.iterations, converged=res.converged, exact=res.exact))
        return out

    records = concat(ordered_map(run, trials))
    successes = sum(r.exact for r in records)
    frac = successes / trials
    h = hoeffding_half_width(trials, confidence)
    summary = RecoverySummary(
        n=n, s=s, k=k, trials=trials, seed=seed, amp_law=amp_law,
        successes=successes, success_fraction=frac, ci_low=frac - h, ci_high=frac + h,
        confidence=confidence,
        mean_omega_size=float(np.mean([r.omega_size for r in records])),
        records=records if keep_records else [],
    )
    log.info("Recovery experiment finished", n=n, s=s, k=k, trials=trials, success_fraction=frac)
    return summary


def phase_diagram(
    n: int, s: int, k_grid: Sequence[float], trials: int, seed: int,
    amp_law: Literal["unit", "complex-gaussian"] = "unit",
    params: SolverParams | None = None, confidence: float | None = None,
) -> list[RecoverySummary]:
    """Recovery success against expected row count; each k reuses the trial streams of ``seed``."""
    return [
        recovery_experiment(n, s, k, trials, seed, amp_law, params=params, confidence=confidence, keep_records=False)
        for k in k_grid
    ]
