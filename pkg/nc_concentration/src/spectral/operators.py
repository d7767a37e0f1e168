"""Trace calculus on d x d Hermitian matrices under the normalized trace tau = tr / d."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Union

import numpy as np

from nc_concentration.exception.custom_exception import (
    DimensionError,
    DomainError,
    InputError,
    ParameterError,
)
from nc_concentration.utils.config_loader import get_settings


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class HermitianMatrix:
    """Self-adjoint d x d complex matrix.

    Build through :meth:`from_array`, which symmetrizes to ``(A + A*)/2`` and
    records the Frobenius asymmetry of the input it was given.
    """

    data: np.ndarray
    asymmetry: float = 0.0

    @classmethod
    def from_array(cls, a, *, tol: float | None = None) -> "HermitianMatrix":
        settings = get_settings().spectral
        tol = settings.symmetry_tol if tol is None else tol
        try:
            arr = np.asarray(a, dtype=complex)
        except (TypeError, ValueError) as e:
            raise InputError("Matrix entries must be numeric", e) from e
        if arr.ndim == 0:
            arr = arr.reshape(1, 1)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
            raise DimensionError(f"Expected a non-empty square matrix, got shape {arr.shape}")
        if arr.shape[0] > settings.max_dim:
            raise DimensionError(f"Dimension {arr.shape[0]} exceeds the supported maximum {settings.max_dim}")
        if not np.all(np.isfinite(arr)):
            raise InputError("Matrix has non-finite entries")

        asym = float(np.linalg.norm(arr - arr.conj().T, ord="fro"))
        scale = float(np.linalg.norm(arr, ord=2))
        if asym > tol * scale:
            raise InputError(f"Matrix is not Hermitian: asymmetry {asym:.3e} exceeds {tol:.1e} x norm {scale:.3e}")
        return cls(_readonly(0.5 * (arr + arr.conj().T)), asym)

    @classmethod
    def diag(cls, values) -> "HermitianMatrix":
        values = np.asarray(values, dtype=float).ravel()
        return cls.from_array(np.diag(values))

    @classmethod
    def identity(cls, dim: int) -> "HermitianMatrix":
        return cls.from_array(np.eye(dim))

    @classmethod
    def zeros(cls, dim: int) -> "HermitianMatrix":
        return cls.from_array(np.zeros((dim, dim)))

    @property
    def dim(self) -> int:
        return int(self.data.shape[0])

    def __add__(self, other: "HermitianMatrix") -> "HermitianMatrix":
        _same_dim(self, other)
        return HermitianMatrix.from_array(self.data + other.data)

    def scaled(self, c: float) -> "HermitianMatrix":
        return HermitianMatrix.from_array(float(c) * self.data)

    def normalized_trace(self) -> float:
        return float(np.trace(self.data).real) / self.dim


@dataclass(frozen=True)
class EigenSystem:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


MatrixLike = Union[HermitianMatrix, np.ndarray]


def _same_dim(a: HermitianMatrix, b: HermitianMatrix) -> None:
    if a.dim != b.dim:
        raise DimensionError(f"Dimension mismatch: {a.dim} vs {b.dim}")


def eigh(a: HermitianMatrix) -> EigenSystem:
    """Eigenvalues ascending, eigenvectors as unitary columns."""
    if not np.all(np.isfinite(a.data)):
        raise InputError("Matrix has non-finite entries")
    w, v = np.linalg.eigh(a.data)
    return EigenSystem(_readonly(w), _readonly(v))


def tail_fraction(eigenvalues: np.ndarray, t: float) -> float:
    """Fraction of eigenvalues >= t; ties at t count in."""
    eigenvalues = np.asarray(eigenvalues)
    return float(np.count_nonzero(eigenvalues >= t)) / eigenvalues.shape[-1]


def tail_trace(a: HermitianMatrix, t: float) -> float:
    """tau(1_[t, inf)(a)): normalized count of eigenvalues at or above t."""
    return tail_fraction(np.linalg.eigvalsh(a.data), t)


def _check_p(p: float) -> None:
    if math.isnan(p) or p < 1:
        raise ParameterError(f"Schatten exponent must satisfy p >= 1, got {p}")


def norm_from_singular_values(s: np.ndarray, p: float, dim: int, normalized: bool = True) -> float:
    _check_p(p)
    s = np.abs(np.asarray(s, dtype=float))
    top = float(s.max()) if s.size else 0.0
    if math.isinf(p):
        return top
    if top == 0.0:
        return 0.0
    # factor out the largest value so large p cannot overflow
    total = float(np.sum((s / top) ** p))
    if normalized:
        total /= dim
    return top * total ** (1.0 / p)


def schatten_norm(a: MatrixLike, p: float, normalized: bool = True) -> float:
    """Schatten p-norm; ``normalized`` divides the trace by the dimension, p = inf is the operator norm."""
    _check_p(p)
    if isinstance(a, HermitianMatrix):
        s = np.abs(np.linalg.eigvalsh(a.data))
        dim = a.dim
    else:
        arr = np.asarray(a, dtype=complex)
        if arr.ndim != 2:
            raise DimensionError(f"Expected a matrix, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise InputError("Matrix has non-finite entries")
        s = np.linalg.svd(arr, compute_uv=False)
        dim = arr.shape[1]
    return norm_from_singular_values(s, p, dim, normalized)


def pnorm_via_tail(
    a: HermitianMatrix,
    p: float,
    quad_points: int | None = None,
    method: Literal["exact", "quadrature"] = "exact",
) -> float:
    """Layer-cake value p * int_0^inf t^(p-1) tau(1_(t, inf)(a)) dt for positive ``a``.

    The tail is a step function with jumps at the sorted eigenvalues, so the
    ``exact`` method sums the closed-form integral of p t^(p-1) over each step.
    ``quadrature`` integrates each step with Gauss-Legendre nodes instead.
    """
    _check_p(p)
    if math.isinf(p):
        raise ParameterError("The layer-cake formula needs a finite exponent")
    w = np.linalg.eigvalsh(a.data)
    tol = get_settings().spectral.psd_tol
    if w[0] < -tol:
        raise DomainError(f"Matrix is not positive semidefinite: smallest eigenvalue {w[0]:.3e}")
    w = np.clip(w, 0.0, None)
    d = w.shape[0]
    lo = np.concatenate(([0.0], w[:-1]))
    hi = w
    # on (w[i-1], w[i]) exactly d - i eigenvalues exceed t
    weights = (d - np.arange(d)) / d

    if method == "exact":
        return float(np.sum(weights * (hi**p - lo**p)))
    if method != "quadrature":
        raise ParameterError(f"Unknown method {method!r}")
    n_nodes = quad_points or max(2, int(math.ceil(p / 2)) + 1)
    if n_nodes < 1:
        raise ParameterError("quad_points must be positive")
    x, wq = np.polynomial.legendre.leggauss(n_nodes)
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    t = mid[:, None] + half[:, None] * x[None, :]
    seg = half * np.sum(wq[None, :] * p * t ** (p - 1), axis=1)
    return float(np.sum(weights * seg))


def expm_hermitian(a: HermitianMatrix) -> HermitianMatrix:
    """e^a through the eigendecomposition."""
    es = eigh(a)
    v = es.eigenvectors
    return HermitianMatrix.from_array((v * np.exp(es.eigenvalues)) @ v.conj().T)


def normalized_trace_exp(a: HermitianMatrix) -> float:
    return float(np.mean(np.exp(np.linalg.eigvalsh(a.data))))


def golden_thompson_gap(a: HermitianMatrix, b: HermitianMatrix) -> tuple[float, float]:
    """(tau(e^(a+b)), tau(e^(a/2) e^b e^(a/2)))."""
    _same_dim(a, b)
    lhs = normalized_trace_exp(a + b)
    half = expm_hermitian(a.scaled(0.5)).data
    rhs_mat = half @ expm_hermitian(b).data @ half
    rhs = float(np.trace(rhs_mat).real) / a.dim
    return lhs, rhs


def exp_chebyshev_bound(a: HermitianMatrix, t: float) -> float:
    """e^(-t) tau(e^a), an upper bound on tail_trace(a, t)."""
    return float(np.mean(np.exp(np.linalg.eigvalsh(a.data) - t)))


def random_hermitian(dim: int, stream: np.random.Generator, scale: float = 1.0) -> HermitianMatrix:
    """GUE-type sample with entries of order ``scale / sqrt(dim)``."""
    g = stream.standard_normal((dim, dim)) + 1j * stream.standard_normal((dim, dim))
    return HermitianMatrix.from_array(scale * (g + g.conj().T) / (2.0 * math.sqrt(2.0 * dim)))
