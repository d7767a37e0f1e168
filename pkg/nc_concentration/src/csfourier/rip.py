"""Restricted isometry constants of partial-Fourier matrices.

For a row set omega let G = Phi* Phi. Over supports T the Gram G_T is a
principal submatrix of G, and

    Delta_s = inf_{alpha > 0} sup_{|T| <= s} ||alpha G_T - I||
            = (lam_max - lam_min) / (lam_max + lam_min),

attained at alpha* = 2 / (lam_max + lam_min), where lam_max and lam_min are the
extreme eigenvalues over all supports. The sup over alpha G_T - I is the larger
of alpha lam_max - 1 (increasing) and 1 - alpha lam_min (decreasing), which
meet at alpha*.

By eigenvalue interlacing a support's extremes are dominated by those of any
superset, so only supports of size exactly s are enumerated.
"""
from __future__ import annotations

import itertools
import math

import numpy as np
from scipy import special

from nc_concentration.logger import GLOBAL_LOGGER as log
from nc_concentration.exception.custom_exception import BudgetError, DegenerateError, ParameterError
from nc_concentration.model.models import RipResult
from nc_concentration.src.csfourier.dft import DftSystem, OmegaLike, full_gram, omega_indices
from nc_concentration.utils.config_loader import get_settings
from nc_concentration.utils.parallel import ordered_map

_BATCH = 4096


def _check_s(s: int, n: int) -> None:
    if not 1 <= s <= n:
        raise ParameterError(f"Sparsity must satisfy 1 <= s <= n, got s={s}, n={n}")


def _all_supports(n: int, s: int, count: int) -> np.ndarray:
    flat = np.fromiter(
        itertools.chain.from_iterable(itertools.combinations(range(n), s)),
        dtype=np.intp, count=count * s,
    )
    return flat.reshape(count, s)


def _support_spectra(gram: np.ndarray, supports: np.ndarray) -> np.ndarray:
    """Eigenvalues of every G_T, shape (len(supports), s), in support order."""
    out = []
    for start in range(0, supports.shape[0], _BATCH):
        idx = supports[start:start + _BATCH]
        sub = gram[idx[:, :, None], idx[:, None, :]]
        out.append(np.linalg.eigvalsh(sub))
    return np.concatenate(out, axis=0) if out else np.empty((0, supports.shape[1]))


def _extremes(gram: np.ndarray, supports: np.ndarray) -> tuple[float, float]:
    parts = ordered_map(
        lambda block: _support_spectra(gram, supports[block.start:block.stop]),
        supports.shape[0],
    )
    lam_min = min(float(p[:, 0].min()) for p in parts if p.size)
    lam_max = max(float(p[:, -1].max()) for p in parts if p.size)
    return lam_max, lam_min


def _result(s: int, lam_max: float, lam_min: float, examined: int, exact: bool) -> RipResult:
    if lam_max <= 0:
        raise DegenerateError("All support Grams vanish (empty row set); Delta_s is undefined")
    lam_min = max(lam_min, 0.0)
    total = lam_max + lam_min
    return RipResult(
        s=s,
        delta=(lam_max - lam_min) / total,
        alpha_star=2.0 / total,
        lam_max=lam_max,
        lam_min=lam_min,
        supports_examined=examined,
        exact=exact,
    )


def enumeration_size(n: int, s: int) -> int:
    return int(special.comb(n, s, exact=True))


def rip_constant_exact(dft: DftSystem, omega: OmegaLike, s: int, budget: int | None = None) -> RipResult:
    """Delta_s by enumerating every support of size s."""
    _check_s(s, dft.n)
    budget = get_settings().rip.enumeration_budget if budget is None else budget
    count = enumeration_size(dft.n, s)
    if count > budget:
        raise BudgetError(
            f"C({dft.n},{s}) = {count} supports exceeds the enumeration budget {budget}; "
            "use rip_constant_sampled instead"
        )
    if omega_indices(omega, dft.n).size == 0:
        raise DegenerateError("Empty row set; Delta_s is undefined")
    gram = full_gram(dft, omega)
    lam_max, lam_min = _extremes(gram, _all_supports(dft.n, s, count))
    result = _result(s, lam_max, lam_min, count, exact=True)
    log.info("RIP constant enumerated", n=dft.n, s=s, supports=count, delta=result.delta)
    return result


def rip_constant_sampled(
    dft: DftSystem, omega: OmegaLike, s: int, num_supports: int, stream: np.random.Generator,
    budget: int | None = None,
) -> RipResult:
    """Same formula over ``num_supports`` uniform random supports of size s.

    Under-sampling the sup can only shrink lam_max and raise lam_min, so the
    result is a lower estimate of the true Delta_s. Supports are drawn one at a
    time from ``stream``, so a longer run extends a shorter one on the same seed.
    """
    _check_s(s, dft.n)
    budget = get_settings().rip.enumeration_budget if budget is None else budget
    if num_supports < 1:
        raise ParameterError("num_supports must be >= 1")
    if num_supports > budget:
        raise BudgetError(f"{num_supports} sampled supports exceeds the budget {budget}")
    if omega_indices(omega, dft.n).size == 0:
        raise DegenerateError("Empty row set; Delta_s is undefined")
    supports = np.stack([np.sort(stream.choice(dft.n, size=s, replace=False)) for _ in range(num_supports)])
    gram = full_gram(dft, omega)
    lam_max, lam_min = _extremes(gram, supports)
    result = _result(s, lam_max, lam_min, num_supports, exact=False)
    log.warning("RIP constant from sampled supports is a lower estimate",
                n=dft.n, s=s, supports=num_supports, delta=result.delta)
    return result


def rip_sup_deviation(dft: DftSystem, omega: OmegaLike, s: int, alpha: float, budget: int | None = None) -> float:
    """sup over |T| = s of ||alpha G_T - I||, by enumeration."""
    _check_s(s, dft.n)
    if not alpha > 0:
        raise ParameterError(f"alpha must be > 0, got {alpha}")
    budget = get_settings().rip.enumeration_budget if budget is None else budget
    count = enumeration_size(dft.n, s)
    if count > budget:
        raise BudgetError(f"C({dft.n},{s}) = {count} supports exceeds the enumeration budget {budget}")
    gram = full_gram(dft, omega)
    spectra = _support_spectra(gram, _all_supports(dft.n, s, count))
    return float(np.max(np.abs(alpha * spectra - 1.0)))


def candes_tao_gate(dft: DftSystem, omega: OmegaLike, s: int, budget: int | None = None) -> dict:
    """Exact-recovery condition Delta_3s + 3 Delta_4s <= 2."""
    if 4 * s > dft.n:
        raise ParameterError(f"Need 4s <= n to evaluate Delta_4s (s={s}, n={dft.n})")
    d3 = rip_constant_exact(dft, omega, 3 * s, budget).delta
    d4 = rip_constant_exact(dft, omega, 4 * s, budget).delta
    value = d3 + 3.0 * d4
    return {"s": s, "delta_3s": d3, "delta_4s": d4, "value": value, "holds": bool(value <= 2.0)}


def support_count_bound(n: int, s: int) -> float:
    """s (ne/s)^s, the closed-form cap on the number of supports of size <= s."""
    return s * math.exp(s * math.log(n * math.e / s))
