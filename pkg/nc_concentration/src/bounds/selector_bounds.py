"""Moment and tail bounds for sums of selector-weighted matrices.

``Cconst`` is the absolute constant the inequalities leave unspecified. It is a
parameter here (default from settings) and never treated as known.
"""
from __future__ import annotations

import math

from nc_concentration.exception.custom_exception import ParameterError, PreconditionError
from nc_concentration.model.models import SelectorParams


def cs_moment_bound(sel: SelectorParams, p: float) -> float:
    """C * max(sqrt(2 p r / k), p r / k).

    The sqrt(2) under the root comes from the symmetrization step of the proof,
    which turns the selector sum into a Rademacher sum at twice the variance.
    """
    p = float(p)
    if math.isnan(p) or p < 2.5:
        raise ParameterError(f"Selector moment bound needs p >= 2.5, got {p}")
    ratio = p * sel.r / sel.k
    return sel.Cconst * max(math.sqrt(2.0 * ratio), ratio)


def cs_tail_switch(eps: float, Cconst: float) -> float:
    """Threshold t = C / eps where the Gaussian and exponential branches meet."""
    return Cconst / eps


def cs_tail_bound(t: float, eps: float, Cconst: float, trace_of_1: float = 1.0) -> float:
    """tau(1) exp(-t^2/(2 C^2 e)) while t eps <= C, else tau(1) exp(-t/(2 C e eps)).

    Valid only for t^2 >= 2.5 C^2 e and t >= 2.5 C e eps; outside that region a
    PreconditionError names the failing hypothesis.
    """
    t, eps, Cconst = float(t), float(eps), float(Cconst)
    if not eps > 0:
        raise ParameterError(f"eps must be > 0, got {eps}")
    if not Cconst > 0:
        raise ParameterError(f"C must be > 0, got {Cconst}")
    if not trace_of_1 > 0:
        raise ParameterError(f"trace_of_1 must be > 0, got {trace_of_1}")
    e = math.e
    if t * t < 2.5 * Cconst**2 * e:
        raise PreconditionError(
            f"t^2 = {t * t:.6g} is below 2.5 C^2 e = {2.5 * Cconst**2 * e:.6g}",
            hypothesis="t^2 >= 2.5*C^2*e",
        )
    if t < 2.5 * Cconst * e * eps:
        raise PreconditionError(
            f"t = {t:.6g} is below 2.5 C e eps = {2.5 * Cconst * e * eps:.6g}",
            hypothesis="t >= 2.5*C*e*eps",
        )
    if t * eps <= Cconst:
        return trace_of_1 * math.exp(-(t * t) / (2.0 * Cconst**2 * e))
    return trace_of_1 * math.exp(-t / (2.0 * Cconst * e * eps))
