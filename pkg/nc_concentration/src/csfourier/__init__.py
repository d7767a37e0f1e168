from nc_concentration.src.csfourier.dft import (
    DftSystem,
    SelectorDraw,
    build_dft,
    deviation_norm,
    draw_selectors,
    estimate_invertibility_tail,
    full_gram,
    gram_on_support,
    sample_size_for_invertibility,
    sample_size_for_rip,
    uniform_failure_bound,
)
from nc_concentration.src.csfourier.recovery import (
    BasisPursuitSolution,
    basis_pursuit,
    complex_shrink,
    phase_diagram,
    recover_signal,
    recovery_experiment,
)
from nc_concentration.src.csfourier.rip import (
    candes_tao_gate,
    rip_constant_exact,
    rip_constant_sampled,
    rip_sup_deviation,
    support_count_bound,
)

__all__ = [
    "BasisPursuitSolution",
    "DftSystem",
    "SelectorDraw",
    "basis_pursuit",
    "build_dft",
    "candes_tao_gate",
    "complex_shrink",
    "deviation_norm",
    "draw_selectors",
    "estimate_invertibility_tail",
    "full_gram",
    "gram_on_support",
    "phase_diagram",
    "recover_signal",
    "recovery_experiment",
    "rip_constant_exact",
    "rip_constant_sampled",
    "rip_sup_deviation",
    "sample_size_for_invertibility",
    "sample_size_for_rip",
    "support_count_bound",
    "uniform_failure_bound",
]
