from nc_concentration.src.ensembles.generators import (
    EnsembleSpec,
    build_ensemble,
    builtin_names,
    builtin_spec,
    draw_coefficients,
    norm_bound_total,
    parse_builtin,
    profile_of,
    resolve_spec,
    sample_eigenvalues,
    sample_matrix,
    sample_sum,
    summand_mean_check,
    term_profile,
)
from nc_concentration.src.ensembles.harness import (
    default_t_grid,
    estimate_pnorm,
    estimate_tail,
    estimate_tails,
    hoeffding_half_width,
    trial_spectra,
    verify_dominance,
)
from nc_concentration.src.ensembles.oracles import (
    catalan_numbers,
    gaussian_pnorm_exact,
    lower_bound_f,
    selector_moment_exact,
)

__all__ = [
    "EnsembleSpec",
    "build_ensemble",
    "builtin_names",
    "builtin_spec",
    "catalan_numbers",
    "default_t_grid",
    "draw_coefficients",
    "estimate_pnorm",
    "estimate_tail",
    "estimate_tails",
    "gaussian_pnorm_exact",
    "hoeffding_half_width",
    "lower_bound_f",
    "norm_bound_total",
    "parse_builtin",
    "profile_of",
    "resolve_spec",
    "sample_eigenvalues",
    "sample_matrix",
    "sample_sum",
    "selector_moment_exact",
    "summand_mean_check",
    "term_profile",
    "trial_spectra",
    "verify_dominance",
]
