from nc_concentration.src.ldp.rate import (
    ScalarLaw,
    check_mixture_bound,
    default_search,
    fenchel_legendre,
    gaussian_log_mgf,
    ldp_upper_bound,
    mixture_log_mgf,
    mixture_log_mgf_gap,
    mixture_tail_rate,
    parse_law,
    rate_curve,
)
from nc_concentration.src.ldp.semicircle import (
    semicircle_log_mgf,
    semicircle_mgf,
    semicircle_mgf_quadrature,
    semicircle_moment,
    semicircle_sf,
)

__all__ = [
    "ScalarLaw",
    "check_mixture_bound",
    "default_search",
    "fenchel_legendre",
    "gaussian_log_mgf",
    "ldp_upper_bound",
    "mixture_log_mgf",
    "mixture_log_mgf_gap",
    "mixture_tail_rate",
    "parse_law",
    "rate_curve",
    "semicircle_log_mgf",
    "semicircle_mgf",
    "semicircle_mgf_quadrature",
    "semicircle_moment",
    "semicircle_sf",
]
