from nc_concentration.src.bounds.selector_bounds import cs_moment_bound, cs_tail_bound, cs_tail_switch
from nc_concentration.src.bounds.tail_bounds import (
    bennett_tail,
    bernstein_tail,
    chernoff_lambda_opt,
    hoeffding_half_width,
    incomplete_gamma_upper_check,
    phi,
    prohorov_tail,
    regularized_upper_gamma,
    rosenthal_bound,
    rosenthal_layer_cake,
    symmetric_bernstein_tail,
    tail_bounds_at,
    tail_grid,
)

__all__ = [
    "bennett_tail",
    "bernstein_tail",
    "chernoff_lambda_opt",
    "cs_moment_bound",
    "cs_tail_bound",
    "cs_tail_switch",
    "hoeffding_half_width",
    "incomplete_gamma_upper_check",
    "phi",
    "prohorov_tail",
    "regularized_upper_gamma",
    "rosenthal_bound",
    "rosenthal_layer_cake",
    "symmetric_bernstein_tail",
    "tail_bounds_at",
    "tail_grid",
]
