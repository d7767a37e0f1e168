from nc_concentration.src.spectral.operators import (
    EigenSystem,
    HermitianMatrix,
    eigh,
    exp_chebyshev_bound,
    expm_hermitian,
    golden_thompson_gap,
    norm_from_singular_values,
    pnorm_via_tail,
    random_hermitian,
    schatten_norm,
    tail_fraction,
    tail_trace,
)

__all__ = [
    "EigenSystem",
    "HermitianMatrix",
    "eigh",
    "exp_chebyshev_bound",
    "expm_hermitian",
    "golden_thompson_gap",
    "norm_from_singular_values",
    "pnorm_via_tail",
    "random_hermitian",
    "schatten_norm",
    "tail_fraction",
    "tail_trace",
]
