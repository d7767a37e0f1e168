from nc_concentration.exception.custom_exception import (
    BudgetError,
    ConcentrationError,
    DegenerateError,
    DimensionError,
    DomainError,
    DominanceViolation,
    FitError,
    InputError,
    ParameterError,
    PreconditionError,
    UsageError,
    WindowError,
)

__all__ = [
    "BudgetError",
    "ConcentrationError",
    "DegenerateError",
    "DimensionError",
    "DomainError",
    "DominanceViolation",
    "FitError",
    "InputError",
    "ParameterError",
    "PreconditionError",
    "UsageError",
    "WindowError",
]
