"""Seamless-L0 penalized quantile regression."""

from ._seloqr import (
    BicScore,
    ContractError,
    DataError,
    FitResult,
    NumericalError,
    SelectionResult,
    __version__,
    check_loss,
    coordinate_min,
    estimate_f0,
    fit,
    generate,
    ks_distance,
    objective,
    penalty_derivative,
    penalty_value,
    select,
)

__all__ = [
    "BicScore",
    "ContractError",
    "DataError",
    "FitResult",
    "NumericalError",
    "SelectionResult",
    "__version__",
    "check_loss",
    "coordinate_min",
    "estimate_f0",
    "fit",
    "generate",
    "ks_distance",
    "objective",
    "penalty_derivative",
    "penalty_value",
    "select",
]
