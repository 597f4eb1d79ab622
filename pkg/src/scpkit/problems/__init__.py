from .base import SampledOracle
from .sparse_regression import (
    SparseRegressionData,
    SparseRegressionOracle,
    fit_coefficients,
    selection_layout,
    sparse_reg_gradient,
    sparse_reg_value,
    sparse_reg_value_and_gradient,
)
from .sskp import (
    SskpData,
    SskpOracle,
    brute_force_optimum,
    knapsack_layout,
    sskp_cost_gradient,
    sskp_cost_value,
    sskp_full_objective,
    sskp_linear_reformulation,
)
from .svm import SvmData, SvmRiskOracle, accuracy, svm_layout, svm_risk_subgradient, svm_risk_value

__all__ = [
    "SampledOracle",
    "SparseRegressionData",
    "SparseRegressionOracle",
    "fit_coefficients",
    "selection_layout",
    "sparse_reg_gradient",
    "sparse_reg_value",
    "sparse_reg_value_and_gradient",
    "SskpData",
    "SskpOracle",
    "brute_force_optimum",
    "knapsack_layout",
    "sskp_cost_gradient",
    "sskp_cost_value",
    "sskp_full_objective",
    "sskp_linear_reformulation",
    "SvmData",
    "SvmRiskOracle",
    "accuracy",
    "svm_layout",
    "svm_risk_subgradient",
    "svm_risk_value",
]
