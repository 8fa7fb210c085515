# Expose module
from gfsdro.losses.base import (
    LossOracle,
    LossFamily,
    GradCheckReport,
    finite_diff_check,
    get_loss_oracle,
)
from gfsdro.losses.mlp import MlpArchitecture, MlpBceLoss
from gfsdro.losses.softmax import SoftmaxLogisticLoss
from gfsdro.losses.least_squares import UncertainLeastSquaresLoss
from gfsdro.losses.linear import LinearLoss

__all__ = [
    "LossOracle",
    "LossFamily",
    "GradCheckReport",
    "finite_diff_check",
    "get_loss_oracle",
    "MlpArchitecture",
    "MlpBceLoss",
    "SoftmaxLogisticLoss",
    "UncertainLeastSquaresLoss",
    "LinearLoss",
]
