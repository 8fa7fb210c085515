"""Utility objects for the gfsdro package."""

# Expose module
from gfsdro.utils.errors import (
    Error,
    InvalidArgumentError,
    DimensionMismatchError,
    InvalidConfigError,
    DegenerateWeightsError,
    DivergedSamplerError,
    DivergedTrainingError,
    OptimizerFailureError,
    RejectionStallError,
    GenerationError,
    FeatureParseError,
    SpecValidationError,
    DatasetMismatchError,
)
from gfsdro.utils.functions import (
    get_timestamp,
    as_float_array,
    check_last_dim,
    relative_error,
    project_l2_ball,
)
from gfsdro.utils.logging import get_logger, run_log, setup_logging
from gfsdro.utils.types import (
    ErrorList,
    Label,
    LabelInput,
    Labels,
    Matrix,
    PointInput,
    ValidationResult,
    Vector,
)

__all__ = [
    # Errors
    "Error",
    "InvalidArgumentError",
    "DimensionMismatchError",
    "InvalidConfigError",
    "DegenerateWeightsError",
    "DivergedSamplerError",
    "DivergedTrainingError",
    "OptimizerFailureError",
    "RejectionStallError",
    "GenerationError",
    "FeatureParseError",
    "SpecValidationError",
    "DatasetMismatchError",
    # Functions
    "get_timestamp",
    "as_float_array",
    "check_last_dim",
    "relative_error",
    "project_l2_ball",
    "setup_logging",
    "get_logger",
    "run_log",
    # Types
    "ErrorList",
    "Label",
    "LabelInput",
    "Labels",
    "Matrix",
    "PointInput",
    "ValidationResult",
    "Vector",
]
