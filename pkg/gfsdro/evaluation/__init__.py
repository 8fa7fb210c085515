# Expose module
from gfsdro.evaluation.attacks import (
    AttackConfig,
    mean_test_loss,
    misclassification_rate,
    pgd_attack_l2,
    reference_norm,
    robustness_curve,
)
from gfsdro.evaluation.inner import InnerCurve, inner_objective_curve, quadrant_fraction

__all__ = [
    "AttackConfig",
    "mean_test_loss",
    "misclassification_rate",
    "pgd_attack_l2",
    "reference_norm",
    "robustness_curve",
    "InnerCurve",
    "inner_objective_curve",
    "quadrant_fraction",
]
