"""Problem definition shared by every sampler.

Types:
    RobustnessParams: (tau, epsilon) of the penalized objective
    CostFunction: squared Euclidean transport cost
    RobustProblem: loss oracle + cost + params
    ParticleCloud: weighted particles anchored at a data point

Functions:
    tilted_potential: the tilted potential V of an anchor
    tilted_gradient: its gradient in the evaluation point
    normalize_weights: project a cloud's weights onto the simplex
"""

# Expose module
from gfsdro.problem.base import (
    RobustnessParams,
    CostFunction,
    RobustProblem,
    ParticleCloud,
    tilted_potential,
    tilted_gradient,
    normalize_weights,
    normalize_log_weights,
)

__all__ = [
    "RobustnessParams",
    "CostFunction",
    "RobustProblem",
    "ParticleCloud",
    "tilted_potential",
    "tilted_gradient",
    "normalize_weights",
    "normalize_log_weights",
]
