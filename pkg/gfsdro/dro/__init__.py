"""Outer training loops: sampler-based DRO, SAA and the nested-MC dual baseline."""

# Expose module
from gfsdro.dro.driver import (
    OuterLoopConfig,
    Projection,
    TrainReport,
    anchor_schedule,
    initial_params,
    outer_step,
    robust_gradient,
    run_outer_loop,
    saa_train,
    train,
)
from gfsdro.dro.dual import DualConfig, dual_objective_estimate, dual_train, search_dual_tau

__all__ = [
    "OuterLoopConfig",
    "Projection",
    "TrainReport",
    "anchor_schedule",
    "initial_params",
    "outer_step",
    "robust_gradient",
    "run_outer_loop",
    "saa_train",
    "train",
    "DualConfig",
    "dual_objective_estimate",
    "dual_train",
    "search_dual_tau",
]
