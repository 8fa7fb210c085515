"""Gradient-flow samplers for worst-case distributions in entropic Wasserstein DRO."""

__version__ = "0.1.0"

from gfsdro.config import Config, config

# Expose specific common objects
from gfsdro.problem import ParticleCloud, RobustnessParams, RobustProblem  # noqa: E402
from gfsdro.losses import get_loss_oracle  # noqa: E402
from gfsdro.samplers import RngStream, SamplerConfig, get_sampler, sample_worst_case  # noqa: E402

__all__ = [
    "Config",
    "config",
    "ParticleCloud",
    "RobustnessParams",
    "RobustProblem",
    "get_loss_oracle",
    "RngStream",
    "SamplerConfig",
    "get_sampler",
    "sample_worst_case",
]
