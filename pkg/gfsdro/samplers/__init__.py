"""Inner worst-case samplers.

Every sampler approximates the conditional worst-case law
exp(-(2 tau / eps) V(y)) of one anchor with a weighted particle cloud.
"""

# Expose module
from gfsdro.samplers.base import (
    SamplerConfig,
    SamplerSettings,
    SamplerMethod,
    RngStream,
    CloudBlock,
    Sampler,
    as_generator,
    get_sampler,
    sample_worst_case,
)
from gfsdro.samplers.langevin import LangevinSampler, WrmSampler, ula_block_move, ula_step, wrm_step
from gfsdro.samplers.wfr import (
    WfrSampler,
    birth_death,
    wfr_log_weight_update,
    wfr_weight_update,
)
from gfsdro.samplers.svgd import RbfKernel, SvgdSampler, svgd_step
from gfsdro.samplers.rgo import (
    AcceptanceStats,
    RgoSampler,
    minimize_rgo_exponent,
    rgo_exponent,
    rgo_sample,
)

__all__ = [
    "SamplerConfig",
    "SamplerSettings",
    "SamplerMethod",
    "RngStream",
    "CloudBlock",
    "Sampler",
    "as_generator",
    "get_sampler",
    "sample_worst_case",
    "LangevinSampler",
    "WrmSampler",
    "ula_block_move",
    "ula_step",
    "wrm_step",
    "WfrSampler",
    "birth_death",
    "wfr_log_weight_update",
    "wfr_weight_update",
    "RbfKernel",
    "SvgdSampler",
    "svgd_step",
    "AcceptanceStats",
    "RgoSampler",
    "minimize_rgo_exponent",
    "rgo_exponent",
    "rgo_sample",
]
