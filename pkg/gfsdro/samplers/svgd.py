"""Stein variational gradient descent on the conditional worst-case law."""

from dataclasses import dataclass, replace
from typing import Literal, Tuple, Union

import numpy as np
from scipy.spatial.distance import pdist

from gfsdro.problem import ParticleCloud, RobustProblem, tilted_gradient
from gfsdro.samplers.base import Sampler
from gfsdro.utils import DivergedSamplerError, InvalidConfigError, Vector


@dataclass(frozen=True)
class RbfKernel:
    """k(a, b) = exp(-|a - b|^2 / h).

    ``bandwidth="median"`` recomputes h = med^2 / log(m + 1) from the current
    pairwise distances; a single particle or coincident particles fall back to h = 1.
    """

    bandwidth: Union[Literal["median"], float] = "median"

    def bandwidth_for(self, positions: np.ndarray) -> float:
        if self.bandwidth != "median":
            return float(self.bandwidth)
        m = positions.shape[0]
        if m < 2:
            return 1.0
        med = float(np.median(pdist(positions)))
        h = med * med / np.log(m + 1.0)
        if not np.isfinite(h) or h <= 1e-12:
            return 1.0
        return h

    def gram(self, positions: np.ndarray) -> Tuple[np.ndarray, float]:
        h = self.bandwidth_for(positions)
        diffs = positions[:, None, :] - positions[None, :, :]
        sq = np.sum(diffs * diffs, axis=-1)
        return np.exp(-sq / h), h


def svgd_step(
    cloud: ParticleCloud,
    problem: RobustProblem,
    theta: Vector,
    kernel: RbfKernel,
    eta: float,
    iteration: int = None,
) -> ParticleCloud:
    """
    Move every particle by eta * phi_i with

        phi_i = 1/m sum_j [ -k(y_i, y_j) (2 tau / eps) grad V(y_j) + grad_2 k(y_i, y_j) ]

    where grad_2 k(y_i, y_j) = 2 (y_i - y_j) / h * k(y_i, y_j). Weights are untouched.
    """
    if problem.epsilon <= 0:
        raise InvalidConfigError("SVGD needs epsilon > 0: the score scale 2*tau/epsilon is undefined")

    y = cloud.positions
    grads = tilted_gradient(problem, theta, cloud.anchor, y, cloud.label)
    if not np.all(np.isfinite(grads)):
        raise DivergedSamplerError("svgd", iteration)

    scale = 2.0 * problem.tau / problem.epsilon
    drive = -(scale * grads)
    K, h = kernel.gram(y)
    diffs = y[:, None, :] - y[None, :, :]
    repulsion = (2.0 / h) * np.einsum("ij,ijd->id", K, diffs)
    phi = (K @ drive + repulsion) / cloud.m
    return replace(cloud, positions=y + eta * phi)


class SvgdSampler(Sampler):
    method = "svgd"

    def __init__(self, config, problem):
        super().__init__(config, problem)
        self.kernel = RbfKernel(config.kernel_bandwidth)

    def initialize(self, theta, anchor, label, rng) -> ParticleCloud:
        cloud = ParticleCloud.at_anchor(anchor, self.config.m, label)
        noise = self.config.sigma_init * rng.standard_normal(cloud.positions.shape)
        return replace(cloud, positions=cloud.positions + noise)

    def step(self, cloud: ParticleCloud, theta, rng, iteration: int) -> ParticleCloud:
        return svgd_step(cloud, self.problem, theta, self.kernel, self.config.eta, iteration)
