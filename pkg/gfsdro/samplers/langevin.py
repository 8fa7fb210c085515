"""Unadjusted Langevin sampler and its deterministic (epsilon = 0) limit."""

from dataclasses import replace
from typing import Optional, Sequence

import numpy as np

from gfsdro.problem import ParticleCloud, RobustProblem, tilted_gradient
from gfsdro.samplers.base import CloudBlock, Sampler
from gfsdro.utils import DivergedSamplerError, Label, Vector


def wrm_step(
    y: np.ndarray,
    problem: RobustProblem,
    theta: Vector,
    anchor: Vector,
    eta: float,
    label: Label = None,
    iteration: Optional[int] = None,
) -> np.ndarray:
    """Deterministic descent on the tilted potential: y - eta * grad V(y)."""
    grad = tilted_gradient(problem, theta, anchor, y, label)
    if not np.all(np.isfinite(grad)):
        raise DivergedSamplerError("wrm", iteration)
    return y - eta * grad


def ula_step(
    y: np.ndarray,
    problem: RobustProblem,
    theta: Vector,
    anchor: Vector,
    eta: float,
    rng: np.random.Generator,
    label: Label = None,
    iteration: Optional[int] = None,
) -> np.ndarray:
    """
    One Langevin step y - eta * grad V(y) + sqrt(eta * eps / tau) * xi.

    With epsilon = 0 no noise is drawn and the result is exactly ``wrm_step``.
    """
    y_next = wrm_step(y, problem, theta, anchor, eta, label, iteration)
    noise_scale = np.sqrt(eta * problem.epsilon / problem.tau)
    if noise_scale > 0:
        y_next = y_next + noise_scale * rng.standard_normal(np.shape(y))
    return y_next


def ula_block_move(
    block: CloudBlock,
    problem: RobustProblem,
    theta: Vector,
    eta: float,
    gens: Sequence[np.random.Generator],
    iteration: Optional[int] = None,
) -> np.ndarray:
    """``ula_step`` applied to every anchor of ``block``; anchor k's noise comes from ``gens[k]``."""
    positions = wrm_step(block.positions, problem, theta, block.anchors, eta, block.labels, iteration)
    noise_scale = np.sqrt(eta * problem.epsilon / problem.tau)
    if noise_scale > 0:
        positions = positions + noise_scale * block.noise(gens)
    return positions


class LangevinSampler(Sampler):
    """Wasserstein gradient flow sampler (ULA), particles start at the anchor."""

    method = "wgf-ula"
    stacks = True

    def step(self, cloud: ParticleCloud, theta, rng, iteration: int) -> ParticleCloud:
        positions = ula_step(
            cloud.positions,
            self.problem,
            theta,
            cloud.anchor,
            self.config.eta,
            rng,
            cloud.label,
            iteration,
        )
        return replace(cloud, positions=positions)

    def step_block(self, block: CloudBlock, theta, gens, iteration: int) -> CloudBlock:
        positions = ula_block_move(block, self.problem, theta, self.config.eta, gens, iteration)
        return replace(block, positions=positions)


class WrmSampler(Sampler):
    method = "wrm"
    stacks = True

    def step(self, cloud: ParticleCloud, theta, rng, iteration: int) -> ParticleCloud:
        positions = wrm_step(
            cloud.positions,
            self.problem,
            theta,
            cloud.anchor,
            self.config.eta,
            cloud.label,
            iteration,
        )
        return replace(cloud, positions=positions)

    def step_block(self, block: CloudBlock, theta, gens, iteration: int) -> CloudBlock:
        positions = wrm_step(
            block.positions,
            self.problem,
            theta,
            block.anchors,
            self.config.eta,
            block.labels,
            iteration,
        )
        return replace(block, positions=positions)
