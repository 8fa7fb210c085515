"""Wasserstein-Fisher-Rao sampler: Langevin moves plus a multiplicative
weight flow and birth-death resampling of light particles."""

from dataclasses import replace
from typing import Tuple

import numpy as np

from gfsdro.problem import (
    ParticleCloud,
    RobustnessParams,
    normalize_log_weights,
    tilted_potential,
)
from gfsdro.samplers.base import CloudBlock, Sampler
from gfsdro.samplers.langevin import ula_block_move, ula_step
from gfsdro.utils import InvalidConfigError, get_logger

logger = get_logger(__name__)


def _retention(eta_w: float, params: RobustnessParams) -> float:
    exponent = params.epsilon * eta_w / (2.0 * params.tau)
    if exponent >= 1:
        raise InvalidConfigError(
            f"WFR weight exponent epsilon * eta_w / (2 tau) = {exponent:.6g} must be < 1"
        )
    return 1.0 - exponent


def wfr_log_weight_update(
    log_weights: np.ndarray,
    tilted_values: np.ndarray,
    eta_w: float,
    params: RobustnessParams,
) -> np.ndarray:
    """Log-domain weight flow, returned normalized."""
    retention = _retention(eta_w, params)
    with np.errstate(invalid="ignore"):
        # 0 * -inf: a dead particle stays dead
        raw = retention * log_weights - eta_w * np.asarray(tilted_values, dtype=np.float64)
    raw = np.where(np.isneginf(log_weights), -np.inf, raw)
    return normalize_log_weights(raw)


def wfr_weight_update(
    weights: np.ndarray,
    tilted_values: np.ndarray,
    eta_w: float,
    params: RobustnessParams,
) -> np.ndarray:
    """
    One step of the reaction part of the WFR flow.

    Args:
        weights: Current particle weights (need not be normalized)
        tilted_values: Tilted potential at each particle's pre-move position
        eta_w: Weight stepsize
        params: Penalty and entropy weights

    Returns:
        Normalized weights ``w^(1 - eps eta_w / (2 tau)) * exp(-eta_w V)``
    """
    weights = np.asarray(weights, dtype=np.float64)
    with np.errstate(divide="ignore"):
        log_weights = np.log(weights)
    return np.exp(wfr_log_weight_update(log_weights, tilted_values, eta_w, params))


def _replace_light(
    positions: np.ndarray, weights: np.ndarray, w_min: float, rng: np.random.Generator
) -> Tuple[np.ndarray, np.ndarray]:
    positions = positions.copy()
    weights = weights.copy()
    m = weights.shape[0]
    for i in range(m):
        if weights[i] >= w_min:
            continue
        cumulative = np.cumsum(weights)
        u = rng.random() * cumulative[-1]
        donor = min(int(np.searchsorted(cumulative, u, side="right")), m - 1)
        positions[i] = positions[donor]
        shared = 0.5 * (weights[i] + weights[donor])
        weights[i] = shared
        weights[donor] = shared
    with np.errstate(divide="ignore"):
        log_weights = normalize_log_weights(np.log(weights))
    return positions, log_weights


def birth_death(cloud: ParticleCloud, w_min: float, rng: np.random.Generator) -> ParticleCloud:
    """
    Replace every particle lighter than ``w_min`` by a copy of a donor.

    Particles are visited in index order. A donor is drawn with probability
    proportional to the current weights, the light particle moves onto it and
    both take the average of the two weights. One uniform draw is consumed per
    replacement; none when no particle is below the threshold.
    """
    weights = cloud.weights
    if not np.any(weights < w_min):
        return cloud
    positions, log_weights = _replace_light(cloud.positions, weights, w_min, rng)
    logger.debug(f"Birth-death replaced {np.sum(weights < w_min)} of {cloud.m} particles")
    return replace(cloud, positions=positions, log_weights=log_weights)


class WfrSampler(Sampler):
    """WFR particle flow. With eta_w = 0 and w_min = 0 it coincides with ULA."""

    method = "wfr"
    stacks = True

    def step(self, cloud: ParticleCloud, theta, rng, iteration: int) -> ParticleCloud:
        values = tilted_potential(
            self.problem, theta, cloud.anchor, cloud.positions, cloud.label
        )
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
        log_weights = cloud.log_weights
        if self.config.eta_w > 0:
            log_weights = wfr_log_weight_update(
                log_weights, values, self.config.eta_w, self.problem.params
            )
        moved = replace(cloud, positions=positions, log_weights=log_weights)
        return birth_death(moved, self.config.w_min, rng)

    def step_block(self, block: CloudBlock, theta, gens, iteration: int) -> CloudBlock:
        values = tilted_potential(
            self.problem, theta, block.anchors, block.positions, block.labels
        )
        positions = ula_block_move(block, self.problem, theta, self.config.eta, gens, iteration)
        log_weights = block.log_weights
        if self.config.eta_w > 0:
            log_weights = wfr_log_weight_update(
                log_weights, values.reshape(block.b, block.m), self.config.eta_w, self.problem.params
            )

        weights = np.exp(normalize_log_weights(log_weights))
        light = np.nonzero(np.any(weights < self.config.w_min, axis=1))[0]
        if light.size:
            positions = positions.copy()
            log_weights = log_weights.copy()
            for k in light:
                rows = block.rows(k)
                positions[rows], log_weights[k] = _replace_light(
                    positions[rows], weights[k], self.config.w_min, gens[k]
                )
        return replace(block, positions=positions, log_weights=log_weights)
