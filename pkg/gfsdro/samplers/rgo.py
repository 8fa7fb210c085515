"""Restricted Gaussian oracle: exact rejection sampling from the conditional
worst-case law when the loss is L-smooth and L * tau < 1.

The target exp(-U) with U(y) = (-2 tau loss(theta, y) + |y - x|^2) / eps is
((2 - 2 tau L) / eps)-strongly convex. Proposals are drawn from
N(y_hat, eps / (2 (1 - L tau)) I) around the minimiser y_hat and accepted with
probability min(1, exp(-U(Z) + U(y_hat) + ((1 - L tau) / eps) |Z - y_hat|^2)).
The factor (1 - L tau) / eps keeps that probability at most one; the clamp is
kept regardless.
"""

from dataclasses import dataclass, replace
from typing import Iterator, Optional, Tuple

import numpy as np

from gfsdro.problem import ParticleCloud, RobustProblem
from gfsdro.samplers.base import Sampler, SamplerConfig, as_generator
from gfsdro.utils import (
    InvalidConfigError,
    OptimizerFailureError,
    RejectionStallError,
    Label,
    Vector,
    get_logger,
)

logger = get_logger(__name__)


@dataclass
class AcceptanceStats:
    trials: int = 0
    accepted: int = 0

    @property
    def rate(self) -> float:
        return self.accepted / self.trials if self.trials else 0.0

    def merge(self, other: "AcceptanceStats") -> "AcceptanceStats":
        return AcceptanceStats(self.trials + other.trials, self.accepted + other.accepted)

    def as_dict(self):
        return {"trials": self.trials, "accepted": self.accepted, "acceptance_rate": self.rate}


def _check_rgo(problem: RobustProblem, config: SamplerConfig) -> float:
    if problem.epsilon <= 0:
        raise InvalidConfigError("RGO needs epsilon > 0")
    slack = 1.0 - config.smoothness_L * problem.tau
    if slack <= 0:
        raise InvalidConfigError(
            f"RGO needs smoothness_L * tau < 1, got {config.smoothness_L * problem.tau:.6g}"
        )
    return slack


def rgo_exponent(problem: RobustProblem, theta: Vector, anchor: Vector, y, label: Label = None):
    """U(y) = (2 tau * (-loss) + |y - anchor|^2) / eps for one point or a batch."""
    loss = problem.loss.value(theta, y, label)
    return (2.0 * problem.tau * (-loss) + problem.cost.value(y, anchor)) / problem.epsilon


def rgo_exponent_grad(problem: RobustProblem, theta: Vector, anchor: Vector, y, label: Label = None):
    grad_loss = problem.loss.grad_input(theta, y, label)
    return (-2.0 * problem.tau * grad_loss + problem.cost.grad(y, anchor)) / problem.epsilon


def minimize_rgo_exponent(
    problem: RobustProblem,
    theta: Vector,
    anchor: Vector,
    config: SamplerConfig,
    label: Label = None,
) -> Vector:
    """
    Gradient descent on U from the anchor with stepsize eps / (2 (1 + L tau)).

    Raises:
        OptimizerFailureError: |grad U| stays above ``rgo_tolerance`` after
            ``rgo_max_iter`` iterations and ``rgo_strict`` is set
    """
    step = problem.epsilon / (2.0 * (1.0 + config.smoothness_L * problem.tau))
    y = np.array(anchor, dtype=np.float64)
    grad_norm = np.inf
    for _ in range(config.rgo_max_iter):
        grad = rgo_exponent_grad(problem, theta, anchor, y, label)
        grad_norm = float(np.linalg.norm(grad))
        if grad_norm <= config.rgo_tolerance:
            return y
        y = y - step * grad

    grad_norm = float(np.linalg.norm(rgo_exponent_grad(problem, theta, anchor, y, label)))
    if grad_norm <= config.rgo_tolerance:
        return y
    if config.rgo_strict:
        raise OptimizerFailureError(config.rgo_max_iter, grad_norm, config.rgo_tolerance)
    logger.warning(
        f"RGO inner minimisation stopped at |grad U| = {grad_norm:.3e}; using last iterate"
    )
    return y


def rgo_sample(
    problem: RobustProblem,
    theta: Vector,
    anchor: Vector,
    config: SamplerConfig,
    rng: np.random.Generator,
    label: Label = None,
    mode: Optional[Vector] = None,
) -> Tuple[Vector, AcceptanceStats]:
    """
    Draw one exact sample of the conditional worst-case law at ``anchor``.

    Args:
        problem: Robust problem (epsilon > 0)
        theta: Model parameters
        anchor: Conditioning data point
        config: Sampler config supplying L and the optimizer/rejection caps
        rng: Random generator
        label: Anchor label, if the loss needs one
        mode: Precomputed minimiser of U; found by gradient descent when omitted

    Returns:
        The accepted point and the trial statistics
    """
    slack = _check_rgo(problem, config)
    anchor = np.asarray(anchor, dtype=np.float64)
    if mode is None:
        mode = minimize_rgo_exponent(problem, theta, anchor, config, label)
    u_mode = rgo_exponent(problem, theta, anchor, mode, label)
    proposal_std = np.sqrt(problem.epsilon / (2.0 * slack))
    quad = slack / problem.epsilon

    stats = AcceptanceStats()
    while stats.trials < config.rgo_max_trials:
        z = mode + proposal_std * rng.standard_normal(mode.shape)
        stats.trials += 1
        diff = z - mode
        log_accept = -rgo_exponent(problem, theta, anchor, z, label) + u_mode + quad * float(diff @ diff)
        if rng.random() < np.exp(min(0.0, log_accept)):
            stats.accepted += 1
            return z, stats
    raise RejectionStallError(stats.trials)


class RgoSampler(Sampler):
    """Exact sampler: m independent rejection runs around one shared minimiser.

    Its trajectory is the anchor cloud at t = 0 and the accepted samples for
    every t >= 1; ``run`` always returns the accepted samples.
    """

    method = "rgo"

    def sample_cloud(self, theta, anchor, label, rng: np.random.Generator) -> ParticleCloud:
        anchor = np.asarray(anchor, dtype=np.float64)
        mode = minimize_rgo_exponent(self.problem, theta, anchor, self.config, label)
        samples = np.empty((self.config.m, anchor.size))
        stats = AcceptanceStats()
        for i in range(self.config.m):
            samples[i], run_stats = rgo_sample(
                self.problem, theta, anchor, self.config, rng, label, mode
            )
            stats = stats.merge(run_stats)
        cloud = ParticleCloud.at_anchor(anchor, self.config.m, label)
        return replace(cloud, positions=samples, stats=stats.as_dict())

    def step(self, cloud: ParticleCloud, theta, rng, iteration: int) -> ParticleCloud:
        return self.sample_cloud(theta, cloud.anchor, cloud.label, rng)

    def trajectory(self, theta, anchor, label, rng) -> Iterator[Tuple[int, ParticleCloud]]:
        gen = as_generator(rng)
        yield 0, ParticleCloud.at_anchor(anchor, self.config.m, label)
        if self.config.T == 0:
            return
        cloud = self.sample_cloud(theta, anchor, label, gen)
        for t in range(1, self.config.T + 1):
            yield t, cloud

    def run(self, theta, anchor, label, rng) -> ParticleCloud:
        return self.sample_cloud(theta, anchor, label, as_generator(rng))
