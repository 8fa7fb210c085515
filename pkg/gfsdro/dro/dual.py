"""Dual baseline: nested Monte Carlo estimate of the entropic dual objective

    inf_{tau' > 0}  r / (2 tau') + (eps / (2 tau')) E_x log E_{y ~ N(x, eps/2 I)} exp(2 tau' loss(theta, y) / eps)

The plug-in log of an inner sample mean is biased downward; no correction is
applied.
"""

from typing import Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.optimize import minimize_scalar
from scipy.special import logsumexp, softmax

from gfsdro.data import LabeledDataset
from gfsdro.dro.driver import OuterLoopConfig, TrainReport, run_outer_loop
from gfsdro.problem import RobustProblem
from gfsdro.samplers import RngStream
from gfsdro.utils import InvalidArgumentError, InvalidConfigError, Vector, get_logger

logger = get_logger(__name__)

DUAL_SEARCH_STREAM = 3
DUAL_STEP_STREAM = 4


class DualConfig(BaseModel):
    """Nested-MC sizes and the search range of the dual variable"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    radius_r: float = Field(..., ge=0, description="Transport budget r")
    n_inner: int = Field(32, ge=2, description="Inner kernel draws per anchor")
    n_outer: Optional[int] = Field(
        None, ge=1, description="Outer anchor draws (None: each anchor once)"
    )
    dual_tau_min: float = Field(1e-3, gt=0)
    dual_tau_max: float = Field(1e2, gt=0)
    dual_grid: int = Field(9, ge=3, description="Log-grid points bracketing the search")

    @model_validator(mode="after")
    def check_range(self):
        if self.dual_tau_min >= self.dual_tau_max:
            raise ValueError("dual_tau_min must be < dual_tau_max")
        return self


def dual_objective_estimate(
    problem: RobustProblem,
    theta: Vector,
    anchors: np.ndarray,
    dual_tau: float,
    radius_r: float,
    n_inner: int,
    rng: np.random.Generator,
    labels: Optional[Sequence] = None,
    n_outer: Optional[int] = None,
) -> Tuple[float, Vector]:
    """
    Nested Monte Carlo value and theta-gradient of the dual objective.

    Args:
        problem: Robust problem (epsilon > 0)
        theta: Model parameters
        anchors: (N, d) data points
        dual_tau: Dual variable tau' > 0
        radius_r: Transport budget r
        n_inner: Kernel draws per outer sample (>= 2)
        rng: Random generator; reuse a fresh one per call for common random numbers
        labels: Optional labels, one per anchor
        n_outer: Outer draws with replacement; each anchor once when omitted

    Returns:
        (value, gradient) where the gradient softmax-weights the inner
        per-draw gradients
    """
    if n_inner < 2:
        raise InvalidConfigError(f"n_inner must be >= 2, got {n_inner}")
    if dual_tau <= 0:
        raise InvalidArgumentError(f"dual_tau must be > 0, got {dual_tau}")
    eps = problem.epsilon
    if eps <= 0:
        raise InvalidConfigError("The dual estimator needs epsilon > 0")

    anchors = np.atleast_2d(np.asarray(anchors, dtype=np.float64))
    if n_outer is None:
        outer = np.arange(anchors.shape[0])
    else:
        outer = rng.integers(0, anchors.shape[0], size=n_outer)

    kernel_std = np.sqrt(eps / 2.0)
    log_means = np.empty(outer.size)
    grad = np.zeros(problem.loss.n_params)
    for k, index in enumerate(outer):
        label = None if labels is None else labels[index]
        draws = anchors[index] + kernel_std * rng.standard_normal((n_inner, anchors.shape[1]))
        scaled = (2.0 * dual_tau / eps) * problem.loss.value(theta, draws, label)
        log_means[k] = logsumexp(scaled) - np.log(n_inner)
        grad = grad + softmax(scaled) @ problem.loss.grad_theta(theta, draws, label)

    value = radius_r / (2.0 * dual_tau) + (eps / (2.0 * dual_tau)) * float(np.mean(log_means))
    return value, grad / outer.size


def search_dual_tau(
    problem: RobustProblem,
    theta: Vector,
    dataset: LabeledDataset,
    dual_config: DualConfig,
    stream: RngStream,
) -> Tuple[float, float]:
    """
    Minimise the estimated dual objective over tau'.

    A log grid locates the best bracket, then golden-section search refines
    log tau' inside it. Every evaluation reuses the same draws.

    Returns:
        (tau', estimated value)
    """

    def objective(log_tau: float) -> float:
        value, _ = dual_objective_estimate(
            problem,
            theta,
            dataset.features,
            float(np.exp(log_tau)),
            dual_config.radius_r,
            dual_config.n_inner,
            stream.generator(),
            dataset.labels,
            dual_config.n_outer,
        )
        return value

    grid = np.linspace(
        np.log(dual_config.dual_tau_min), np.log(dual_config.dual_tau_max), dual_config.dual_grid
    )
    values = np.array([objective(g) for g in grid])
    best = int(np.argmin(values))
    best_log, best_value = float(grid[best]), float(values[best])

    if 0 < best < grid.size - 1 and values[best] < min(values[best - 1], values[best + 1]):
        result = minimize_scalar(
            objective,
            bracket=(grid[best - 1], grid[best], grid[best + 1]),
            method="golden",
            options={"xtol": 1e-3},
        )
        if result.fun < best_value:
            best_log, best_value = float(result.x), float(result.fun)

    logger.debug(f"Dual search: tau'={np.exp(best_log):.4g}, value={best_value:.6g}")
    return float(np.exp(best_log)), best_value


def dual_train(
    problem: RobustProblem,
    dataset: LabeledDataset,
    outer_config: OuterLoopConfig,
    dual_config: DualConfig,
    seed: int,
    theta0: Optional[Vector] = None,
    progress: bool = False,
) -> TrainReport:
    """SGD on theta along the nested-MC dual gradient; tau' is re-optimised every epoch."""
    state = {"tau": dual_config.dual_tau_max}

    def on_epoch(epoch: int, theta: Vector) -> None:
        stream = RngStream(seed, step=epoch, purpose=DUAL_SEARCH_STREAM)
        state["tau"], _ = search_dual_tau(problem, theta, dataset, dual_config, stream)
        logger.info(f"Epoch {epoch}: dual variable tau' = {state['tau']:.4g}")

    def gradient_fn(theta, indices, step):
        labels = None if dataset.labels is None else dataset.labels[indices]
        value, grad = dual_objective_estimate(
            problem,
            theta,
            dataset.features[indices],
            state["tau"],
            dual_config.radius_r,
            dual_config.n_inner,
            RngStream(seed, step=step, purpose=DUAL_STEP_STREAM).generator(),
            labels,
        )
        return grad, value, []

    return run_outer_loop(
        problem,
        dataset,
        outer_config,
        seed,
        gradient_fn,
        "dual",
        theta0=theta0,
        progress=progress,
        on_epoch=on_epoch,
    )
