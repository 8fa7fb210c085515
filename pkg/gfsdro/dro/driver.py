"""Outer robust-training loop, its projection and the SAA baseline."""

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, List, Literal, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from tqdm import tqdm

from gfsdro.config import get_threads
from gfsdro.data import LabeledDataset
from gfsdro.problem import ParticleCloud, RobustProblem
from gfsdro.samplers import RngStream, SamplerConfig, get_sampler
from gfsdro.samplers.base import label_at
from gfsdro.utils import (
    DimensionMismatchError,
    DivergedTrainingError,
    InvalidArgumentError,
    Vector,
    get_logger,
    project_l2_ball,
)

logger = get_logger(__name__)

# Stream purposes; the slot/step pair is shared, the purpose keeps them apart
SAMPLING_STREAM = 0
ANCHOR_STREAM = 1
INIT_STREAM = 2


@dataclass(frozen=True)
class Projection:
    """Projection onto the feasible parameter set."""

    kind: Literal["identity", "l2-ball"] = "identity"
    radius: Optional[float] = None

    def __call__(self, theta: Vector) -> Vector:
        if self.kind == "identity":
            return theta
        return project_l2_ball(theta, self.radius)


class OuterLoopConfig(BaseModel):
    """Outer SGD schedule: step count or epochs, stepsizes, batching and projection."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    steps: Optional[int] = Field(None, ge=0, description="Outer steps S")
    epochs: Optional[int] = Field(None, ge=0, description="Full passes over the anchors")
    schedule: Literal["constant", "inverse-sqrt"] = "constant"
    stepsize: float = Field(..., ge=0, description="r (constant) or r0 (inverse-sqrt)")
    batch_size: int = Field(1, ge=1, description="Anchors per outer step")
    projection: Literal["identity", "l2-ball"] = "identity"
    radius: Optional[float] = Field(None, gt=0, description="l2-ball radius R")

    @model_validator(mode="after")
    def check_schedule(self):
        if self.steps is None and self.epochs is None:
            raise ValueError("one of steps or epochs is required")
        if self.projection == "l2-ball" and self.radius is None:
            raise ValueError("projection l2-ball needs a radius")
        return self

    def stepsize_at(self, step: int) -> float:
        if self.schedule == "constant":
            return self.stepsize
        return self.stepsize / math.sqrt(step + 1)

    def projector(self) -> Projection:
        return Projection(self.projection, self.radius)

    def steps_per_epoch(self, n: int) -> int:
        return math.ceil(n / self.batch_size)

    def total_steps(self, n: int) -> int:
        if self.steps is not None:
            return self.steps
        return self.epochs * self.steps_per_epoch(n)


@dataclass
class TrainReport:
    """Outcome of one training run; per-step lists all have one entry per outer step."""

    theta: Vector
    theta_init: Vector
    seed: int
    method: str
    grad_norms: List[float] = field(default_factory=list)
    loss_estimates: List[float] = field(default_factory=list)
    thetas: List[Vector] = field(default_factory=list)
    checkpoints: List[Vector] = field(default_factory=list)
    first_epoch_clouds: List[ParticleCloud] = field(default_factory=list)
    wall_clock: float = 0.0

    @property
    def steps(self) -> int:
        return len(self.grad_norms)


def outer_step(
    theta: Vector, gradient: Vector, r: float, projection: Optional[Projection] = None
) -> Vector:
    """theta' = Proj(theta - r * gradient)."""
    theta = np.asarray(theta, dtype=np.float64)
    gradient = np.asarray(gradient, dtype=np.float64)
    if theta.shape != gradient.shape:
        raise DimensionMismatchError("gradient", theta.shape, gradient.shape)
    moved = theta - r * gradient
    return moved if projection is None else projection(moved)


CloudsFn = Callable[
    [Vector, np.ndarray, Optional[Sequence], Sequence[RngStream], Optional[ThreadPoolExecutor]],
    List[ParticleCloud],
]


def _weighted_terms(
    problem: RobustProblem, theta: Vector, cloud: ParticleCloud
) -> Tuple[Vector, float]:
    weights = cloud.weights
    grads = problem.loss.grad_theta(theta, cloud.positions, cloud.label)
    values = problem.loss.value(theta, cloud.positions, cloud.label)
    return weights @ grads, float(weights @ values)


def _batch_gradient(
    problem: RobustProblem,
    theta: Vector,
    anchors: np.ndarray,
    labels: Optional[Sequence],
    clouds_fn: CloudsFn,
    streams: Sequence[RngStream],
    pool: Optional[ThreadPoolExecutor] = None,
) -> Tuple[Vector, float, List[ParticleCloud]]:
    clouds = clouds_fn(theta, anchors, labels, streams, pool)

    # Reduce in index order
    total = np.zeros(problem.loss.n_params)
    loss = 0.0
    for cloud in clouds:
        grad, value = _weighted_terms(problem, theta, cloud)
        total = total + grad
        loss += value
    b = len(anchors)
    return total / b, loss / b, clouds


def _sampler_clouds_fn(problem: RobustProblem, sampler_config: SamplerConfig) -> CloudsFn:
    """Stacking samplers step the whole batch at once; the others fan out over ``pool``."""
    sampler = get_sampler(sampler_config, problem)

    def clouds(theta, anchors, labels, streams, pool=None):
        if sampler.stacks or pool is None or len(anchors) == 1:
            return sampler.run_batch(theta, anchors, labels, streams)

        def one(k: int) -> ParticleCloud:
            return sampler.run(theta, anchors[k], label_at(labels, k), streams[k])

        return list(pool.map(one, range(len(anchors))))

    return clouds


def _anchor_clouds(theta, anchors, labels, streams, pool=None) -> List[ParticleCloud]:
    return [
        ParticleCloud.at_anchor(anchors[k], 1, label_at(labels, k)) for k in range(len(anchors))
    ]


def robust_gradient(
    problem: RobustProblem,
    theta: Vector,
    anchors: np.ndarray,
    sampler_config: SamplerConfig,
    rng: Union[RngStream, np.random.Generator],
    labels: Optional[Sequence] = None,
) -> Vector:
    """
    Batch-averaged worst-case gradient sum_i w_i grad_theta loss(theta, y_i).

    Args:
        problem: Robust problem
        theta: Current parameters
        anchors: (B, d) anchor batch
        sampler_config: Inner sampler configuration
        rng: Stream of the outer step (anchor k uses slot k), or one generator
            shared by every anchor
        labels: Optional labels, one per anchor

    Returns:
        The robust gradient, shape (p,)
    """
    anchors = np.atleast_2d(np.asarray(anchors, dtype=np.float64))
    if anchors.shape[0] < 1:
        raise InvalidArgumentError("Anchor batch must be nonempty")
    clouds_fn = _sampler_clouds_fn(problem, sampler_config)
    if isinstance(rng, RngStream):
        streams = [replace(rng, slot=k) for k in range(anchors.shape[0])]
    else:
        streams = [rng] * anchors.shape[0]
    grad, _, _ = _batch_gradient(problem, theta, anchors, labels, clouds_fn, streams)
    return grad


def anchor_schedule(n: int, outer_config: OuterLoopConfig, seed: int, step: int) -> np.ndarray:
    """Anchor indices of ``step``: epochs cycle through a seeded permutation."""
    per_epoch = outer_config.steps_per_epoch(n)
    epoch, position = divmod(step, per_epoch)
    order = RngStream(seed, step=epoch, purpose=ANCHOR_STREAM).generator().permutation(n)
    b = outer_config.batch_size
    return order[position * b : (position + 1) * b]


def initial_params(problem: RobustProblem, seed: int) -> Vector:
    return problem.loss.init_params(RngStream(seed, purpose=INIT_STREAM).generator())


def run_outer_loop(
    problem: RobustProblem,
    dataset: LabeledDataset,
    outer_config: OuterLoopConfig,
    seed: int,
    gradient_fn: Callable[[Vector, np.ndarray, int], Tuple[Vector, float, List[ParticleCloud]]],
    method: str,
    theta0: Optional[Vector] = None,
    progress: bool = False,
    keep_clouds: bool = False,
    on_epoch: Optional[Callable[[int, Vector], None]] = None,
) -> TrainReport:
    """
    Projected SGD driven by ``gradient_fn(theta, anchor_indices, step)``.

    ``on_epoch(epoch, theta)`` runs before the first step of every epoch.
    """
    if dataset.d != problem.dim:
        raise DimensionMismatchError("dataset features", problem.dim, dataset.d)

    theta = initial_params(problem, seed) if theta0 is None else np.array(theta0, dtype=np.float64)
    report = TrainReport(theta=theta, theta_init=theta.copy(), seed=seed, method=method)
    projection = outer_config.projector()
    per_epoch = outer_config.steps_per_epoch(dataset.n)
    total = outer_config.total_steps(dataset.n)

    logger.info(f"Training {method}: {total} outer steps, {dataset.n} anchors, seed {seed}")
    start = time.perf_counter()
    for step in tqdm(range(total), desc=method, unit="step", disable=not progress):
        epoch = step // per_epoch
        if on_epoch is not None and step % per_epoch == 0:
            on_epoch(epoch, theta)

        indices = anchor_schedule(dataset.n, outer_config, seed, step)
        grad, loss, clouds = gradient_fn(theta, indices, step)
        theta = outer_step(theta, grad, outer_config.stepsize_at(step), projection)
        if not np.all(np.isfinite(theta)):
            raise DivergedTrainingError(step)

        report.grad_norms.append(float(np.linalg.norm(grad)))
        report.loss_estimates.append(loss)
        report.thetas.append(theta.copy())
        if keep_clouds and epoch == 0:
            report.first_epoch_clouds.extend(clouds)
        if (step + 1) % per_epoch == 0:
            report.checkpoints.append(theta.copy())
        logger.debug(f"step {step}: |g|={report.grad_norms[-1]:.4g} loss={loss:.6g}")

    report.theta = theta
    report.wall_clock = time.perf_counter() - start
    logger.info(f"Finished {method} in {report.wall_clock:.2f}s")
    return report


def _train_with_clouds(
    problem: RobustProblem,
    dataset: LabeledDataset,
    outer_config: OuterLoopConfig,
    seed: int,
    clouds_fn: CloudsFn,
    method: str,
    **kwargs,
) -> TrainReport:
    threads = get_threads()
    pool = ThreadPoolExecutor(max_workers=threads) if threads > 0 else None

    def gradient_fn(theta, indices, step):
        anchors = dataset.features[indices]
        labels = None if dataset.labels is None else dataset.labels[indices]
        streams = [
            RngStream(seed, step=step, slot=k, purpose=SAMPLING_STREAM)
            for k in range(len(indices))
        ]
        return _batch_gradient(problem, theta, anchors, labels, clouds_fn, streams, pool)

    try:
        return run_outer_loop(problem, dataset, outer_config, seed, gradient_fn, method, **kwargs)
    finally:
        if pool is not None:
            pool.shutdown()


def train(
    problem: RobustProblem,
    dataset: LabeledDataset,
    sampler_config: SamplerConfig,
    outer_config: OuterLoopConfig,
    seed: int,
    theta0: Optional[Vector] = None,
    progress: bool = False,
    keep_clouds: bool = False,
) -> TrainReport:
    """
    Sampler-based DRO: each outer step samples worst-case clouds at a batch of
    anchors and descends along the weighted particle gradient.

    Args:
        problem: Robust problem
        dataset: Training anchors
        sampler_config: Inner sampler configuration
        outer_config: Outer schedule
        seed: Seed of every random stream of the run
        theta0: Starting parameters; drawn from ``init_params`` when omitted
        progress: Show a progress bar
        keep_clouds: Keep the worst-case clouds of the first epoch

    Returns:
        TrainReport with per-step metrics and per-epoch checkpoints
    """
    clouds_fn = _sampler_clouds_fn(problem, sampler_config)
    return _train_with_clouds(
        problem,
        dataset,
        outer_config,
        seed,
        clouds_fn,
        sampler_config.method,
        theta0=theta0,
        progress=progress,
        keep_clouds=keep_clouds,
    )


def saa_train(
    problem: RobustProblem,
    dataset: LabeledDataset,
    outer_config: OuterLoopConfig,
    seed: int,
    theta0: Optional[Vector] = None,
    progress: bool = False,
) -> TrainReport:
    """Empirical risk minimisation on the same anchor schedule as ``train``."""
    return _train_with_clouds(
        problem,
        dataset,
        outer_config,
        seed,
        _anchor_clouds,
        "saa",
        theta0=theta0,
        progress=progress,
    )
