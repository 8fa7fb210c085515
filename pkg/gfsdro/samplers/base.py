from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Iterator, List, Literal, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, model_validator

from gfsdro.problem import ParticleCloud, RobustnessParams, RobustProblem
from gfsdro.utils import (
    DivergedSamplerError,
    InvalidArgumentError,
    InvalidConfigError,
    Label,
    Vector,
    get_logger,
)

logger = get_logger(__name__)

SamplerMethod = Literal["wgf-ula", "wfr", "svgd", "rgo", "wrm"]


class SamplerSettings(BaseModel):
    """Inner sampler hyperparameters shared by every method"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    eta: float = Field(..., gt=0, description="Inner stepsize")
    T: int = Field(..., ge=0, description="Inner iteration count")
    m: int = Field(1, ge=1, description="Particle count")
    eta_w: float = Field(0.0, ge=0, description="WFR weight stepsize")
    w_min: float = Field(0.0, ge=0, description="WFR birth-death threshold")
    sigma_init: float = Field(0.1, ge=0, description="SVGD initial standard deviation")
    smoothness_L: float = Field(0.0, ge=0, description="RGO smoothness constant L")
    kernel_bandwidth: Union[Literal["median"], PositiveFloat] = Field(
        "median", description="SVGD RBF bandwidth policy"
    )
    rgo_max_trials: int = Field(100_000, gt=0, description="RGO rejection cap per sample")
    rgo_tolerance: float = Field(1e-8, gt=0, description="RGO inner |grad U| tolerance")
    rgo_max_iter: int = Field(10_000, gt=0, description="RGO inner descent iterations")
    rgo_strict: bool = Field(
        True, description="Raise when the RGO inner minimisation misses its tolerance"
    )

    @model_validator(mode="after")
    def threshold_fits_simplex(self):
        if self.w_min > 1.0 / self.m:
            raise ValueError(f"w_min must be <= 1/m = {1.0 / self.m:.6g}")
        return self


class SamplerConfig(SamplerSettings):
    """Hyperparameters plus the method they drive"""

    method: SamplerMethod = Field(..., description="Inner sampler")

    @classmethod
    def from_settings(cls, method: SamplerMethod, settings: SamplerSettings) -> "SamplerConfig":
        return cls(method=method, **settings.model_dump())

    def problems(self, params: RobustnessParams) -> List[str]:
        """Constraints that depend on (tau, epsilon), as readable messages."""
        messages = []
        if self.method == "svgd" and params.epsilon <= 0:
            messages.append(
                "sampler.method=svgd needs params.epsilon > 0 "
                "(score scale 2*tau/epsilon is undefined)"
            )
        if self.method == "rgo" and params.epsilon <= 0:
            messages.append("sampler.method=rgo needs params.epsilon > 0")
        if self.method == "rgo" and self.smoothness_L * params.tau >= 1:
            messages.append(
                "sampler.smoothness_L * params.tau must be < 1 for rgo "
                f"(got {self.smoothness_L * params.tau:.6g})"
            )
        if self.method == "wfr" and params.epsilon * self.eta_w / (2 * params.tau) >= 1:
            messages.append(
                "params.epsilon * sampler.eta_w / (2 * params.tau) must be < 1 for wfr"
            )
        return messages

    def check(self, params: RobustnessParams) -> None:
        messages = self.problems(params)
        if messages:
            raise InvalidConfigError("; ".join(messages))


@dataclass(frozen=True)
class RngStream:
    """Counter-based random stream keyed on (seed, outer step, slot).

    Identical keys give identical draws, so runs are reproducible regardless
    of how anchors are scheduled across workers.
    """

    seed: int
    step: int = 0
    slot: int = 0
    purpose: int = 0

    def generator(self) -> np.random.Generator:
        sequence = np.random.SeedSequence(
            self.seed, spawn_key=(self.step, self.slot, self.purpose)
        )
        return np.random.Generator(np.random.Philox(sequence))


def as_generator(rng: Union[RngStream, np.random.Generator]) -> np.random.Generator:
    if isinstance(rng, RngStream):
        return rng.generator()
    return rng


def label_at(labels: Optional[Sequence], k: int) -> Label:
    return None if labels is None else labels[k]


@dataclass(frozen=True)
class CloudBlock:
    """The clouds of B anchors stacked row-wise.

    Anchor k owns rows ``k*m .. (k+1)*m - 1`` of ``positions``, ``anchors``
    and ``labels``; ``log_weights`` is ``(B, m)``, one normalized row per anchor.
    """

    positions: np.ndarray
    log_weights: np.ndarray
    anchors: np.ndarray
    labels: Optional[np.ndarray]
    origins: np.ndarray
    origin_labels: Optional[Sequence] = None

    @classmethod
    def at_anchors(
        cls, anchors: np.ndarray, m: int, labels: Optional[Sequence] = None
    ) -> "CloudBlock":
        anchors = np.asarray(anchors, dtype=np.float64)
        rows = np.repeat(anchors, m, axis=0)
        return cls(
            positions=rows.copy(),
            log_weights=np.full((anchors.shape[0], m), -np.log(m)),
            anchors=rows,
            labels=None if labels is None else np.repeat(np.asarray(labels), m),
            origins=anchors,
            origin_labels=labels,
        )

    @property
    def b(self) -> int:
        return self.log_weights.shape[0]

    @property
    def m(self) -> int:
        return self.log_weights.shape[1]

    def rows(self, k: int) -> slice:
        return slice(k * self.m, (k + 1) * self.m)

    def noise(self, gens: Sequence[np.random.Generator]) -> np.ndarray:
        """Standard normal draws, anchor k's rows from ``gens[k]``."""
        d = self.positions.shape[1]
        return np.concatenate([gen.standard_normal((self.m, d)) for gen in gens])

    def clouds(self) -> List[ParticleCloud]:
        return [
            ParticleCloud(
                self.positions[self.rows(k)].copy(),
                self.log_weights[k].copy(),
                self.origins[k].copy(),
                label_at(self.origin_labels, k),
            )
            for k in range(self.b)
        ]


class Sampler(ABC):
    """Abstract base class for worst-case distribution samplers.

    A sampler runs ``config.T`` inner iterations for one anchor and returns
    the final cloud. Subclasses implement ``step``; initialization defaults
    to m copies of the anchor.

    Example:
        ```python
        sampler = get_sampler(config, problem)
        cloud = sampler.run(theta, anchor, label, RngStream(seed=0))
        ```
    """

    method: str = ""
    stacks: bool = False

    def __init__(self, config: SamplerConfig, problem: RobustProblem):
        if config.method != self.method:
            raise InvalidArgumentError(
                f"{type(self).__name__} cannot run method '{config.method}'"
            )
        config.check(problem.params)
        self.config = config
        self.problem = problem

    def initialize(
        self, theta: Vector, anchor: Vector, label: Label, rng: np.random.Generator
    ) -> ParticleCloud:
        return ParticleCloud.at_anchor(anchor, self.config.m, label)

    @abstractmethod
    def step(
        self,
        cloud: ParticleCloud,
        theta: Vector,
        rng: np.random.Generator,
        iteration: int,
    ) -> ParticleCloud:
        pass

    def trajectory(
        self,
        theta: Vector,
        anchor: Vector,
        label: Label,
        rng: Union[RngStream, np.random.Generator],
    ) -> Iterator[Tuple[int, ParticleCloud]]:
        """Yield ``(t, cloud)`` for t = 0..T."""
        gen = as_generator(rng)
        cloud = self.initialize(theta, np.asarray(anchor, dtype=np.float64), label, gen)
        yield 0, cloud
        for t in range(self.config.T):
            cloud = self.step(cloud, theta, gen, t)
            if not np.all(np.isfinite(cloud.positions)):
                raise DivergedSamplerError(self.method, t)
            yield t + 1, cloud

    def run(
        self,
        theta: Vector,
        anchor: Vector,
        label: Label,
        rng: Union[RngStream, np.random.Generator],
    ) -> ParticleCloud:
        cloud = None
        for _, cloud in self.trajectory(theta, anchor, label, rng):
            pass
        return cloud

    def step_block(
        self,
        block: CloudBlock,
        theta: Vector,
        gens: Sequence[np.random.Generator],
        iteration: int,
    ) -> CloudBlock:
        raise NotImplementedError(f"{type(self).__name__} steps one anchor at a time")

    def run_batch(
        self,
        theta: Vector,
        anchors: np.ndarray,
        labels: Optional[Sequence],
        streams: Sequence[Union[RngStream, np.random.Generator]],
    ) -> List[ParticleCloud]:
        """
        Final clouds for a batch of anchors, anchor k drawing from ``streams[k]``.

        Samplers with ``stacks = True`` advance every anchor in one array
        per iteration; with per-anchor streams the clouds equal those of
        ``run``. A generator shared by all anchors is consumed step by step
        instead of anchor by anchor.
        """
        anchors = np.atleast_2d(np.asarray(anchors, dtype=np.float64))
        if not self.stacks:
            return [
                self.run(theta, anchors[k], label_at(labels, k), streams[k])
                for k in range(anchors.shape[0])
            ]
        gens = [as_generator(stream) for stream in streams]
        block = CloudBlock.at_anchors(anchors, self.config.m, labels)
        for t in range(self.config.T):
            block = self.step_block(block, theta, gens, t)
            if not np.all(np.isfinite(block.positions)):
                raise DivergedSamplerError(self.method, t)
        return block.clouds()


def get_sampler(config: SamplerConfig, problem: RobustProblem) -> Sampler:
    """
    Get the sampler for the configured method.

    Args:
        config: Sampler hyperparameters, including the method name
        problem: Robust problem defining the inner target

    Returns:
        An instance of the requested sampler
    """
    # Conditional imports to avoid circular import
    if config.method == "wgf-ula":
        from gfsdro.samplers.langevin import LangevinSampler

        return LangevinSampler(config, problem)
    elif config.method == "wrm":
        from gfsdro.samplers.langevin import WrmSampler

        return WrmSampler(config, problem)
    elif config.method == "wfr":
        from gfsdro.samplers.wfr import WfrSampler

        return WfrSampler(config, problem)
    elif config.method == "svgd":
        from gfsdro.samplers.svgd import SvgdSampler

        return SvgdSampler(config, problem)
    elif config.method == "rgo":
        from gfsdro.samplers.rgo import RgoSampler

        return RgoSampler(config, problem)
    else:
        raise InvalidArgumentError(f"Unknown sampler method: {config.method}")


def sample_worst_case(
    problem: RobustProblem,
    theta: Vector,
    anchor: Vector,
    config: SamplerConfig,
    rng: Union[RngStream, np.random.Generator],
    label: Label = None,
) -> ParticleCloud:
    """Run the configured sampler from its initialization and return the last cloud."""
    return get_sampler(config, problem).run(theta, anchor, label, rng)
