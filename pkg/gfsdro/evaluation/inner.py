"""Inner-objective tracking and worst-case sample diagnostics."""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, List

import numpy as np

from gfsdro.config import get_threads
from gfsdro.data import LabeledDataset
from gfsdro.problem import ParticleCloud, RobustProblem, tilted_potential
from gfsdro.samplers import RngStream, SamplerConfig, get_sampler
from gfsdro.utils import DimensionMismatchError, InvalidArgumentError, Vector, get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class InnerCurve:
    """E[V] over the anchors, recorded along the inner iterations."""

    iterations: np.ndarray
    values: np.ndarray
    method: str

    def __post_init__(self):
        if self.iterations.shape != self.values.shape:
            raise DimensionMismatchError("curve values", self.iterations.shape, self.values.shape)

    def first_reaching(self, target: float) -> int:
        """First recorded iteration whose E[-V] is at least ``target`` (-1 if never)."""
        hits = np.nonzero(-self.values >= target)[0]
        return int(self.iterations[hits[0]]) if hits.size else -1


def _record_points(T: int, record_every: int) -> List[int]:
    points = list(range(0, T + 1, record_every))
    if points[-1] != T:
        points.append(T)
    return points


def inner_objective_curve(
    problem: RobustProblem,
    theta: Vector,
    dataset: LabeledDataset,
    sampler_config: SamplerConfig,
    record_every: int = 1,
    seed: int = 0,
) -> InnerCurve:
    """
    Run the inner sampler from every anchor and record the weighted mean of
    the tilted potential, averaged over anchors, every ``record_every`` steps
    (the last iteration is always recorded).
    """
    if record_every < 1:
        raise InvalidArgumentError(f"record_every must be >= 1, got {record_every}")
    sampler = get_sampler(sampler_config, problem)
    points = _record_points(sampler_config.T, record_every)
    wanted = set(points)

    def one(k: int) -> np.ndarray:
        anchor = dataset.features[k]
        label = dataset.label(k)
        values = []
        for t, cloud in sampler.trajectory(theta, anchor, label, RngStream(seed, slot=k)):
            if t in wanted:
                v = tilted_potential(problem, theta, anchor, cloud.positions, label)
                values.append(float(cloud.weights @ v))
        return np.asarray(values)

    threads = get_threads()
    if threads > 0:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            per_anchor = list(pool.map(one, range(dataset.n)))
    else:
        per_anchor = [one(k) for k in range(dataset.n)]

    total = np.zeros(len(points))
    for values in per_anchor:
        total = total + values
    curve = InnerCurve(np.asarray(points), total / dataset.n, sampler_config.method)
    logger.debug(f"{curve.method}: E[V] {curve.values[0]:.6g} -> {curve.values[-1]:.6g}")
    return curve


def quadrant_fraction(clouds: Iterable[ParticleCloud]) -> float:
    """Weighted share of worst-case samples with both coordinates > 0."""
    total = 0.0
    count = 0
    for cloud in clouds:
        if cloud.d != 2:
            raise InvalidArgumentError(f"quadrant_fraction needs 2-d samples, got d={cloud.d}")
        inside = (cloud.positions[:, 0] > 0) & (cloud.positions[:, 1] > 0)
        total += float(cloud.weights @ inside)
        count += 1
    if count == 0:
        raise InvalidArgumentError("quadrant_fraction needs at least one cloud")
    return total / count
