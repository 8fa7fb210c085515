"""Deterministic dataset generators. Every generator is a pure function of its
parameters and seed."""

from dataclasses import replace
from typing import Sequence

import numpy as np

from gfsdro.data.models import LabeledDataset, UncertainLsInstance
from gfsdro.utils import GenerationError, InvalidArgumentError, get_logger

logger = get_logger(__name__)

CIRCLE_RADIUS = np.sqrt(2.0)
CIRCLE_MARGIN = 1.3
MAX_OVERSAMPLING = 100

DEFAULT_DELTA_GRID = tuple(float(v) for v in range(11))


def gen_biased_circle(n_raw: int = 200, seed: int = 0, biased: bool = True) -> LabeledDataset:
    """
    Gaussian points labelled by the circle of radius sqrt(2).

    Points with radius in (sqrt(2)/1.3, 1.3 sqrt(2)) are rejected so the
    classes are separated by a margin. The biased (training) version also
    rejects the first quadrant.

    Args:
        n_raw: Number of accepted points
        seed: Generator seed
        biased: Remove the first quadrant

    Returns:
        Dataset with labels in {-1, +1}

    Raises:
        GenerationError: More than 100 n_raw draws were needed
    """
    if n_raw < 1:
        raise InvalidArgumentError(f"n_raw must be >= 1, got {n_raw}")
    rng = np.random.default_rng(seed)
    accepted = []
    n_accepted = 0
    n_drawn = 0
    budget = MAX_OVERSAMPLING * n_raw

    while n_accepted < n_raw:
        if n_drawn >= budget:
            raise GenerationError(
                f"Biased circle: only {n_accepted} of {n_raw} points accepted after {n_drawn} draws"
            )
        batch = rng.standard_normal((min(2 * (n_raw - n_accepted) + 16, budget - n_drawn), 2))
        n_drawn += batch.shape[0]
        radius = np.linalg.norm(batch, axis=1)
        keep = (radius <= CIRCLE_RADIUS / CIRCLE_MARGIN) | (radius >= CIRCLE_RADIUS * CIRCLE_MARGIN)
        if biased:
            keep &= ~((batch[:, 0] > 0) & (batch[:, 1] > 0))
        batch = batch[keep][: n_raw - n_accepted]
        accepted.append(batch)
        n_accepted += batch.shape[0]

    features = np.concatenate(accepted, axis=0)
    labels = np.sign(np.linalg.norm(features, axis=1) - CIRCLE_RADIUS).astype(np.int64)
    logger.debug(f"Biased circle: {n_raw} points from {n_drawn} draws")
    return LabeledDataset(
        features=features,
        labels=labels,
        name="biased-circle" if biased else "circle",
        params={"n_raw": n_raw, "biased": biased},
        seed=seed,
    )


def gen_two_moons(
    n: int = 200,
    noise_sigma: float = 0.1,
    positive_fraction: float = 0.9,
    seed: int = 0,
) -> LabeledDataset:
    """Two interleaved half circles; the upper moon is the positive class (label 1)."""
    if n < 2:
        raise InvalidArgumentError(f"n must be >= 2, got {n}")
    if not 0 < positive_fraction < 1:
        raise InvalidArgumentError(f"positive_fraction must be in (0, 1), got {positive_fraction}")
    if noise_sigma < 0:
        raise InvalidArgumentError(f"noise_sigma must be >= 0, got {noise_sigma}")

    rng = np.random.default_rng(seed)
    n_pos = int(round(n * positive_fraction))
    n_neg = n - n_pos

    t_pos = rng.uniform(0.0, np.pi, size=n_pos)
    t_neg = rng.uniform(0.0, np.pi, size=n_neg)
    upper = np.column_stack([np.cos(t_pos), np.sin(t_pos)])
    lower = np.column_stack([1.0 - np.cos(t_neg), 0.5 - np.sin(t_neg)])

    features = np.concatenate([upper, lower], axis=0)
    if noise_sigma > 0:
        features = features + noise_sigma * rng.standard_normal(features.shape)
    labels = np.concatenate([np.ones(n_pos, dtype=np.int64), np.zeros(n_neg, dtype=np.int64)])

    return LabeledDataset(
        features=features,
        labels=labels,
        name="two-moons",
        params={
            "n": n,
            "noise_sigma": noise_sigma,
            "positive_fraction": positive_fraction,
            "classes": 2,
        },
        seed=seed,
    )


def gen_uncertain_ls(
    seed: int = 0,
    n_train: int = 10,
    dim: int = 10,
    delta_grid: Sequence[float] = DEFAULT_DELTA_GRID,
) -> UncertainLsInstance:
    """A0, A1, b with i.i.d. N(0, 1) entries and n_train draws xi ~ U[-0.5, 0.5]."""
    if n_train < 1 or dim < 1:
        raise InvalidArgumentError("n_train and dim must be >= 1")
    rng = np.random.default_rng(seed)
    A0 = rng.standard_normal((dim, dim))
    A1 = rng.standard_normal((dim, dim))
    b = rng.standard_normal(dim)
    train_xi = rng.uniform(-0.5, 0.5, size=n_train)
    return UncertainLsInstance(
        A0=A0,
        A1=A1,
        b=b,
        train_xi=train_xi,
        delta_grid=np.asarray(delta_grid, dtype=np.float64),
        seed=seed,
    )


def gen_synthetic_features(
    n: int,
    d: int,
    classes: int,
    margin: float,
    seed: int = 0,
    noise: float = 1.0,
) -> LabeledDataset:
    """
    Gaussian class clouds around scaled simplex vertices.

    Class c has mean (margin / sqrt(2)) e_c, so every pair of means is exactly
    ``margin`` apart. Class sizes differ by at most one.

    Each class takes its own coordinate axis, so ``d`` must be at least
    ``classes``.

    Raises:
        InvalidArgumentError: ``classes < 2``, ``d < classes`` or ``n < 1``
    """
    if classes < 2:
        raise InvalidArgumentError(f"classes must be >= 2, got {classes}")
    if d < classes:
        raise InvalidArgumentError(f"d must be >= classes ({classes}), got {d}")
    if n < 1:
        raise InvalidArgumentError(f"n must be >= 1, got {n}")

    rng = np.random.default_rng(seed)
    labels = rng.permutation(np.arange(n) % classes).astype(np.int64)
    means = np.zeros((classes, d))
    means[np.arange(classes), np.arange(classes)] = margin / np.sqrt(2.0)
    features = means[labels] + noise * rng.standard_normal((n, d))

    return LabeledDataset(
        features=features,
        labels=labels,
        name="synthetic-features",
        params={"n": n, "d": d, "classes": classes, "margin": margin, "noise": noise},
        seed=seed,
    )


def split_dataset(dataset: LabeledDataset, test_fraction: float, seed: int = 0):
    """Deterministic shuffled split into (train, test)."""
    if not 0 < test_fraction < 1:
        raise InvalidArgumentError(f"test_fraction must be in (0, 1), got {test_fraction}")
    n_test = int(round(dataset.n * test_fraction))
    if n_test < 1 or n_test >= dataset.n:
        raise InvalidArgumentError(
            f"Cannot split {dataset.n} rows with test_fraction={test_fraction}"
        )
    order = np.random.default_rng(seed).permutation(dataset.n)
    return dataset.subset(np.sort(order[n_test:])), dataset.subset(np.sort(order[:n_test]))


def to_binary_labels(dataset: LabeledDataset) -> LabeledDataset:
    """Map +-1 labels to {0, 1}; datasets already in {0, 1} pass through."""
    if dataset.labels is None:
        raise InvalidArgumentError(f"Dataset '{dataset.name}' has no labels")
    values = set(np.unique(dataset.labels).tolist())
    if values <= {0, 1}:
        return dataset
    if not values <= {-1, 1}:
        raise InvalidArgumentError(f"Labels {sorted(values)} are not binary")
    labels = (dataset.labels > 0).astype(np.int64)
    return replace(dataset, labels=labels, params={**dataset.params, "classes": 2})
