"""Experiment orchestration behind the gfsdro command line."""

from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple, Union

import numpy as np
import pandas as pd

from gfsdro.config import OUTPUT_DIR
from gfsdro.data import (
    LabeledDataset,
    gen_biased_circle,
    gen_synthetic_features,
    gen_two_moons,
    gen_uncertain_ls,
    load_features,
    split_dataset,
    to_binary_labels,
)
from gfsdro.dro import TrainReport, dual_train, saa_train, train
from gfsdro.evaluation import (
    inner_objective_curve,
    mean_test_loss,
    misclassification_rate,
    quadrant_fraction,
    robustness_curve,
)
from gfsdro.harness import (
    ExperimentSpec,
    RunArtifact,
    same_data,
    serialize_spec,
    write_artifact,
    write_checkpoints,
    write_table,
)
from gfsdro.losses import (
    GradCheckReport,
    LinearLoss,
    LossOracle,
    MlpBceLoss,
    SoftmaxLogisticLoss,
    finite_diff_check,
)
from gfsdro.problem import CostFunction, RobustnessParams, RobustProblem
from gfsdro.samplers import RngStream, SamplerConfig, get_sampler
from gfsdro.utils import DatasetMismatchError, InvalidArgumentError, get_logger, run_log

# Get logger
logger = get_logger(__name__)

# Test sets are drawn from seed + TEST_SEED_OFFSET
TEST_SEED_OFFSET = 10_000
TEST_STREAM = 5

# Column that identifies a row, and the metric compared across methods
COMPARISON_COLUMNS = {
    "biased-circle": ("accuracy.csv", "epoch", "test_accuracy"),
    "two-moons": ("accuracy.csv", "epoch", "test_accuracy"),
    "inner-objective": ("inner_objective.csv", "iteration", "mean_tilted_potential"),
    "feature-robustness": ("robustness_curve.csv", "delta", "error_rate"),
    "uncertain-ls": ("robustness_curve.csv", "delta", "test_loss"),
    "sampler-oracle": ("sampler_oracle.csv", "coordinate", "empirical_mean"),
}


def resolve_output_dir(spec: ExperimentSpec, output_dir: Optional[Path] = None) -> Path:
    if output_dir is not None:
        return Path(output_dir)
    if spec.output_dir is not None:
        return Path(spec.output_dir)
    return OUTPUT_DIR / f"{spec.experiment}-{spec.label}-seed{spec.seed}"


def _classification_cost() -> CostFunction:
    return CostFunction(kind="squared-euclidean-with-fixed-label")


def _train_method(
    spec: ExperimentSpec,
    problem: RobustProblem,
    dataset: LabeledDataset,
    keep_clouds: bool = False,
    progress: bool = False,
) -> TrainReport:
    if spec.method == "saa":
        return saa_train(problem, dataset, spec.outer, spec.seed, progress=progress)
    if spec.method == "dual":
        return dual_train(problem, dataset, spec.outer, spec.dual, spec.seed, progress=progress)
    return train(
        problem,
        dataset,
        spec.sampler_config(),
        spec.outer,
        spec.seed,
        progress=progress,
        keep_clouds=keep_clouds,
    )


def _accuracy_table(
    oracle: LossOracle, report: TrainReport, train_set: LabeledDataset, test_set: LabeledDataset
) -> pd.DataFrame:
    rows = []
    for epoch, theta in enumerate(report.checkpoints, start=1):
        rows.append(
            {
                "epoch": epoch,
                "train_accuracy": 1.0 - misclassification_rate(oracle, theta, train_set),
                "test_accuracy": 1.0 - misclassification_rate(oracle, theta, test_set),
            }
        )
    return pd.DataFrame(rows, columns=["epoch", "train_accuracy", "test_accuracy"])


def _classification_data(spec: ExperimentSpec) -> Tuple[LabeledDataset, LabeledDataset]:
    data = spec.dataset
    test_seed = spec.seed + TEST_SEED_OFFSET
    if data.kind == "biased-circle":
        train_set = to_binary_labels(gen_biased_circle(data.n_raw, spec.seed))
        test_set = to_binary_labels(gen_biased_circle(data.n_test, test_seed, biased=False))
    else:
        args = (data.noise_sigma, data.positive_fraction)
        train_set = gen_two_moons(data.n, *args, seed=spec.seed)
        test_set = gen_two_moons(data.n_test, *args, seed=test_seed)
    return train_set, test_set


def _run_classification(spec: ExperimentSpec, artifact: RunArtifact, progress: bool) -> TrainReport:
    train_set, test_set = _classification_data(spec)
    oracle = MlpBceLoss(train_set.d, spec.hidden_layers())
    problem = RobustProblem(oracle, spec.params, _classification_cost())
    report = _train_method(spec, problem, train_set, keep_clouds=True, progress=progress)

    artifact.tables["accuracy.csv"] = _accuracy_table(oracle, report, train_set, test_set)
    if report.first_epoch_clouds and train_set.d == 2:
        artifact.tables["worst_case.csv"] = pd.DataFrame(
            {"epoch": [1], "quadrant_fraction": [quadrant_fraction(report.first_epoch_clouds)]}
        )
    return report


def _run_inner_objective(spec: ExperimentSpec, artifact: RunArtifact, progress: bool) -> TrainReport:
    train_set, _ = _classification_data(spec)
    oracle = MlpBceLoss(train_set.d, spec.hidden_layers())
    problem = RobustProblem(oracle, spec.params, _classification_cost())
    pretrained = saa_train(problem, train_set, spec.outer, spec.seed, progress=progress)

    curve = inner_objective_curve(
        problem,
        pretrained.theta,
        train_set,
        spec.sampler_config(),
        spec.evaluation.record_every,
        spec.seed,
    )
    artifact.tables["inner_objective.csv"] = pd.DataFrame(
        {"iteration": curve.iterations, "mean_tilted_potential": curve.values}
    )
    return pretrained


def _feature_data(spec: ExperimentSpec) -> Tuple[LabeledDataset, LabeledDataset]:
    data = spec.dataset
    if data.kind == "synthetic-features":
        full = gen_synthetic_features(data.n, data.d, data.classes, data.margin, spec.seed, data.noise)
        return split_dataset(full, data.test_fraction, spec.seed)
    full = load_features(data.path)
    if data.test_path is not None:
        return full, load_features(data.test_path)
    return split_dataset(full, data.test_fraction, spec.seed)


def _run_feature_robustness(spec: ExperimentSpec, artifact: RunArtifact, progress: bool) -> TrainReport:
    train_set, test_set = _feature_data(spec)
    oracle = SoftmaxLogisticLoss(train_set.d, max(train_set.n_classes, test_set.n_classes))
    problem = RobustProblem(oracle, spec.params, _classification_cost())
    report = _train_method(spec, problem, train_set, progress=progress)

    rates = robustness_curve(oracle, report.theta, test_set, spec.attack)
    artifact.tables["robustness_curve.csv"] = pd.DataFrame(
        {"delta": list(spec.attack.delta_grid), "error_rate": rates}
    )
    artifact.metadata["attack"] = spec.attack.model_dump(mode="json")
    return report


def _run_uncertain_ls(spec: ExperimentSpec, artifact: RunArtifact, progress: bool) -> TrainReport:
    data = spec.dataset
    instance = gen_uncertain_ls(spec.seed, data.n_train, data.dim, data.delta_grid)
    oracle = instance.oracle()
    problem = RobustProblem(oracle, spec.params)
    report = _train_method(spec, problem, instance.train_dataset(), progress=progress)

    losses = []
    for k, delta in enumerate(instance.delta_grid):
        # Same test draws for every method sharing the seed
        rng = RngStream(spec.seed, step=k, purpose=TEST_STREAM).generator()
        losses.append(mean_test_loss(oracle, report.theta, instance.sample_test(delta, data.n_test, rng)))
    artifact.tables["robustness_curve.csv"] = pd.DataFrame(
        {"delta": instance.delta_grid, "test_loss": losses}
    )
    return report


def oracle_table(
    problem: RobustProblem,
    theta: np.ndarray,
    anchor: np.ndarray,
    config: SamplerConfig,
    seed: int,
) -> Tuple[pd.DataFrame, Dict]:
    """Weighted moments of one sampler run against the Gaussian target N(x + tau a, eps/2 I)."""
    cloud = get_sampler(config, problem).run(theta, anchor, None, RngStream(seed))
    weights = cloud.weights
    mean = weights @ cloud.positions
    variance = weights @ (cloud.positions - mean) ** 2
    d = anchor.size
    table = pd.DataFrame(
        {
            "coordinate": np.arange(d),
            "empirical_mean": mean,
            "oracle_mean": anchor + problem.tau * theta,
            "empirical_variance": variance,
            "oracle_variance": np.full(d, problem.epsilon / 2.0),
        }
    )
    return table, dict(cloud.stats)


def _run_sampler_oracle(spec: ExperimentSpec, artifact: RunArtifact, progress: bool) -> None:
    anchor = np.asarray(spec.dataset.anchor, dtype=np.float64)
    theta = np.asarray(spec.dataset.direction, dtype=np.float64)
    problem = RobustProblem(LinearLoss(anchor.size), spec.params)
    table, stats = oracle_table(problem, theta, anchor, spec.sampler_config(), spec.seed)
    artifact.tables["sampler_oracle.csv"] = table
    if stats:
        artifact.metadata["sampler_stats"] = stats
    return None


RUNNERS: Dict[str, Callable[[ExperimentSpec, RunArtifact, bool], Optional[TrainReport]]] = {
    "biased-circle": _run_classification,
    "two-moons": _run_classification,
    "inner-objective": _run_inner_objective,
    "feature-robustness": _run_feature_robustness,
    "uncertain-ls": _run_uncertain_ls,
    "sampler-oracle": _run_sampler_oracle,
}


def run_experiment(
    spec: ExperimentSpec,
    output_dir: Optional[Union[str, Path]] = None,
    progress: bool = False,
) -> RunArtifact:
    """
    Build the dataset, train, evaluate and write the run's artifacts.

    Args:
        spec: A validated experiment spec
        output_dir: Overrides the spec's output directory
        progress: Show progress bars

    Returns:
        The written RunArtifact
    """
    target = resolve_output_dir(spec, output_dir)
    artifact = RunArtifact(output_dir=target, spec_text=serialize_spec(spec))

    with run_log(target):
        logger.info(f"Running {spec.experiment} with {spec.label} (seed {spec.seed})")
        report = RUNNERS[spec.experiment](spec, artifact, progress)
        if report is not None:
            artifact.checkpoints = write_checkpoints(report.checkpoints, target / "checkpoints")
            artifact.metadata["wall_clock_seconds"] = report.wall_clock
            artifact.metadata["outer_steps"] = report.steps

        write_artifact(artifact, spec.seed)
        logger.info(f"Artifacts written to {target}")
    return artifact


def _column_names(specs: List[ExperimentSpec]) -> List[str]:
    names = []
    seen: Dict[str, int] = {}
    for spec in specs:
        seen[spec.label] = seen.get(spec.label, 0) + 1
        count = seen[spec.label]
        names.append(spec.label if count == 1 else f"{spec.label}_{count}")
    return names


def compare_methods(
    specs: List[ExperimentSpec],
    output_dir: Optional[Union[str, Path]] = None,
    progress: bool = False,
) -> pd.DataFrame:
    """
    Run every spec and join their headline metric into one wide table.

    Rows are the shared key (epoch, iteration, delta or coordinate); columns
    are methods. Repeated labels get a numeric suffix.

    Raises:
        DatasetMismatchError: The specs do not share experiment, dataset and seed
    """
    if not specs:
        raise InvalidArgumentError("compare needs at least one spec")
    if not same_data(specs):
        mismatch = next(
            s for s in specs[1:]
            if (s.experiment, s.seed, s.dataset) != (specs[0].experiment, specs[0].seed, specs[0].dataset)
        )
        raise DatasetMismatchError(specs[0].label, mismatch.label)

    table_name, key, metric = COMPARISON_COLUMNS[specs[0].experiment]
    root = Path(output_dir) if output_dir is not None else resolve_output_dir(specs[0]).parent / (
        f"{specs[0].experiment}-comparison-seed{specs[0].seed}"
    )

    combined = None
    for name, spec in zip(_column_names(specs), specs):
        artifact = run_experiment(spec, root / name, progress)
        frame = artifact.tables[table_name][[key, metric]].rename(columns={metric: name})
        combined = frame if combined is None else combined.merge(frame, on=key, how="outer")

    write_table(combined, root / "comparison.csv")
    return combined


ORACLE_SUITE = {
    "wgf-ula": dict(eta=1e-3, T=5000, m=2000),
    "wfr": dict(eta=1e-3, T=5000, m=2000, eta_w=0.01, w_min=1e-5),
    "svgd": dict(eta=1e-2, T=1000, m=200),
    "rgo": dict(eta=1e-3, T=1, m=10_000),
}


def run_oracle_suite(
    output_dir: Optional[Union[str, Path]] = None, seed: int = 0, tolerance: float = 0.05
) -> pd.DataFrame:
    """
    Check every stochastic sampler against the closed-form Gaussian target of
    the linear loss a = (1, 0), tau = 0.5, eps = 0.5, anchor at the origin.
    """
    params = RobustnessParams(tau=0.5, epsilon=0.5)
    problem = RobustProblem(LinearLoss(2), params)
    theta = np.array([1.0, 0.0])
    anchor = np.zeros(2)

    frames = []
    for method, settings in ORACLE_SUITE.items():
        table, stats = oracle_table(problem, theta, anchor, SamplerConfig(method=method, **settings), seed)
        table.insert(0, "method", method)
        table["mean_ok"] = (table["empirical_mean"] - table["oracle_mean"]).abs() <= tolerance
        table["variance_ok"] = (
            (table["empirical_variance"] - table["oracle_variance"]).abs()
            <= 0.15 * table["oracle_variance"]
        )
        frames.append(table)
        logger.info(f"Oracle {method}: means {table['empirical_mean'].round(4).tolist()} {stats or ''}")

    result = pd.concat(frames, ignore_index=True)
    target = Path(output_dir) if output_dir is not None else OUTPUT_DIR / f"oracle-seed{seed}"
    write_table(result, target / "sampler_oracle.csv")
    return result


def run_gradcheck(n_points: int = 20, seed: int = 0) -> List[GradCheckReport]:
    """Finite-difference check of every loss family at ``n_points`` random points."""
    oracles = [
        MlpBceLoss(2, (4,)),
        MlpBceLoss(3, (16,)),
        SoftmaxLogisticLoss(5, 3),
        gen_uncertain_ls(seed).oracle(),
        LinearLoss(3),
    ]
    return [finite_diff_check(oracle, n_points, seed) for oracle in oracles]
