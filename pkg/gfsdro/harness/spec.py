"""Experiment specs: a TOML document validated by a strict pydantic schema.

Physics knobs (tau, epsilon) have no defaults. Algorithmic defaults such as
PGD internals or the SVGD kernel policy are filled in and echoed by
``serialize_spec``.
"""

import tomllib
from pathlib import Path
from typing import Annotated, List, Literal, Optional, Tuple, Union

import tomli_w
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator
from result import Err, Ok

from gfsdro.dro import DualConfig, OuterLoopConfig
from gfsdro.evaluation import AttackConfig
from gfsdro.losses import LossFamily
from gfsdro.problem import RobustnessParams
from gfsdro.samplers import SamplerConfig, SamplerSettings
from gfsdro.utils import ErrorList, SpecValidationError, ValidationResult, get_logger

logger = get_logger(__name__)

Experiment = Literal[
    "biased-circle",
    "two-moons",
    "inner-objective",
    "feature-robustness",
    "uncertain-ls",
    "sampler-oracle",
]
Method = Literal["wgf-ula", "wfr", "svgd", "rgo", "wrm", "saa", "dual"]
SAMPLER_METHODS = ("wgf-ula", "wfr", "svgd", "rgo", "wrm")


class _Section(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class BiasedCircleData(_Section):
    kind: Literal["biased-circle"] = "biased-circle"
    n_raw: int = Field(200, ge=1)
    n_test: int = Field(2000, ge=1, description="Size of the unbiased test set")


class TwoMoonsData(_Section):
    kind: Literal["two-moons"] = "two-moons"
    n: int = Field(200, ge=2)
    noise_sigma: float = Field(0.1, ge=0)
    positive_fraction: float = Field(0.9, gt=0, lt=1)
    n_test: int = Field(1000, ge=2)


class SyntheticFeaturesData(_Section):
    kind: Literal["synthetic-features"] = "synthetic-features"
    n: int = Field(2000, ge=2)
    d: int = Field(64, ge=2)
    classes: int = Field(10, ge=2)
    margin: float = Field(4.0, gt=0)
    noise: float = Field(1.0, ge=0)
    test_fraction: float = Field(0.2, gt=0, lt=1)

    @model_validator(mode="after")
    def fits_simplex(self):
        if self.d < self.classes:
            raise ValueError("d must be >= classes")
        return self


class FeatureFileData(_Section):
    kind: Literal["feature-file"] = "feature-file"
    path: str
    test_path: Optional[str] = None
    test_fraction: float = Field(0.2, gt=0, lt=1)


class UncertainLsData(_Section):
    kind: Literal["uncertain-ls"] = "uncertain-ls"
    n_train: int = Field(10, ge=1)
    dim: int = Field(10, ge=1)
    delta_grid: Tuple[float, ...] = Field(tuple(float(v) for v in range(11)), min_length=1)
    n_test: int = Field(1000, ge=1)


class GaussianOracleData(_Section):
    kind: Literal["gaussian-oracle"] = "gaussian-oracle"
    anchor: Tuple[float, ...] = Field((0.0, 0.0), min_length=1)
    direction: Tuple[float, ...] = Field((1.0, 0.0), min_length=1)

    @model_validator(mode="after")
    def same_length(self):
        if len(self.anchor) != len(self.direction):
            raise ValueError("anchor and direction must have the same length")
        return self


DatasetSection = Annotated[
    Union[
        BiasedCircleData,
        TwoMoonsData,
        SyntheticFeaturesData,
        FeatureFileData,
        UncertainLsData,
        GaussianOracleData,
    ],
    Field(discriminator="kind"),
]


class ModelSection(_Section):
    family: Optional[LossFamily] = None
    hidden: Optional[Tuple[int, ...]] = None


class EvaluationSection(_Section):
    record_every: int = Field(1, ge=1, description="Inner-curve recording period")


class ExperimentSpec(_Section):
    """Full description of one experiment run"""

    experiment: Experiment
    method: Method
    seed: int = Field(..., ge=0)
    name: Optional[str] = Field(None, description="Column name in comparisons")
    output_dir: Optional[str] = None

    params: RobustnessParams
    dataset: DatasetSection
    model: ModelSection = ModelSection()
    sampler: Optional[SamplerSettings] = None
    outer: Optional[OuterLoopConfig] = None
    dual: Optional[DualConfig] = None
    attack: AttackConfig = AttackConfig()
    evaluation: EvaluationSection = EvaluationSection()

    @property
    def label(self) -> str:
        return self.name or self.method

    def sampler_config(self) -> SamplerConfig:
        return SamplerConfig.from_settings(self.method, self.sampler)

    def loss_family(self) -> LossFamily:
        return self.model.family or DEFAULT_FAMILY[self.dataset.kind]

    def hidden_layers(self) -> Tuple[int, ...]:
        return self.model.hidden or DEFAULT_HIDDEN.get(self.experiment, (4,))


COMPATIBLE_DATA = {
    "biased-circle": ("biased-circle",),
    "two-moons": ("two-moons",),
    "inner-objective": ("two-moons", "biased-circle"),
    "feature-robustness": ("synthetic-features", "feature-file"),
    "uncertain-ls": ("uncertain-ls",),
    "sampler-oracle": ("gaussian-oracle",),
}

DEFAULT_FAMILY = {
    "biased-circle": "mlp-bce",
    "two-moons": "mlp-bce",
    "synthetic-features": "softmax-logistic",
    "feature-file": "softmax-logistic",
    "uncertain-ls": "uncertain-ls",
    "gaussian-oracle": "linear",
}

DEFAULT_HIDDEN = {
    "biased-circle": (4,),
    "two-moons": (16,),
    "inner-objective": (16,),
}


def _bound(value) -> str:
    return f"{value:g}" if isinstance(value, (int, float)) else str(value)


def _format_error(error) -> str:
    path = ".".join(str(part) for part in error["loc"]) or "spec"
    kind = error["type"]
    ctx = error.get("ctx", {})
    if kind == "greater_than":
        return f"{path} must be > {_bound(ctx['gt'])}"
    if kind == "greater_than_equal":
        return f"{path} must be >= {_bound(ctx['ge'])}"
    if kind == "less_than":
        return f"{path} must be < {_bound(ctx['lt'])}"
    if kind == "less_than_equal":
        return f"{path} must be <= {_bound(ctx['le'])}"
    if kind == "extra_forbidden":
        return f"{path}: unknown key"
    if kind == "missing":
        return f"{path} is required"
    return f"{path}: {error['msg']}"


def _cross_check(spec: ExperimentSpec) -> ErrorList:
    errors = []
    if spec.dataset.kind not in COMPATIBLE_DATA[spec.experiment]:
        allowed = ", ".join(COMPATIBLE_DATA[spec.experiment])
        errors.append(f"dataset.kind must be one of {allowed} for experiment {spec.experiment}")

    family = spec.loss_family()
    expected_family = DEFAULT_FAMILY.get(spec.dataset.kind)
    if family != expected_family:
        errors.append(f"model.family={family} does not fit dataset {spec.dataset.kind}")

    if spec.method in SAMPLER_METHODS:
        if spec.sampler is None:
            errors.append(f"sampler section is required for method {spec.method}")
        else:
            errors.extend(spec.sampler_config().problems(spec.params))
    elif spec.experiment in ("sampler-oracle", "inner-objective"):
        errors.append(f"method {spec.method} has no inner sampler for experiment {spec.experiment}")

    if spec.method == "dual":
        if spec.dual is None:
            errors.append("dual section is required for method dual")
        if spec.params.epsilon <= 0:
            errors.append("params.epsilon must be > 0 for method dual")

    if spec.experiment != "sampler-oracle" and spec.outer is None:
        errors.append(f"outer section is required for experiment {spec.experiment}")
    return errors


def validate_spec(text: str) -> ValidationResult:
    """
    Parse and validate a TOML experiment spec.

    Args:
        text: TOML document

    Returns:
        Ok(ExperimentSpec) or Err(list of messages naming the offending keys)
    """
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        return Err([f"spec: invalid TOML ({e})"])

    try:
        spec = ExperimentSpec.model_validate(data)
    except ValidationError as e:
        return Err([_format_error(error) for error in e.errors()])

    errors = _cross_check(spec)
    if errors:
        return Err(errors)
    return Ok(spec)


def load_spec(path: Union[str, Path]) -> ExperimentSpec:
    """Read and validate a spec file, raising SpecValidationError on failure."""
    text = Path(path).read_text(encoding="utf-8")
    result = validate_spec(text)
    if result.is_err():
        raise SpecValidationError(result.err_value)
    logger.debug(f"Loaded spec {path}")
    return result.ok_value


def serialize_spec(spec: ExperimentSpec) -> str:
    """Canonical TOML echo; validating it gives back an equal spec."""
    return tomli_w.dumps(spec.model_dump(mode="json", exclude_none=True))


def same_data(specs: List[ExperimentSpec]) -> bool:
    first = specs[0]
    return all(
        s.experiment == first.experiment and s.seed == first.seed and s.dataset == first.dataset
        for s in specs[1:]
    )
