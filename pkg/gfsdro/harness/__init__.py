# Expose module
from gfsdro.harness.spec import (
    ExperimentSpec,
    SAMPLER_METHODS,
    load_spec,
    same_data,
    serialize_spec,
    validate_spec,
)
from gfsdro.harness.artifacts import (
    RunArtifact,
    write_artifact,
    write_checkpoints,
    write_metadata,
    write_table,
)

__all__ = [
    "ExperimentSpec",
    "SAMPLER_METHODS",
    "load_spec",
    "same_data",
    "serialize_spec",
    "validate_spec",
    "RunArtifact",
    "write_artifact",
    "write_checkpoints",
    "write_metadata",
    "write_table",
]
