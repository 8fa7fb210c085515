# Expose module
from gfsdro.data.models import LabeledDataset, UncertainLsInstance
from gfsdro.data.generators import (
    gen_biased_circle,
    gen_two_moons,
    gen_uncertain_ls,
    gen_synthetic_features,
    split_dataset,
    to_binary_labels,
)
from gfsdro.data.features import load_features, save_features

__all__ = [
    "LabeledDataset",
    "UncertainLsInstance",
    "gen_biased_circle",
    "gen_two_moons",
    "gen_uncertain_ls",
    "gen_synthetic_features",
    "split_dataset",
    "to_binary_labels",
    "load_features",
    "save_features",
]
