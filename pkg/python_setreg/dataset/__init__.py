"""Image set loading, synthetic generation and error metrics."""

from .io import load_set, read_raster, read_truth, save_set, write_raster
from .metrics import (
    baseline_error,
    error_reduction,
    pairwise_error_stats,
    registration_error,
    subset_pair_errors,
)
from .synthetic import (
    GroundTruth,
    PerturbationSpec,
    generate_set,
    mosaic_texture,
    perturb,
    value_noise_texture,
)

__all__ = [
    "GroundTruth",
    "PerturbationSpec",
    "baseline_error",
    "error_reduction",
    "generate_set",
    "load_set",
    "mosaic_texture",
    "pairwise_error_stats",
    "perturb",
    "read_raster",
    "read_truth",
    "registration_error",
    "save_set",
    "subset_pair_errors",
    "value_noise_texture",
    "write_raster",
]
