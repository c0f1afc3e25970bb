"""
python-setreg - set-based translational image registration

Jointly registers a set of images of the same scene by maximizing a
graph-structured sum of normalized cross-correlations of high-pass
representations, coarse to fine.
"""

import logging

from .core.correlation import (
    SENTINEL,
    CorrelationConfig,
    CorrelationTable,
    build_table,
    build_tables,
    cross_correlate_full,
    lookup,
)
from .core.errors import (
    ConfigError,
    DatasetError,
    DimensionMismatchError,
    ImageFormatError,
    MissingTableError,
    SetRegError,
)
from .core.graph import ConstraintsGraph, GraphConfig, build_graph, distance_matrix
from .core.image import (
    ImageGrid,
    ImageSet,
    euclidean_distance,
    integral_image,
    rect_sum,
    to_grayscale,
)
from .core.optimizer import (
    LevelTrace,
    OptimizerConfig,
    RegistrationSolution,
    ascend_level,
    fitness,
    register_set,
)
from .core.outcome import Failed, Outcome, Registered, attempt
from .core.representation import (
    GaussianKernel,
    PyramidSchedule,
    Representation,
    abs_highpass,
    gaussian_blur,
    make_kernel,
)
from .dataset import (
    GroundTruth,
    PerturbationSpec,
    generate_set,
    load_set,
    mosaic_texture,
    registration_error,
    save_set,
    value_noise_texture,
)

__version__ = "0.1.0"

logging.getLogger(__name__).addHandler(logging.NullHandler())

__all__ = [
    "ImageGrid",
    "ImageSet",
    "to_grayscale",
    "euclidean_distance",
    "integral_image",
    "rect_sum",
    "GaussianKernel",
    "PyramidSchedule",
    "Representation",
    "make_kernel",
    "gaussian_blur",
    "abs_highpass",
    "SENTINEL",
    "CorrelationConfig",
    "CorrelationTable",
    "cross_correlate_full",
    "build_table",
    "build_tables",
    "lookup",
    "ConstraintsGraph",
    "GraphConfig",
    "distance_matrix",
    "build_graph",
    "OptimizerConfig",
    "LevelTrace",
    "RegistrationSolution",
    "fitness",
    "ascend_level",
    "register_set",
    "GroundTruth",
    "PerturbationSpec",
    "generate_set",
    "load_set",
    "save_set",
    "registration_error",
    "mosaic_texture",
    "value_noise_texture",
    "Outcome",
    "Registered",
    "Failed",
    "attempt",
    "SetRegError",
    "ImageFormatError",
    "DimensionMismatchError",
    "ConfigError",
    "DatasetError",
    "MissingTableError",
]
