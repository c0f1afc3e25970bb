"""Registration error against ground truth, and the statistics built on it."""

import logging
from typing import List, Sequence, Tuple, Union

import numpy as np

from ..core.correlation import CorrelationConfig
from ..core.errors import DatasetError
from ..core.graph import GraphConfig
from ..core.image import ImageSet
from ..core.optimizer import OptimizerConfig, RegistrationSolution, register_set
from .synthetic import GroundTruth, Shift

logger = logging.getLogger(__name__)

Offsets = Union[RegistrationSolution, Sequence[Shift]]


def _offsets(sol: Offsets) -> List[Shift]:
    if isinstance(sol, RegistrationSolution):
        return list(sol.offsets)
    return [(int(dx), int(dy)) for dx, dy in sol]


def registration_error(sol: Offsets, truth: GroundTruth) -> Tuple[float, List[float]]:
    """
    Mean and list of pair-wise errors over all ordered pairs ``i != j``.

    ``e_ij = |(dr_i - dr_j) - (t_i - t_j)|`` in pixels. Only differences
    enter, so a constant shift of every recovered offset changes nothing.
    """
    recovered = np.array(_offsets(sol), dtype=np.float64)
    true = np.array(truth.offsets, dtype=np.float64)
    if recovered.shape != true.shape:
        raise DatasetError(
            f"solution has {len(recovered)} offsets, ground truth has {len(true)}"
        )
    residual = recovered - true
    errors = [
        float(np.hypot(*(residual[i] - residual[j])))
        for i in range(len(residual))
        for j in range(len(residual))
        if i != j
    ]
    return (float(np.mean(errors)) if errors else 0.0), errors


def baseline_error(baseline: Offsets, truth: GroundTruth) -> float:
    """Mean pair-wise error of an externally supplied registration."""
    return registration_error(baseline, truth)[0]


def error_reduction(engine_error: float, baseline: float) -> float:
    """Relative reduction of the mean error against a baseline, in percent."""
    if baseline <= 0:
        return 0.0
    return 100.0 * (1.0 - engine_error / baseline)


def pairwise_error_stats(errors: Sequence[float]) -> Tuple[float, float]:
    """Mean and (population) standard deviation of pair-wise errors."""
    if len(errors) == 0:
        return 0.0, 0.0
    values = np.asarray(errors, dtype=np.float64)
    return float(values.mean()), float(values.std())


def subset_pair_errors(
    image_set: ImageSet,
    truth: GroundTruth,
    gcfg: GraphConfig = GraphConfig(),
    ocfg: OptimizerConfig = OptimizerConfig(),
    ccfg: CorrelationConfig = CorrelationConfig(),
) -> List[float]:
    """
    Register every two-image set ``{0, j}`` on its own.

    Returns the mean pair-wise error of each pair, ``j = 1 .. n-1`` in order.
    """
    if truth.n != image_set.n:
        raise DatasetError(
            f"ground truth has {truth.n} offsets for {image_set.n} images"
        )
    errors = []
    for j in range(1, image_set.n):
        pair = [0, j]
        solution = register_set(image_set.select(pair), gcfg, ocfg, ccfg)
        mean, _ = registration_error(solution, truth.select(pair))
        logger.debug("pair (0, %d): error %.3f px", j, mean)
        errors.append(mean)
    return errors
