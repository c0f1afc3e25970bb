"""
Per-edge normalized cross-correlation tables.

For an edge ``(i, j)`` the table holds, for every integer shift
``dr = (dx, dy)``,

    rho(dr) = sum_r zeta_i(r) * zeta_j(r + dr)

computed once through the convolution theorem, together with integral
images of ``zeta_i**2`` and ``zeta_j**2`` from which the overlap energies of
any shift are corner-anchored rectangle sums. Lookups of the normalized
coefficient are then O(1).

Arrays covering all shifts are indexed ``[dy + h - 1, dx + w - 1]``.
"""

import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from PIL import Image
from scipy import fft as sp_fft

from .errors import ConfigError
from .image import ImageGrid, integral_image, padded_integral, rect_sum
from .representation import Representation
from .settings import parallel_map

logger = logging.getLogger(__name__)

Edge = Tuple[int, int]
Shift = Tuple[int, int]

# Returned for shifts outside the search window or with too little overlap.
SENTINEL = -1.0

DEFAULT_MAX_SHIFT = 128
DEFAULT_MIN_OVERLAP = 0.25
DEFAULT_ENERGY_FLOOR = 1e-12

Raster = Union[Representation, ImageGrid, np.ndarray]


@dataclass(frozen=True)
class CorrelationConfig:
    """Search window and normalization parameters shared by all edges."""

    max_shift: int = DEFAULT_MAX_SHIFT
    min_overlap_frac: float = DEFAULT_MIN_OVERLAP
    energy_floor: float = DEFAULT_ENERGY_FLOOR

    def __post_init__(self) -> None:
        if int(self.max_shift) != self.max_shift or self.max_shift < 0:
            raise ConfigError(
                f"max_shift must be a nonnegative integer, got {self.max_shift}"
            )
        if not 0.0 < self.min_overlap_frac <= 1.0:
            raise ConfigError(
                f"min_overlap_frac must be in (0, 1], got {self.min_overlap_frac}"
            )
        if self.energy_floor < 0:
            raise ConfigError(
                f"energy_floor must be nonnegative, got {self.energy_floor}"
            )
        object.__setattr__(self, "max_shift", int(self.max_shift))

    def check_size(self, width: int, height: int) -> None:
        if self.max_shift >= min(width, height):
            raise ConfigError(
                f"max_shift {self.max_shift} must be smaller than the image size "
                f"{width}x{height}"
            )

    def to_dict(self) -> Dict[str, float]:
        return {
            "max_shift": self.max_shift,
            "min_overlap_frac": self.min_overlap_frac,
            "energy_floor": self.energy_floor,
        }

    @classmethod
    def from_dict(cls, data: Dict) -> "CorrelationConfig":
        keys = ("max_shift", "min_overlap_frac", "energy_floor")
        return cls(**{k: data[k] for k in keys if k in data})


def _as_array(raster: Raster) -> np.ndarray:
    if isinstance(raster, Representation):
        return raster.data
    if isinstance(raster, ImageGrid):
        return raster.data
    return np.asarray(raster, dtype=np.float64)


def _require_same_shape(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        ImageGrid(a).require_same_shape(ImageGrid(b), "representations")


def cross_correlate_full(zi: Raster, zj: Raster) -> np.ndarray:
    """
    Full cross-correlation ``sum_r zi(r) zj(r + dr)`` for every integer shift.

    Both grids are zero-padded to a fast transform length of at least
    ``2n - 1`` per axis so the circular correlation contains no wrap-around.
    Returns a ``(2h - 1, 2w - 1)`` array indexed ``[dy + h - 1, dx + w - 1]``.
    """
    a = _as_array(zi)
    b = _as_array(zj)
    _require_same_shape(a, b)
    h, w = a.shape
    size = (
        sp_fft.next_fast_len(2 * h - 1, real=True),
        sp_fft.next_fast_len(2 * w - 1, real=True),
    )
    spectrum = np.conj(sp_fft.rfft2(a, s=size)) * sp_fft.rfft2(b, s=size)
    full = sp_fft.irfft2(spectrum, s=size)
    rows = np.arange(-(h - 1), h) % size[0]
    cols = np.arange(-(w - 1), w) % size[1]
    return full[np.ix_(rows, cols)]


def _overlap_energies(padded: np.ndarray, h: int, w: int, moving: bool) -> np.ndarray:
    """
    Energy of one grid inside the overlap region, for every shift.

    ``padded`` is the integral image with a leading zero row and column. The
    overlap of the fixed grid spans ``[max(0, -d), n - max(0, d))`` per axis;
    the moving grid spans the same interval translated by ``d``.
    """
    dys = np.arange(-(h - 1), h)
    dxs = np.arange(-(w - 1), w)
    if moving:
        y0, y1 = np.maximum(0, dys), h + np.minimum(0, dys)
        x0, x1 = np.maximum(0, dxs), w + np.minimum(0, dxs)
    else:
        y0, y1 = np.maximum(0, -dys), h - np.maximum(0, dys)
        x0, x1 = np.maximum(0, -dxs), w - np.maximum(0, dxs)
    y0, y1 = y0[:, None], y1[:, None]
    x0, x1 = x0[None, :], x1[None, :]
    energies = padded[y1, x1] - padded[y0, x1] - padded[y1, x0] + padded[y0, x0]
    return np.maximum(energies, 0.0)


@dataclass(frozen=True, eq=False)
class CorrelationTable:
    """Precomputed correlation surface of one ordered edge ``(i, j)``."""

    edge: Edge
    numerator: np.ndarray
    denom_i: ImageGrid
    denom_j: ImageGrid
    max_shift: int
    min_overlap_frac: float
    energy_floor: float = DEFAULT_ENERGY_FLOOR
    coefficients: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self) -> None:
        h, w = self.height, self.width
        if self.numerator.shape != (2 * h - 1, 2 * w - 1):
            raise ConfigError(
                f"numerator table must be {2 * w - 1}x{2 * h - 1}, "
                f"got {self.numerator.shape[1]}x{self.numerator.shape[0]}"
            )
        numerator = np.array(self.numerator, dtype=np.float64)
        numerator.setflags(write=False)
        object.__setattr__(self, "numerator", numerator)
        if self.coefficients is None:
            object.__setattr__(self, "coefficients", self._normalize())

    @property
    def width(self) -> int:
        return self.denom_i.width

    @property
    def height(self) -> int:
        return self.denom_i.height

    @property
    def degenerate(self) -> bool:
        """True when either representation carries no energy at all."""
        total_i = float(self.denom_i.data[-1, -1])
        total_j = float(self.denom_j.data[-1, -1])
        return min(total_i, total_j) < self.energy_floor

    def _normalize(self) -> np.ndarray:
        """Dense coefficients over the search window, sentinel outside."""
        h, w, m = self.height, self.width, self.max_shift
        energy_i = _overlap_energies(padded_integral(self.denom_i), h, w, moving=False)
        energy_j = _overlap_energies(padded_integral(self.denom_j), h, w, moving=True)
        window = (slice(h - 1 - m, h + m), slice(w - 1 - m, w + m))
        energy_i, energy_j = energy_i[window], energy_j[window]
        numerator = np.maximum(self.numerator[window], 0.0)

        informative = (energy_i >= self.energy_floor) & (energy_j >= self.energy_floor)
        coeffs = np.zeros_like(numerator)
        denominator = np.sqrt(energy_i[informative] * energy_j[informative])
        # Cauchy-Schwarz bounds the true value; clipping only removes FFT noise
        coeffs[informative] = np.clip(numerator[informative] / denominator, 0.0, 1.0)

        shifts = np.arange(-m, m + 1)
        area = (h - np.abs(shifts))[:, None] * (w - np.abs(shifts))[None, :]
        coeffs[area < self.min_overlap_frac * w * h] = SENTINEL
        coeffs.setflags(write=False)
        return coeffs

    def in_window(self, dr: Shift) -> bool:
        dx, dy = int(dr[0]), int(dr[1])
        return abs(dx) <= self.max_shift and abs(dy) <= self.max_shift

    def lookup(self, dr: Shift) -> float:
        """Normalized coefficient at shift ``dr``; see ``lookup``."""
        dx, dy = int(dr[0]), int(dr[1])
        m = self.max_shift
        if abs(dx) > m or abs(dy) > m:
            return SENTINEL
        return float(self.coefficients[dy + m, dx + m])

    def numerator_at(self, dr: Shift) -> float:
        dx, dy = int(dr[0]), int(dr[1])
        return float(self.numerator[dy + self.height - 1, dx + self.width - 1])

    def denominator_at(self, dr: Shift) -> float:
        """``sqrt(E_i * E_j)`` over the overlap of shift ``dr``, from the integrals."""
        dx, dy = int(dr[0]), int(dr[1])
        h, w = self.height, self.width
        energy_i = rect_sum(
            self.denom_i, max(0, -dx), max(0, -dy), w - max(0, dx), h - max(0, dy)
        )
        energy_j = rect_sum(
            self.denom_j, max(0, dx), max(0, dy), w + min(0, dx), h + min(0, dy)
        )
        return float(np.sqrt(max(energy_i, 0.0) * max(energy_j, 0.0)))

    def argmax(self) -> Shift:
        """Shift of the largest in-window coefficient (first in row-major order)."""
        m = self.max_shift
        flat = int(np.argmax(self.coefficients))
        dy, dx = divmod(flat, 2 * m + 1)
        return (dx - m, dy - m)

    def reversed(self) -> "CorrelationTable":
        """Table of the edge ``(j, i)``: every surface point-reflected through 0."""
        i, j = self.edge
        return CorrelationTable(
            edge=(j, i),
            numerator=self.numerator[::-1, ::-1],
            denom_i=self.denom_j,
            denom_j=self.denom_i,
            max_shift=self.max_shift,
            min_overlap_frac=self.min_overlap_frac,
            energy_floor=self.energy_floor,
            coefficients=np.ascontiguousarray(self.coefficients[::-1, ::-1]),
        )


def build_table(
    zi: Raster,
    zj: Raster,
    max_shift: int = DEFAULT_MAX_SHIFT,
    min_overlap_frac: float = DEFAULT_MIN_OVERLAP,
    edge: Edge = (0, 1),
    energy_floor: float = DEFAULT_ENERGY_FLOOR,
) -> CorrelationTable:
    """Precompute the correlation table of the ordered pair ``(zi, zj)``."""
    a = _as_array(zi)
    b = _as_array(zj)
    _require_same_shape(a, b)
    cfg = CorrelationConfig(max_shift, min_overlap_frac, energy_floor)
    h, w = a.shape
    cfg.check_size(w, h)
    return CorrelationTable(
        edge=edge,
        numerator=cross_correlate_full(a, b),
        denom_i=integral_image(ImageGrid(a * a)),
        denom_j=integral_image(ImageGrid(b * b)),
        max_shift=cfg.max_shift,
        min_overlap_frac=cfg.min_overlap_frac,
        energy_floor=cfg.energy_floor,
    )


def lookup(t: CorrelationTable, dr: Shift) -> float:
    """
    Normalized cross-correlation coefficient of edge ``t`` at shift ``dr``.

    Shifts beyond ``max_shift`` on either axis, or whose overlap covers less
    than ``min_overlap_frac`` of the image, give ``SENTINEL``. Shifts where
    either overlap energy falls below the energy floor give 0.
    """
    return t.lookup(dr)


def build_tables(
    reps: Sequence[Representation],
    edges: Iterable[Edge],
    cfg: CorrelationConfig = CorrelationConfig(),
) -> Dict[Edge, CorrelationTable]:
    """
    Tables for every requested ordered edge.

    Each unordered pair is transformed once; the opposite direction, when
    also requested, is its ``reversed()`` table.
    """
    wanted = set(edges)
    pairs: List[Edge] = sorted({(min(i, j), max(i, j)) for i, j in wanted})

    def build(pair: Edge) -> CorrelationTable:
        i, j = pair
        started = time.perf_counter()
        table = build_table(
            reps[i],
            reps[j],
            cfg.max_shift,
            cfg.min_overlap_frac,
            edge=(i, j),
            energy_floor=cfg.energy_floor,
        )
        logger.debug(
            "table %s built in %.1f ms", pair, 1000.0 * (time.perf_counter() - started)
        )
        return table

    tables: Dict[Edge, CorrelationTable] = {}
    for pair, table in zip(pairs, parallel_map(build, pairs)):
        if table.degenerate:
            logger.warning(
                "edge %s is degenerate: a representation has no energy", pair
            )
        i, j = pair
        if (i, j) in wanted:
            tables[(i, j)] = table
        if (j, i) in wanted:
            tables[(j, i)] = table.reversed()
    return tables


def surface_to_pgm(t: CorrelationTable, path: Union[str, Path]) -> Path:
    """Write the in-window coefficient surface as an 8-bit PGM (sentinel → 0)."""
    path = Path(path)
    pixels = np.round(np.clip(t.coefficients, 0.0, 1.0) * 255.0).astype(np.uint8)
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(pixels).save(path, format="PPM")
    return path
