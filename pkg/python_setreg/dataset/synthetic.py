"""
Synthetic time-separated image sets with exact ground truth.

A set is cut from one large base raster: view ``k`` is the crop whose origin
is displaced by ``t_k`` from view 0's, so the true misalignment of any two
views is known exactly. Each view then receives its own appearance changes:
a gamma distortion, a linear illumination ramp, a few flat occluders and
additive Gaussian noise.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import ndimage
from scipy.spatial import KDTree

from ..core.errors import ConfigError, DatasetError
from ..core.image import ImageGrid, ImageSet

logger = logging.getLogger(__name__)

Shift = Tuple[int, int]

MAX_OCCLUDED_FRACTION = 0.20


@dataclass(frozen=True)
class GroundTruth:
    """True integer shift of every view relative to the first one."""

    offsets: Tuple[Shift, ...]
    ids: Tuple[str, ...] = ()

    def __post_init__(self) -> None:
        offsets = tuple((int(dx), int(dy)) for dx, dy in self.offsets)
        if offsets and offsets[0] != (0, 0):
            raise ConfigError(
                f"ground truth must put the first image at (0, 0), got {offsets[0]}"
            )
        ids = tuple(self.ids)
        if ids and len(ids) != len(offsets):
            raise ConfigError(f"{len(ids)} ids given for {len(offsets)} offsets")
        object.__setattr__(self, "offsets", offsets)
        object.__setattr__(self, "ids", ids)

    @property
    def n(self) -> int:
        return len(self.offsets)

    def select(self, indices: Sequence[int]) -> "GroundTruth":
        """Truth of a sub-set, re-expressed relative to its first member."""
        ox, oy = self.offsets[indices[0]]
        return GroundTruth(
            tuple((self.offsets[i][0] - ox, self.offsets[i][1] - oy) for i in indices),
            tuple(self.ids[i] for i in indices) if self.ids else (),
        )

    def subset(self, k: int) -> "GroundTruth":
        return self.select(range(k))

    def to_dict(self) -> Dict[str, List[int]]:
        ids = self.ids or tuple(str(k) for k in range(self.n))
        return {name: list(shift) for name, shift in zip(ids, self.offsets)}


@dataclass(frozen=True)
class PerturbationSpec:
    """Per-view appearance changes applied after cropping."""

    gamma_range: Tuple[float, float] = (0.6, 1.6)
    gradient_amp: float = 0.3
    occluder_count: int = 5
    occluder_size_range: Tuple[float, float] = (0.02, 0.06)
    noise_sigma: float = 0.01
    seed: int = 0

    def __post_init__(self) -> None:
        lo, hi = self.gamma_range
        if not 0 < lo <= hi:
            raise ConfigError(
                f"gamma_range must satisfy 0 < lo <= hi, got {self.gamma_range}"
            )
        lo, hi = self.occluder_size_range
        if not 0 <= lo <= hi <= 1:
            raise ConfigError(
                "occluder_size_range must satisfy 0 <= lo <= hi <= 1, "
                f"got {self.occluder_size_range}"
            )
        if self.gradient_amp < 0:
            raise ConfigError(
                f"gradient_amp must be nonnegative, got {self.gradient_amp}"
            )
        if self.occluder_count < 0:
            raise ConfigError(
                f"occluder_count must be nonnegative, got {self.occluder_count}"
            )
        if self.noise_sigma < 0:
            raise ConfigError(
                f"noise_sigma must be nonnegative, got {self.noise_sigma}"
            )
        object.__setattr__(self, "gamma_range", tuple(map(float, self.gamma_range)))
        object.__setattr__(
            self, "occluder_size_range", tuple(map(float, self.occluder_size_range))
        )

    @classmethod
    def none(cls, seed: int = 0) -> "PerturbationSpec":
        """Perturbation that leaves every crop untouched."""
        return cls(
            gamma_range=(1.0, 1.0),
            gradient_amp=0.0,
            occluder_count=0,
            occluder_size_range=(0.0, 0.0),
            noise_sigma=0.0,
            seed=seed,
        )

    @property
    def is_identity(self) -> bool:
        return (
            self.gamma_range == (1.0, 1.0)
            and self.gradient_amp == 0
            and self.occluder_count == 0
            and self.noise_sigma == 0
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "gamma_range": list(self.gamma_range),
            "gradient_amp": self.gradient_amp,
            "occluder_count": self.occluder_count,
            "occluder_size_range": list(self.occluder_size_range),
            "noise_sigma": self.noise_sigma,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "PerturbationSpec":
        kwargs = dict(data)
        for key in ("gamma_range", "occluder_size_range"):
            if key in kwargs:
                kwargs[key] = tuple(kwargs[key])
        return cls(**kwargs)


def value_noise_texture(
    width: int, height: int, seed: int = 0, octaves: int = 6, base_cells: int = 4
) -> ImageGrid:
    """
    Multi-octave value noise in [0, 1].

    Each octave is a random lattice upsampled to the output size with cubic
    splines; lattice density doubles and amplitude shrinks from one octave to
    the next.
    """
    if width < 1 or height < 1:
        raise ConfigError(f"texture size must be positive, got {width}x{height}")
    if octaves < 1:
        raise ConfigError(f"octaves must be at least 1, got {octaves}")
    rng = np.random.default_rng(seed)
    texture = np.zeros((height, width))
    amplitude = 1.0
    for octave in range(octaves):
        cells = base_cells * 2**octave
        lattice = rng.random((cells + 1, cells + 1))
        layer = ndimage.zoom(
            lattice,
            (height / lattice.shape[0], width / lattice.shape[1]),
            order=3,
            mode="reflect",
        )
        texture += amplitude * layer[:height, :width]
        amplitude *= 0.6
    lo, hi = float(texture.min()), float(texture.max())
    return ImageGrid((texture - lo) / (hi - lo) if hi > lo else np.zeros_like(texture))


def mosaic_texture(
    width: int,
    height: int,
    seed: int = 0,
    levels: int = 4,
    cell_size: float = 96.0,
    persistence: float = 0.4,
) -> ImageGrid:
    """
    Multi-scale Voronoi mosaic in [0, 1].

    Level ``l`` places one seed point at a random position inside every
    square of a grid with pitch ``cell_size / 2**l``; each pixel takes the
    flat random intensity of its nearest seed. Levels are summed with weights
    ``persistence**l``, so the raster is piecewise constant with sharp cell
    borders at every scale.
    """
    if width < 1 or height < 1:
        raise ConfigError(f"texture size must be positive, got {width}x{height}")
    if levels < 1:
        raise ConfigError(f"levels must be at least 1, got {levels}")
    if cell_size / 2 ** (levels - 1) < 2.0:
        raise ConfigError(
            f"cell_size={cell_size} leaves cells under 2 px at level {levels - 1}"
        )
    if not 0 < persistence <= 1:
        raise ConfigError(f"persistence must be in (0, 1], got {persistence}")
    rng = np.random.default_rng(seed)
    ys, xs = np.mgrid[0:height, 0:width]
    pixels = np.column_stack([xs.ravel() + 0.5, ys.ravel() + 0.5])
    texture = np.zeros(height * width)
    amplitude = 1.0
    for level in range(levels):
        pitch = cell_size / 2**level
        # one ring of squares outside the raster keeps border cells bounded
        gx, gy = np.meshgrid(
            np.arange(-1, int(np.ceil(width / pitch)) + 1),
            np.arange(-1, int(np.ceil(height / pitch)) + 1),
        )
        jitter = rng.random((gx.size, 2))
        seeds = np.column_stack(
            [(gx.ravel() + jitter[:, 0]) * pitch, (gy.ravel() + jitter[:, 1]) * pitch]
        )
        _, label = KDTree(seeds).query(pixels)
        texture += amplitude * rng.random(len(seeds))[label]
        amplitude *= persistence
    texture = texture.reshape(height, width)
    lo, hi = float(texture.min()), float(texture.max())
    return ImageGrid((texture - lo) / (hi - lo) if hi > lo else np.zeros_like(texture))


def _ramp(rng: np.random.Generator, width: int, height: int, amp: float) -> np.ndarray:
    """Linear illumination gradient with random orientation and peak-to-peak ``amp``."""
    theta = rng.uniform(0.0, 2.0 * np.pi)
    ys, xs = np.mgrid[0:height, 0:width]
    proj = np.cos(theta) * xs + np.sin(theta) * ys
    span = float(proj.max() - proj.min())
    if span == 0:
        return np.zeros((height, width))
    return amp * ((proj - proj.min()) / span - 0.5)


def _occluder_mask(
    rng: np.random.Generator, width: int, height: int, size_range: Tuple[float, float]
) -> np.ndarray:
    """One rectangle or disc whose extent is a fraction of the image width."""
    extent = max(1, int(round(rng.uniform(*size_range) * width)))
    cx = rng.integers(0, width)
    cy = rng.integers(0, height)
    ys, xs = np.mgrid[0:height, 0:width]
    if rng.random() < 0.5:
        half = extent / 2.0
        return (np.abs(xs - cx) <= half) & (np.abs(ys - cy) <= half)
    radius = extent / 2.0
    return (xs - cx) ** 2 + (ys - cy) ** 2 <= radius * radius


def perturb(
    image: ImageGrid, spec: PerturbationSpec, rng: np.random.Generator
) -> ImageGrid:
    """Apply gamma, ramp, occluders and noise in that order, then clip to [0, 1]."""
    if spec.is_identity:
        return image
    data = np.array(image.data)
    h, w = data.shape

    gamma = rng.uniform(*spec.gamma_range)
    data = np.power(np.clip(data, 0.0, 1.0), gamma)

    if spec.gradient_amp > 0:
        data = data + _ramp(rng, w, h, rng.uniform(0.0, spec.gradient_amp))

    occluded = np.zeros((h, w), dtype=bool)
    for _ in range(spec.occluder_count):
        mask = _occluder_mask(rng, w, h, spec.occluder_size_range)
        data[mask] = rng.random()
        occluded |= mask
    fraction = float(occluded.mean())
    if fraction > MAX_OCCLUDED_FRACTION:
        raise DatasetError(
            f"occluders cover {fraction:.1%} of the image, "
            f"limit is {MAX_OCCLUDED_FRACTION:.0%}"
        )

    if spec.noise_sigma > 0:
        data = data + rng.normal(0.0, spec.noise_sigma, size=data.shape)
    return ImageGrid(np.clip(data, 0.0, 1.0))


def generate_set(
    base: ImageGrid,
    n: int,
    shift_bound: int,
    spec: PerturbationSpec = PerturbationSpec(),
    size: Optional[Tuple[int, int]] = None,
) -> Tuple[ImageSet, GroundTruth]:
    """
    Cut ``n`` shifted, perturbed views out of ``base``.

    ``size`` is the ``(width, height)`` of every view and defaults to the base
    shrunk by ``shift_bound`` on every side. View 0 is unshifted; the others
    draw their shift uniformly from ``[-shift_bound, shift_bound]**2``.
    """
    if n < 2:
        raise ConfigError(f"a set needs at least 2 images, got n={n}")
    if shift_bound < 0:
        raise ConfigError(f"shift_bound must be nonnegative, got {shift_bound}")
    width, height = size if size is not None else (
        base.width - 2 * shift_bound,
        base.height - 2 * shift_bound,
    )
    need_w, need_h = max(width, 1) + 2 * shift_bound, max(height, 1) + 2 * shift_bound
    if width < 1 or height < 1 or base.width < need_w or base.height < need_h:
        raise DatasetError(
            f"base image {base.width}x{base.height} is too small; "
            f"need at least {need_w}x{need_h} for shift_bound={shift_bound}"
        )

    rng = np.random.default_rng(spec.seed)
    drawn = rng.integers(-shift_bound, shift_bound + 1, size=(n - 1, 2))
    offsets: List[Shift] = [(0, 0)] + [(int(dx), int(dy)) for dx, dy in drawn]
    ids = tuple(f"img{k:03d}.png" for k in range(n))

    images = []
    for dx, dy in offsets:
        view = base.crop(shift_bound + dx, shift_bound + dy, width, height)
        images.append(perturb(view, spec, rng))

    logger.info(
        "generated %d views of %dx%d (shift_bound=%d, seed=%d)",
        n,
        width,
        height,
        shift_bound,
        spec.seed,
    )
    return ImageSet(tuple(images), ids), GroundTruth(tuple(offsets), ids)
