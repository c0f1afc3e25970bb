"""
ABS-HP representation: the absolute value of a Gaussian high-pass filtered image.

The high-pass residual is evaluated in difference form,
``blur(I) - I = V(Dh) + Dv`` with ``Dh = sum_a w_a (I[x+a] - I[x])`` and
``Dv`` its vertical analogue. Every term is a difference of pixel values, so
constant images give exactly zero and a polarity flip ``c - I`` negates the
residual term by term.
"""

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Tuple, Union

import numpy as np
from PIL import Image
from scipy import ndimage

from .errors import ConfigError
from .image import ImageGrid, ImageSet
from .settings import parallel_map

logger = logging.getLogger(__name__)

DEFAULT_SIGMAS: Tuple[float, ...] = (40.0, 20.0, 8.0, 3.0)


@dataclass(frozen=True, eq=False)
class GaussianKernel:
    """Normalized, symmetric 1D Gaussian taps for separable filtering."""

    sigma: float
    radius: int
    weights: np.ndarray

    def __post_init__(self) -> None:
        if not self.sigma > 0:
            raise ConfigError(f"sigma must be positive, got {self.sigma}")
        weights = np.array(self.weights, dtype=np.float64)
        if weights.shape != (2 * self.radius + 1,):
            raise ConfigError(
                f"kernel of radius {self.radius} needs {2 * self.radius + 1} taps, "
                f"got {weights.shape}"
            )
        weights.setflags(write=False)
        object.__setattr__(self, "weights", weights)


def make_kernel(sigma: float) -> GaussianKernel:
    """Sampled Gaussian truncated at ``ceil(3 sigma)`` and renormalized."""
    if not sigma > 0:
        raise ConfigError(f"sigma must be positive, got {sigma}")
    radius = int(math.ceil(3.0 * sigma))
    taps = np.arange(-radius, radius + 1, dtype=np.float64)
    weights = np.exp(-(taps * taps) / (2.0 * sigma * sigma))
    return GaussianKernel(
        sigma=float(sigma), radius=radius, weights=weights / weights.sum()
    )


@dataclass(frozen=True)
class PyramidSchedule:
    """Filter widths visited coarse to fine."""

    sigmas: Tuple[float, ...] = DEFAULT_SIGMAS

    def __post_init__(self) -> None:
        sigmas = tuple(float(s) for s in self.sigmas)
        if not sigmas:
            raise ConfigError("schedule must contain at least one sigma")
        if any(s <= 0 for s in sigmas):
            raise ConfigError(f"schedule sigmas must be positive, got {sigmas}")
        if any(a <= b for a, b in zip(sigmas, sigmas[1:])):
            raise ConfigError(f"schedule must be strictly decreasing, got {sigmas}")
        object.__setattr__(self, "sigmas", sigmas)

    @classmethod
    def parse(cls, text: str) -> "PyramidSchedule":
        """Parse a comma separated list such as ``"40,20,8,3"``."""
        try:
            values = tuple(float(part) for part in text.split(",") if part.strip())
        except ValueError:
            raise ConfigError(f"cannot parse sigma schedule {text!r}")
        return cls(values)

    def __iter__(self):
        return iter(self.sigmas)

    def __len__(self) -> int:
        return len(self.sigmas)


@dataclass(frozen=True)
class Representation:
    """ABS-HP grid of one source image at one filter width."""

    grid: ImageGrid
    sigma: float
    source_id: str = field(default="")

    def __post_init__(self) -> None:
        if float(self.grid.data.min()) < 0.0:
            raise ConfigError("representation values must be nonnegative")

    @property
    def data(self) -> np.ndarray:
        return self.grid.data


def _difference_pass(data: np.ndarray, k: GaussianKernel, axis: int) -> np.ndarray:
    """``sum_a w_a (data[.. + a ..] - data)`` along ``axis`` with replicated edges."""
    r = k.radius
    pad = [(0, 0), (0, 0)]
    pad[axis] = (r, r)
    padded = np.pad(data, pad, mode="edge")
    length = data.shape[axis]
    out = np.zeros_like(data)
    for tap, weight in enumerate(k.weights):
        if tap == r:
            continue
        if axis == 0:
            window = padded[tap : tap + length, :]
        else:
            window = padded[:, tap : tap + length]
        out += weight * (window - data)
    return out


def _blur_residual(img: ImageGrid, k: GaussianKernel) -> np.ndarray:
    """``gaussian_blur(img) - img``, computed without cancellation."""
    horizontal = _difference_pass(img.data, k, axis=1)
    return ndimage.correlate1d(horizontal, k.weights, axis=0, mode="nearest") + (
        _difference_pass(img.data, k, axis=0)
    )


def gaussian_blur(img: ImageGrid, k: GaussianKernel) -> ImageGrid:
    """Separable Gaussian blur (horizontal then vertical) with edge replication."""
    return ImageGrid(img.data + _blur_residual(img, k))


def abs_highpass(
    img: ImageGrid, sigma: Union[float, GaussianKernel], source_id: str = ""
) -> Representation:
    """``|img - gaussian_blur(img, G(sigma))|``, element-wise."""
    k = sigma if isinstance(sigma, GaussianKernel) else make_kernel(sigma)
    return Representation(
        grid=ImageGrid(np.abs(_blur_residual(img, k))),
        sigma=k.sigma,
        source_id=source_id,
    )


def representations(image_set: ImageSet, sigma: float) -> List[Representation]:
    """ABS-HP of every image of a set, computed on the worker pool."""
    k = make_kernel(sigma)
    return parallel_map(
        lambda pair: abs_highpass(pair[1], k, source_id=pair[0]),
        list(zip(image_set.ids, image_set.images)),
    )


def representation_to_pgm(rep: Representation, path: Union[str, Path]) -> Path:
    """Write a representation as an 8-bit PGM scaled by its maximum."""
    path = Path(path)
    data = rep.data
    peak = float(data.max())
    scaled = data / peak if peak > 0 else data
    pixels = np.round(scaled * 255.0).astype(np.uint8)
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(pixels).save(path, format="PPM")
    logger.debug(
        "wrote representation %s (sigma=%g) to %s", rep.source_id, rep.sigma, path
    )
    return path
