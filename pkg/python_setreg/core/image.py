"""
Raster types and elementary image operations.

``ImageGrid`` is the one raster type used throughout the package: raw
images, ABS-HP representations and integral images are all ImageGrids.
Pixel coordinates are ``(x, y)`` with x the column and y the row; the
underlying array is indexed ``data[y, x]``.
"""

from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from .errors import DimensionMismatchError, ImageFormatError

# ITU-R BT.601 luma weights
LUMA_WEIGHTS = (0.299, 0.587, 0.114)

_FULL_SCALE = {np.dtype(np.uint8): 255.0, np.dtype(np.uint16): 65535.0}

Operand = Union["ImageGrid", float, int]


def _as_readonly(array: np.ndarray) -> np.ndarray:
    out = np.array(array, dtype=np.float64, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class ImageGrid:
    """A 2D grid of double-precision intensities, immutable after construction."""

    data: np.ndarray

    def __post_init__(self) -> None:
        array = np.asarray(self.data)
        if array.ndim != 2:
            raise ImageFormatError(f"ImageGrid must be 2-D, got {array.ndim}-D data")
        if array.shape[0] < 1 or array.shape[1] < 1:
            raise ImageFormatError(
                f"ImageGrid must be at least 1x1, got {array.shape[1]}x{array.shape[0]}"
            )
        if not np.issubdtype(array.dtype, np.number) or np.iscomplexobj(array):
            raise ImageFormatError(f"ImageGrid data must be real, got {array.dtype}")
        array = _as_readonly(array)
        if not np.all(np.isfinite(array)):
            raise ImageFormatError("ImageGrid data contains NaN or Inf")
        object.__setattr__(self, "data", array)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[float]]) -> "ImageGrid":
        """Build a grid from nested row lists."""
        return cls(np.array(rows, dtype=np.float64))

    @classmethod
    def constant(cls, width: int, height: int, value: float) -> "ImageGrid":
        return cls(np.full((height, width), float(value)))

    @property
    def width(self) -> int:
        return int(self.data.shape[1])

    @property
    def height(self) -> int:
        return int(self.data.shape[0])

    @property
    def shape(self) -> Tuple[int, int]:
        """``(width, height)``."""
        return (self.width, self.height)

    def require_same_shape(self, other: "ImageGrid", what: str = "grids") -> None:
        if self.shape != other.shape:
            raise DimensionMismatchError(
                f"{what} differ in size", expected=self.shape, actual=other.shape
            )

    def equals(self, other: "ImageGrid") -> bool:
        """Exact element-wise equality."""
        return self.shape == other.shape and bool(np.array_equal(self.data, other.data))

    def _operand(self, other: Operand) -> Union[np.ndarray, float]:
        if isinstance(other, ImageGrid):
            self.require_same_shape(other)
            return other.data
        return float(other)

    def __add__(self, other: Operand) -> "ImageGrid":
        return ImageGrid(self.data + self._operand(other))

    __radd__ = __add__

    def __sub__(self, other: Operand) -> "ImageGrid":
        return ImageGrid(self.data - self._operand(other))

    def __rsub__(self, other: Operand) -> "ImageGrid":
        return ImageGrid(self._operand(other) - self.data)

    def __mul__(self, other: Operand) -> "ImageGrid":
        return ImageGrid(self.data * self._operand(other))

    __rmul__ = __mul__

    def __abs__(self) -> "ImageGrid":
        return ImageGrid(np.abs(self.data))

    def square(self) -> "ImageGrid":
        return ImageGrid(self.data * self.data)

    def crop(self, x: int, y: int, width: int, height: int) -> "ImageGrid":
        """Sub-grid with top-left corner ``(x, y)``."""
        if x < 0 or y < 0 or x + width > self.width or y + height > self.height:
            raise DimensionMismatchError(
                f"crop window ({x}, {y}, {width}x{height}) exceeds grid",
                expected=(width, height),
                actual=self.shape,
            )
        return ImageGrid(self.data[y : y + height, x : x + width])

    def __repr__(self) -> str:
        return f"ImageGrid({self.width}x{self.height})"


@dataclass(frozen=True)
class ImageSet:
    """An ordered set of equally sized images with per-image labels."""

    images: Tuple[ImageGrid, ...]
    ids: Tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        images = tuple(self.images)
        if self.ids:
            ids = tuple(self.ids)
        else:
            ids = tuple(f"img{k:03d}" for k in range(len(images)))
        if len(images) < 2:
            raise ImageFormatError(
                f"an image set needs at least 2 images, got {len(images)}"
            )
        if len(ids) != len(images):
            raise ImageFormatError(f"{len(ids)} ids given for {len(images)} images")
        if len(set(ids)) != len(ids):
            raise ImageFormatError("image ids must be unique")
        first = images[0]
        for image_id, image in zip(ids, images):
            if image.shape != first.shape:
                raise DimensionMismatchError(
                    "image set is not uniformly sized",
                    expected=first.shape,
                    actual=image.shape,
                    path=image_id,
                )
        object.__setattr__(self, "images", images)
        object.__setattr__(self, "ids", ids)

    @property
    def n(self) -> int:
        return len(self.images)

    @property
    def width(self) -> int:
        return self.images[0].width

    @property
    def height(self) -> int:
        return self.images[0].height

    @property
    def shape(self) -> Tuple[int, int]:
        return self.images[0].shape

    def subset(self, k: int) -> "ImageSet":
        """The first ``k`` images of the set."""
        if not 2 <= k <= self.n:
            raise ImageFormatError(f"subset size must be in [2, {self.n}], got {k}")
        return ImageSet(self.images[:k], self.ids[:k])

    def select(self, indices: Sequence[int]) -> "ImageSet":
        return ImageSet(
            tuple(self.images[i] for i in indices), tuple(self.ids[i] for i in indices)
        )

    def __len__(self) -> int:
        return self.n


def to_grayscale(raw: np.ndarray, path: Optional[str] = None) -> ImageGrid:
    """
    Convert an 8- or 16-bit, 1- or 3-channel raster to a [0, 1] ImageGrid.

    Three-channel input is reduced with the BT.601 luma weights.
    """
    array = np.asarray(raw)
    full_scale = _FULL_SCALE.get(array.dtype)
    if full_scale is None:
        raise ImageFormatError(
            f"unsupported sample type {array.dtype} (need 8- or 16-bit unsigned)",
            path=path,
        )
    if array.ndim == 3 and array.shape[2] == 1:
        array = array[:, :, 0]
    if array.ndim == 2:
        gray = array.astype(np.float64)
    elif array.ndim == 3 and array.shape[2] == 3:
        channels = array.astype(np.float64)
        gray = (
            LUMA_WEIGHTS[0] * channels[:, :, 0]
            + LUMA_WEIGHTS[1] * channels[:, :, 1]
            + LUMA_WEIGHTS[2] * channels[:, :, 2]
        )
    else:
        channels = array.shape[2] if array.ndim == 3 else array.ndim
        raise ImageFormatError(
            f"unsupported channel layout {array.shape} ({channels} channels)", path=path
        )
    # rounding in the weighted sum can push a white pixel a hair above 1
    return ImageGrid(np.clip(gray / full_scale, 0.0, 1.0))


def euclidean_distance(a: ImageGrid, b: ImageGrid) -> float:
    """Euclidean distance between two images over all pixels."""
    a.require_same_shape(b, "images")
    diff = a.data - b.data
    return float(np.sqrt(np.sum(diff * diff)))


def integral_image(g: ImageGrid) -> ImageGrid:
    """Inclusive cumulative sum: ``S[y, x]`` sums ``g`` over rows ≤ y, cols ≤ x."""
    return ImageGrid(np.cumsum(np.cumsum(g.data, axis=0), axis=1))


def padded_integral(S: ImageGrid) -> np.ndarray:
    """Inclusive integral image ``S`` behind a zero row and column."""
    table = np.zeros((S.height + 1, S.width + 1), dtype=np.float64)
    table[1:, 1:] = S.data
    return table


def rect_sum(S: ImageGrid, x0: int, y0: int, x1: int, y1: int) -> float:
    """
    Sum of the source grid over the half-open rectangle [x0, x1) x [y0, y1).

    ``S`` is an inclusive integral image. Terms whose corner lies on the
    grid's top or left edge vanish, so corner-anchored rectangles need fewer
    than three operations.
    """
    if not (0 <= x0 <= x1 <= S.width and 0 <= y0 <= y1 <= S.height):
        raise DimensionMismatchError(
            f"rectangle [{x0},{x1})x[{y0},{y1}) outside grid",
            expected=(x1, y1),
            actual=S.shape,
        )
    if x0 == x1 or y0 == y1:
        return 0.0
    data = S.data
    total = data[y1 - 1, x1 - 1]
    if y0 > 0:
        total -= data[y0 - 1, x1 - 1]
    if x0 > 0:
        total -= data[y1 - 1, x0 - 1]
    if x0 > 0 and y0 > 0:
        total += data[y0 - 1, x0 - 1]
    return float(total)
