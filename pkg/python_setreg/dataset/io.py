"""
Reading and writing image sets on disk.

A set is a directory of equally sized PNG/PGM files, ordered by filename,
with an optional ``truth.json`` mapping each filename to its ``[dx, dy]``
shift relative to the first file.
"""

import json
import logging
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
from PIL import Image, UnidentifiedImageError

from ..core.errors import DatasetError, DimensionMismatchError, ImageFormatError
from ..core.image import ImageGrid, ImageSet, to_grayscale
from .synthetic import GroundTruth

logger = logging.getLogger(__name__)

TRUTH_FILE = "truth.json"
IMAGE_SUFFIXES = (".png", ".pgm", ".ppm")

PathLike = Union[str, Path]


def _pixels(image: Image.Image, path: str) -> np.ndarray:
    """Raw samples of a decoded image as uint8 or uint16."""
    mode = image.mode
    if mode in ("L", "RGB"):
        return np.asarray(image)
    if mode in ("LA", "RGBA", "P"):
        return np.asarray(image.convert("RGB" if mode != "LA" else "L"))
    if mode.startswith("I;16"):
        return np.asarray(image).astype(np.uint16)
    if mode == "I":
        data = np.asarray(image)
        if data.min() < 0 or data.max() > 65535:
            raise ImageFormatError("32-bit samples outside the 16-bit range", path=path)
        return data.astype(np.uint16)
    raise ImageFormatError(f"unsupported image mode {mode!r}", path=path)


def read_raster(path: PathLike) -> ImageGrid:
    """Decode one PNG/PGM file into a [0, 1] grayscale grid."""
    path = Path(path)
    try:
        with Image.open(path) as image:
            image.load()
            raw = _pixels(image, path.name)
    except (OSError, UnidentifiedImageError) as e:
        raise ImageFormatError(f"cannot read image: {e}", path=path.name) from e
    return to_grayscale(raw, path=path.name)


def write_raster(grid: ImageGrid, path: PathLike, bit_depth: int = 16) -> Path:
    """Encode a [0, 1] grid as an 8- or 16-bit grayscale PNG."""
    if bit_depth not in (8, 16):
        raise ImageFormatError(f"bit depth must be 8 or 16, got {bit_depth}")
    path = Path(path)
    scale, dtype = (255.0, np.uint8) if bit_depth == 8 else (65535.0, np.uint16)
    samples = np.round(np.clip(grid.data, 0.0, 1.0) * scale).astype(dtype)
    try:
        Image.fromarray(samples).save(path, format="PNG")
    except OSError as e:
        raise DatasetError(f"cannot write image: {e}", path=str(path)) from e
    return path


def image_files(directory: PathLike) -> List[Path]:
    """Image files of a set directory in lexicographic filename order."""
    directory = Path(directory)
    if not directory.is_dir():
        raise DatasetError("not a directory", path=str(directory))
    return sorted(
        (p for p in directory.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES),
        key=lambda p: p.name,
    )


def read_truth(path: PathLike, ids: Tuple[str, ...]) -> GroundTruth:
    """Parse a ``truth.json`` sidecar for the images ``ids``."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except (OSError, ValueError) as e:
        raise DatasetError(f"cannot parse sidecar: {e}", path=path.name) from e
    if not isinstance(raw, dict):
        raise DatasetError("sidecar must map filenames to [dx, dy]", path=path.name)
    offsets = []
    for name in ids:
        if name not in raw:
            raise DatasetError(f"sidecar has no entry for {name}", path=path.name)
        value = raw[name]
        if (
            not isinstance(value, list)
            or len(value) != 2
            or not all(isinstance(v, int) and not isinstance(v, bool) for v in value)
        ):
            raise DatasetError(
                f"entry for {name} must be [dx, dy] integers, got {value!r}",
                path=path.name,
            )
        offsets.append((value[0], value[1]))
    if offsets[0] != (0, 0):
        raise DatasetError(
            f"first image {ids[0]} must have shift [0, 0], got {list(offsets[0])}",
            path=path.name,
        )
    return GroundTruth(tuple(offsets), ids)


def load_set(directory: PathLike) -> Tuple[ImageSet, Optional[GroundTruth]]:
    """
    Load every image of ``directory`` plus its sidecar, if any.

    Image ids are the filenames. Errors name the offending file.
    """
    directory = Path(directory)
    files = image_files(directory)
    if len(files) < 2:
        raise DatasetError(
            f"a set needs at least 2 images, found {len(files)}", path=str(directory)
        )
    images = []
    for path in files:
        grid = read_raster(path)
        if images and grid.shape != images[0].shape:
            raise DimensionMismatchError(
                "image size differs from the first image",
                expected=images[0].shape,
                actual=grid.shape,
                path=path.name,
            )
        images.append(grid)
    ids = tuple(path.name for path in files)
    image_set = ImageSet(tuple(images), ids)

    truth = None
    truth_path = directory / TRUTH_FILE
    if truth_path.exists():
        truth = read_truth(truth_path, ids)
    logger.info(
        "loaded %d images of %dx%d from %s%s",
        image_set.n,
        image_set.width,
        image_set.height,
        directory,
        " with ground truth" if truth is not None else "",
    )
    return image_set, truth


def _filename(image_id: str) -> str:
    return image_id if Path(image_id).suffix.lower() == ".png" else f"{image_id}.png"


def save_set(
    image_set: ImageSet,
    truth: Optional[GroundTruth],
    directory: PathLike,
    bit_depth: int = 16,
) -> Path:
    """Write a set as PNG files plus ``truth.json``, reloadable by ``load_set``."""
    directory = Path(directory)
    try:
        directory.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise DatasetError(f"cannot create directory: {e}", path=str(directory)) from e
    names = [_filename(image_id) for image_id in image_set.ids]
    if sorted(names) != names:
        raise DatasetError(
            "image ids must sort in set order to survive a reload", path=str(directory)
        )
    for name, grid in zip(names, image_set.images):
        write_raster(grid, directory / name, bit_depth)
    if truth is not None:
        if truth.n != image_set.n:
            raise DatasetError(
                f"truth has {truth.n} offsets for {image_set.n} images",
                path=str(directory),
            )
        sidecar: Dict[str, List[int]] = {
            name: list(shift) for name, shift in zip(names, truth.offsets)
        }
        (directory / TRUTH_FILE).write_text(
            json.dumps(sidecar, indent=2, sort_keys=True) + "\n"
        )
    logger.info("wrote %d images to %s", image_set.n, directory)
    return directory
