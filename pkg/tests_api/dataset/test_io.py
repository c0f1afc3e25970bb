"""Tests for reading and writing image sets."""

import json
import tempfile
import unittest
from pathlib import Path

import numpy as np
from PIL import Image
from python_proptest import matrix

from python_setreg.core.errors import (
    DatasetError,
    DimensionMismatchError,
    ImageFormatError,
)
from python_setreg.core.image import ImageGrid, ImageSet
from python_setreg.dataset.io import (
    TRUTH_FILE,
    image_files,
    load_set,
    read_raster,
    read_truth,
    save_set,
    write_raster,
)
from python_setreg.dataset.synthetic import (
    GroundTruth,
    generate_set,
    mosaic_texture,
    value_noise_texture,
)


class _TempDirTestCase(unittest.TestCase):
    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self._tmp.name)

    def tearDown(self):
        self._tmp.cleanup()


class TestRasters(_TempDirTestCase):
    """Single-file decoding."""

    @matrix(bit_depth=[8, 16])
    def test_write_then_read_quantizes(self, bit_depth):
        """Test that a written raster reads back quantized to its bit depth."""
        grid = value_noise_texture(20, 12, seed=3)
        path = write_raster(grid, self.dir / "a.png", bit_depth)
        scale = 255.0 if bit_depth == 8 else 65535.0
        np.testing.assert_allclose(
            read_raster(path).data, np.round(grid.data * scale) / scale, atol=1e-12
        )

    def test_rgb_png_reduced_to_luma(self):
        """Test that an RGB PNG is reduced with the luma weights."""
        pixels = np.zeros((2, 2, 3), dtype=np.uint8)
        pixels[..., 1] = 255
        Image.fromarray(pixels).save(self.dir / "rgb.png")
        np.testing.assert_allclose(read_raster(self.dir / "rgb.png").data, 0.587)

    def test_pgm_is_read(self):
        """Test that PGM files decode like PNG."""
        Image.fromarray(np.full((3, 4), 51, dtype=np.uint8)).save(self.dir / "a.pgm")
        grid = read_raster(self.dir / "a.pgm")
        self.assertEqual(grid.shape, (4, 3))
        np.testing.assert_allclose(grid.data, 0.2)

    def test_undecodable_file_names_itself(self):
        """Test that a corrupt file raises with its name."""
        (self.dir / "broken.png").write_bytes(b"not an image")
        with self.assertRaises(ImageFormatError) as ctx:
            read_raster(self.dir / "broken.png")
        self.assertEqual(ctx.exception.path, "broken.png")

    def test_invalid_bit_depth(self):
        """Test that bit depths other than 8 and 16 are rejected."""
        with self.assertRaises(ImageFormatError):
            write_raster(ImageGrid.constant(2, 2, 0.5), self.dir / "a.png", 12)


class TestSetDirectories(_TempDirTestCase):
    """Whole sets with their ground-truth sidecar."""

    def test_save_then_load(self):
        """Test that a saved set loads back with ids, truth and pixels intact."""
        image_set, truth = generate_set(mosaic_texture(40, 40, cell_size=16.0), 3, 4)
        save_set(image_set, truth, self.dir)
        loaded, loaded_truth = load_set(self.dir)
        self.assertEqual(loaded.ids, image_set.ids)
        self.assertEqual(loaded_truth.offsets, truth.offsets)
        for a, b in zip(loaded.images, image_set.images):
            np.testing.assert_allclose(a.data, b.data, atol=1.0 / 65535)

    def test_sidecar_format(self):
        """Test that truth.json maps filenames to offsets and ends in a newline."""
        grids = (ImageGrid.constant(4, 4, 0.0), ImageGrid.constant(4, 4, 1.0))
        save_set(ImageSet(grids, ("b", "c")), GroundTruth(((0, 0), (3, -2))), self.dir)
        text = (self.dir / TRUTH_FILE).read_text()
        self.assertTrue(text.endswith("\n"))
        self.assertEqual(json.loads(text), {"b.png": [0, 0], "c.png": [3, -2]})

    def test_set_without_sidecar(self):
        """Test that a set saved without truth loads with none."""
        grids = (ImageGrid.constant(4, 4, 0.0), ImageGrid.constant(4, 4, 1.0))
        save_set(ImageSet(grids, ("a", "b")), None, self.dir)
        _, truth = load_set(self.dir)
        self.assertIsNone(truth)

    def test_ids_out_of_order_rejected(self):
        """Test that ids whose files would sort differently are rejected."""
        grids = (ImageGrid.constant(4, 4, 0.0), ImageGrid.constant(4, 4, 1.0))
        with self.assertRaises(DatasetError):
            save_set(ImageSet(grids, ("z", "a")), None, self.dir)

    def test_files_ordered_by_name_and_others_ignored(self):
        """Test that images are listed by name and other files skipped."""
        for name in ("b.png", "a.pgm", "c.PNG"):
            write_raster(ImageGrid.constant(3, 3, 0.5), self.dir / name, 8)
        (self.dir / "notes.txt").write_text("ignored")
        names = [p.name for p in image_files(self.dir)]
        self.assertEqual(names, ["a.pgm", "b.png", "c.PNG"])

    def test_size_mismatch_names_file(self):
        """Test that the first differently sized image is named."""
        write_raster(ImageGrid.constant(4, 4, 0.5), self.dir / "a.png")
        write_raster(ImageGrid.constant(5, 4, 0.5), self.dir / "b.png")
        with self.assertRaises(DimensionMismatchError) as ctx:
            load_set(self.dir)
        self.assertEqual(ctx.exception.path, "b.png")

    def test_single_image_rejected(self):
        """Test that a directory with one image is not a set."""
        write_raster(ImageGrid.constant(4, 4, 0.5), self.dir / "a.png")
        with self.assertRaises(DatasetError):
            load_set(self.dir)

    def test_missing_directory(self):
        """Test that an absent directory raises DatasetError."""
        with self.assertRaises(DatasetError):
            load_set(self.dir / "absent")


class TestReadTruth(_TempDirTestCase):
    """Validation of ``truth.json``."""

    IDS = ("a.png", "b.png")

    def _read(self, payload):
        path = self.dir / TRUTH_FILE
        path.write_text(payload if isinstance(payload, str) else json.dumps(payload))
        return read_truth(path, self.IDS)

    def test_valid(self):
        """Test that listed ids are read in order and extras ignored."""
        truth = self._read({"a.png": [0, 0], "b.png": [-4, 7], "extra.png": [1, 1]})
        self.assertEqual(truth.offsets, ((0, 0), (-4, 7)))

    @matrix(
        payload=[
            {"a.png": [0, 0]},
            {"a.png": [0, 0], "b.png": [1.5, 2]},
            {"a.png": [0, 0], "b.png": [1]},
            {"a.png": [0, 0], "b.png": [True, 0]},
            {"a.png": [1, 0], "b.png": [0, 0]},
            [[0, 0], [1, 1]],
            "{not json",
        ]
    )
    def test_invalid_sidecars(self, payload):
        """Test that malformed sidecars raise with the sidecar's name."""
        with self.assertRaises(DatasetError) as ctx:
            self._read(payload)
        self.assertEqual(ctx.exception.path, TRUTH_FILE)


if __name__ == "__main__":
    unittest.main()
