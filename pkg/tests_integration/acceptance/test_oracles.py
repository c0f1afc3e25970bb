"""
Large-sample agreement with brute-force references.

These run the same checks as the unit tests on many more random inputs:
transform-based correlation against explicit summation, the invariances of
the high-pass representation, and every graph scheme against enumeration.
"""

import unittest

import numpy as np
import pytest

from python_setreg.core.correlation import build_table, cross_correlate_full
from python_setreg.core.graph import (
    KFURTHEST,
    KNN,
    THRESHOLD_FAR,
    THRESHOLD_NEAR,
    GraphConfig,
    scheme_edges,
)
from python_setreg.core.image import ImageGrid
from python_setreg.core.representation import DEFAULT_SIGMAS, abs_highpass
from tests_api.support.oracles import (
    dyadic_image,
    knn_edges,
    overlap_energies,
    random_distance_matrix,
    random_image,
    spatial_correlation,
    threshold_edges,
)


@pytest.mark.slow
@pytest.mark.integration
class TestCorrelationAgainstSpatialSums(unittest.TestCase):
    def test_fifty_representation_pairs(self):
        """Test that surfaces and denominators match spatial sums on 50 pairs."""
        for seed in range(50):
            a = abs_highpass(ImageGrid(random_image(seed, 16, 16)), 3.0).data
            b = abs_highpass(ImageGrid(random_image(seed + 1000, 16, 16)), 3.0).data
            full = cross_correlate_full(a, b)
            table = build_table(a, b, max_shift=15)
            for dy in range(-15, 16):
                for dx in range(-15, 16):
                    self.assertAlmostEqual(
                        full[dy + 15, dx + 15],
                        spatial_correlation(a, b, dx, dy),
                        delta=1e-6,
                    )
                    ea, eb = overlap_energies(a, b, dx, dy)
                    expected = np.sqrt(ea * eb)
                    self.assertAlmostEqual(
                        table.denominator_at((dx, dy)),
                        expected,
                        delta=1e-9 * expected,
                    )


@pytest.mark.integration
class TestRepresentationInvariants(unittest.TestCase):
    def test_hundred_images_every_sigma(self):
        """Test that polarity, offset and flat-image invariances hold at every width."""
        for seed in range(100):
            image = ImageGrid(dyadic_image(seed, 40, 32))
            shifted = image + (seed % 7 - 3) * 0.125
            for sigma in DEFAULT_SIGMAS:
                rep = abs_highpass(image, sigma)
                self.assertTrue(rep.grid.equals(abs_highpass(1.0 - image, sigma).grid))
                np.testing.assert_allclose(
                    abs_highpass(shifted, sigma).data, rep.data, atol=1e-9
                )
                flat = ImageGrid.constant(40, 32, (seed % 256) / 256)
                self.assertEqual(float(abs_highpass(flat, sigma).data.max()), 0.0)


@pytest.mark.integration
class TestGraphSchemesAgainstEnumeration(unittest.TestCase):
    def test_hundred_distance_matrices(self):
        """Test that every scheme matches enumeration on 100 distance matrices."""
        rng = np.random.default_rng(2024)
        for seed in range(100):
            n = int(rng.integers(2, 13))
            dist = random_distance_matrix(seed, n, ties=seed % 2 == 0)
            k = int(rng.integers(1, n))
            threshold = float(rng.uniform(0.1, 0.9))
            cfg = GraphConfig(
                scheme_list=frozenset({KNN, KFURTHEST, THRESHOLD_NEAR, THRESHOLD_FAR}),
                k_near=k,
                k_far=k,
                d_thres1=threshold,
                d_thres2=threshold,
            )
            expected = {
                KNN: knn_edges(dist, k, furthest=False),
                THRESHOLD_NEAR: threshold_edges(dist, threshold, near=True),
                KFURTHEST: knn_edges(dist, k, furthest=True),
                THRESHOLD_FAR: threshold_edges(dist, threshold, near=False),
            }
            for scheme, edges in expected.items():
                got = scheme_edges(dist, scheme, cfg)
                np.testing.assert_array_equal(got, edges)
                if scheme in (THRESHOLD_NEAR, THRESHOLD_FAR):
                    np.testing.assert_array_equal(got, got.T)


if __name__ == "__main__":
    unittest.main()
