"""Tests for ``python_setreg.core.graph``."""

import json
import unittest

import numpy as np
from python_proptest import Gen, for_all, matrix

from python_setreg.core.errors import ConfigError, DimensionMismatchError
from python_setreg.core.graph import (
    KFURTHEST,
    KNN,
    THRESHOLD_FAR,
    THRESHOLD_NEAR,
    ConstraintsGraph,
    GraphConfig,
    build_graph,
    distance_matrix,
    scheme_edges,
)
from python_setreg.core.image import ImageGrid, ImageSet, euclidean_distance
from tests_api.support.oracles import (
    knn_edges,
    random_distance_matrix,
    random_image,
    threshold_edges,
)


class TestGraphConfig(unittest.TestCase):
    """Validation of scheme selection and parameters."""

    def test_defaults_are_knn_and_kfurthest(self):
        """Test that the default graph is knn plus kfurthest with k = 3."""
        cfg = GraphConfig()
        self.assertEqual(cfg.scheme_list, frozenset({KNN, KFURTHEST}))
        self.assertEqual((cfg.k_near, cfg.k_far), (3, 3))

    @matrix(
        kwargs=[
            {"scheme_list": frozenset()},
            {"scheme_list": frozenset({"ring"})},
            {"k_near": 0},
            {"k_far": -1},
            {"scheme_list": frozenset({THRESHOLD_NEAR})},
            {"scheme_list": frozenset({THRESHOLD_FAR}), "d_thres2": 0.0},
        ]
    )
    def test_invalid_configs_rejected(self, kwargs):
        """Test that unknown, empty or unparameterized schemes raise ConfigError."""
        with self.assertRaises(ConfigError):
            GraphConfig(**kwargs)

    def test_k_larger_than_set_rejected(self):
        """Test that k of at least n raises when the graph is built."""
        with self.assertRaises(ConfigError):
            build_graph(random_distance_matrix(0, 3), GraphConfig(k_near=3, k_far=1))

    def test_for_set_size_clamps(self):
        """Test that neighbour counts clamp to n - 1 and stay put otherwise."""
        cfg = GraphConfig(k_near=3, k_far=5).for_set_size(3)
        self.assertEqual((cfg.k_near, cfg.k_far), (2, 2))
        self.assertEqual(GraphConfig().for_set_size(10), GraphConfig())

    def test_dict_round_trip(self):
        """Test that a config survives to_dict and from_dict."""
        cfg = GraphConfig(
            scheme_list=frozenset({KNN, THRESHOLD_FAR}), k_near=2, d_thres2=0.7
        )
        self.assertEqual(GraphConfig.from_dict(cfg.to_dict()), cfg)


class TestDistanceMatrix(unittest.TestCase):
    @for_all(Gen.int(min_value=0, max_value=10_000), num_runs=20)
    def test_matches_pairwise_euclidean(self, seed):
        """Test that the distance matrix matches pairwise Euclidean distances."""
        grids = tuple(ImageGrid(random_image(seed + k, 6, 5)) for k in range(4))
        dist = distance_matrix(ImageSet(grids))
        for i in range(4):
            for j in range(4):
                self.assertAlmostEqual(
                    dist[i, j], euclidean_distance(grids[i], grids[j]), delta=1e-12
                )
        np.testing.assert_array_equal(dist, dist.T)
        np.testing.assert_array_equal(np.diag(dist), 0.0)


class TestSchemes(unittest.TestCase):
    """Each elementary scheme against direct enumeration."""

    @for_all(
        Gen.int(min_value=0, max_value=10_000),
        Gen.int(min_value=2, max_value=12),
        Gen.bool(),
        num_runs=50,
    )
    def test_knn_and_kfurthest(self, seed, n, ties):
        """Test that neighbour schemes match direct enumeration for every k."""
        dist = random_distance_matrix(seed, n, ties)
        for k in range(1, n):
            cfg = GraphConfig(k_near=k, k_far=k)
            np.testing.assert_array_equal(
                scheme_edges(dist, KNN, cfg), knn_edges(dist, k, furthest=False)
            )
            np.testing.assert_array_equal(
                scheme_edges(dist, KFURTHEST, cfg), knn_edges(dist, k, furthest=True)
            )

    @for_all(
        Gen.int(min_value=0, max_value=10_000),
        Gen.int(min_value=2, max_value=12),
        Gen.float(min_value=0.05, max_value=1.0),
        num_runs=50,
    )
    def test_thresholds_are_symmetric(self, seed, n, threshold):
        """Test that threshold schemes match enumeration and are symmetric."""
        dist = random_distance_matrix(seed, n, ties=True)
        cfg = GraphConfig(
            scheme_list=frozenset({THRESHOLD_NEAR, THRESHOLD_FAR}),
            d_thres1=threshold,
            d_thres2=threshold,
        )
        near = scheme_edges(dist, THRESHOLD_NEAR, cfg)
        far = scheme_edges(dist, THRESHOLD_FAR, cfg)
        np.testing.assert_array_equal(near, threshold_edges(dist, threshold, True))
        np.testing.assert_array_equal(far, threshold_edges(dist, threshold, False))
        np.testing.assert_array_equal(near, near.T)
        np.testing.assert_array_equal(far, far.T)

    def test_knn_on_four_points_on_a_line(self):
        """Test that nearest and furthest neighbours of 0, 1, 3, 7 are as drawn."""
        points = np.array([0.0, 1.0, 3.0, 7.0])
        dist = np.abs(points[:, None] - points[None, :])
        cfg = GraphConfig(k_near=1, k_far=1)
        self.assertEqual(
            [list(np.nonzero(row)[0]) for row in scheme_edges(dist, KNN, cfg)],
            [[1], [0], [1], [2]],
        )
        self.assertEqual(
            [list(np.nonzero(row)[0]) for row in scheme_edges(dist, KFURTHEST, cfg)],
            [[3], [3], [3], [0]],
        )

    def test_equidistant_ties_go_to_lower_index(self):
        """Test that equal distances resolve to the lower image index."""
        dist = np.ones((4, 4)) - np.eye(4)
        edges = scheme_edges(dist, KNN, GraphConfig(k_near=1))
        self.assertEqual(list(np.nonzero(edges)[1]), [1, 0, 0, 0])


class TestBuildGraph(unittest.TestCase):
    """Union of schemes and graph helpers."""

    @for_all(
        Gen.int(min_value=0, max_value=10_000),
        Gen.int(min_value=2, max_value=12),
        num_runs=40,
    )
    def test_union_and_no_self_edges(self, seed, n):
        """Test that the graph is the union of its schemes without self-edges."""
        dist = random_distance_matrix(seed, n)
        k = min(3, n - 1)
        graph = build_graph(dist, GraphConfig(k_near=k, k_far=k))
        expected = knn_edges(dist, k, False) | knn_edges(dist, k, True)
        np.testing.assert_array_equal(graph.weights.astype(bool), expected)
        self.assertEqual(int(np.trace(graph.weights)), 0)
        self.assertEqual(graph.schemes, (KNN, KFURTHEST))

    def test_two_images_get_both_directions(self):
        """Test that a pair gets both ordered edges."""
        cfg = GraphConfig(k_near=1, k_far=1)
        graph = build_graph(random_distance_matrix(1, 2), cfg)
        self.assertEqual(graph.edges(), [(0, 1), (1, 0)])
        self.assertTrue(graph.is_symmetric())

    def test_isolated_node_is_reported(self):
        """Test that a node without edges is logged and forms its own component."""
        dist = np.array([[0.0, 1.0, 9.0], [1.0, 0.0, 9.0], [9.0, 9.0, 0.0]])
        cfg = GraphConfig(scheme_list=frozenset({THRESHOLD_NEAR}), d_thres1=2.0)
        with self.assertLogs("python_setreg.core.graph", level="WARNING") as logs:
            graph = build_graph(dist, cfg)
        self.assertEqual(graph.isolated_nodes(), [2])
        self.assertEqual(graph.components(), [[0, 1], [2]])
        self.assertIn("isolated", logs.output[0])

    def test_incident_and_out_degree(self):
        """Test that incident edges, out-degrees and components read off the weights."""
        weights = np.array([[0, 1, 0], [0, 0, 1], [1, 0, 0]])
        graph = ConstraintsGraph(weights, np.zeros((3, 3)))
        self.assertEqual(graph.incident(0), [(0, 1), (2, 0)])
        self.assertEqual(list(graph.out_degree()), [1, 1, 1])
        self.assertEqual(graph.components(), [[0, 1, 2]])
        self.assertFalse(graph.is_symmetric())

    def test_self_edge_rejected(self):
        """Test that a weight on the diagonal is rejected."""
        with self.assertRaises(ConfigError):
            ConstraintsGraph(np.eye(2), np.zeros((2, 2)))

    def test_non_square_distances_rejected(self):
        """Test that a non-square distance matrix is rejected."""
        with self.assertRaises(DimensionMismatchError):
            build_graph(np.zeros((2, 3)))

    def test_to_json(self):
        """Test that the JSON names nodes by id and lists the active edges."""
        cfg = GraphConfig(k_near=1, k_far=1)
        graph = build_graph(random_distance_matrix(2, 3), cfg)
        data = json.loads(graph.to_json(["a", "b", "c"]))
        self.assertEqual(data["nodes"], ["a", "b", "c"])
        self.assertEqual([tuple(e) for e in data["edges"]], graph.edges())


if __name__ == "__main__":
    unittest.main()
