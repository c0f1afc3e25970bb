"""
Constraints graph construction.

Nodes are the images of a set; a directed edge ``i -> j`` means the
correlation of ``zeta_i`` against ``zeta_j`` contributes to the fitness.
Four elementary schemes decide the edges from the pairwise Euclidean
distances of the raw images:

    knn             j is one of the k_near nearest images to i
    threshold_near  d(i, j) <= d_thres1
    kfurthest       j is one of the k_far furthest images from i
    threshold_far   d(i, j) >= d_thres2

Active schemes are combined by union. Self-edges never exist.
"""

import json
import logging
from dataclasses import dataclass, field, replace
from typing import Any, Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial.distance import pdist, squareform

from .errors import ConfigError, DimensionMismatchError
from .image import ImageSet

logger = logging.getLogger(__name__)

KNN = "knn"
THRESHOLD_NEAR = "threshold_near"
KFURTHEST = "kfurthest"
THRESHOLD_FAR = "threshold_far"

SCHEMES = (KNN, THRESHOLD_NEAR, KFURTHEST, THRESHOLD_FAR)


@dataclass(frozen=True)
class GraphConfig:
    """Which schemes build the graph, and their parameters."""

    scheme_list: FrozenSet[str] = field(
        default_factory=lambda: frozenset({KNN, KFURTHEST})
    )
    k_near: int = 3
    k_far: int = 3
    d_thres1: Optional[float] = None
    d_thres2: Optional[float] = None

    def __post_init__(self) -> None:
        schemes = frozenset(self.scheme_list)
        unknown = schemes - set(SCHEMES)
        if unknown:
            raise ConfigError(
                f"unknown graph scheme(s) {sorted(unknown)}; choose from {SCHEMES}"
            )
        if not schemes:
            raise ConfigError("at least one graph scheme must be active")
        object.__setattr__(self, "scheme_list", schemes)
        if KNN in schemes and self.k_near < 1:
            raise ConfigError(f"k_near must be at least 1, got {self.k_near}")
        if KFURTHEST in schemes and self.k_far < 1:
            raise ConfigError(f"k_far must be at least 1, got {self.k_far}")
        if THRESHOLD_NEAR in schemes and not (self.d_thres1 or 0) > 0:
            raise ConfigError(f"d_thres1 must be positive, got {self.d_thres1}")
        if THRESHOLD_FAR in schemes and not (self.d_thres2 or 0) > 0:
            raise ConfigError(f"d_thres2 must be positive, got {self.d_thres2}")

    def validate_for(self, n: int) -> None:
        """Check the neighbour counts against a set of ``n`` images."""
        if KNN in self.scheme_list and not 1 <= self.k_near <= n - 1:
            raise ConfigError(f"k_near must be in [1, {n - 1}] for n={n}")
        if KFURTHEST in self.scheme_list and not 1 <= self.k_far <= n - 1:
            raise ConfigError(f"k_far must be in [1, {n - 1}] for n={n}")

    def for_set_size(self, n: int) -> "GraphConfig":
        """Copy with neighbour counts clamped to ``n - 1``."""
        clamped = replace(
            self, k_near=min(self.k_near, n - 1), k_far=min(self.k_far, n - 1)
        )
        if clamped != self:
            logger.info(
                "clamped k_near=%d, k_far=%d to %d, %d for a set of %d images",
                self.k_near,
                self.k_far,
                clamped.k_near,
                clamped.k_far,
                n,
            )
        return clamped

    def to_dict(self) -> Dict[str, Any]:
        return {
            "schemes": sorted(self.scheme_list),
            "k_near": self.k_near,
            "k_far": self.k_far,
            "d_thres1": self.d_thres1,
            "d_thres2": self.d_thres2,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "GraphConfig":
        return cls(
            scheme_list=frozenset(data.get("schemes", (KNN, KFURTHEST))),
            k_near=int(data.get("k_near", 3)),
            k_far=int(data.get("k_far", 3)),
            d_thres1=data.get("d_thres1"),
            d_thres2=data.get("d_thres2"),
        )


@dataclass(frozen=True, eq=False)
class ConstraintsGraph:
    """Binary weight matrix ``w[i, j]`` over an image set, with its distances."""

    weights: np.ndarray
    distances: np.ndarray
    schemes: Tuple[str, ...] = ()

    def __post_init__(self) -> None:
        weights = np.array(self.weights, dtype=np.int8)
        if weights.ndim != 2 or weights.shape[0] != weights.shape[1]:
            raise DimensionMismatchError(
                f"weights must be square, got {weights.shape}"
            )
        if np.any(np.diag(weights) != 0):
            raise ConfigError("constraints graph must not contain self-edges")
        distances = np.array(self.distances, dtype=np.float64)
        weights.setflags(write=False)
        distances.setflags(write=False)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "distances", distances)

    @property
    def n(self) -> int:
        return int(self.weights.shape[0])

    def edges(self) -> List[Tuple[int, int]]:
        """Active ordered edges, row-major."""
        rows, cols = np.nonzero(self.weights)
        return [(int(i), int(j)) for i, j in zip(rows, cols)]

    def out_degree(self) -> np.ndarray:
        return self.weights.sum(axis=1)

    def incident(self, k: int) -> List[Tuple[int, int]]:
        """Edges with ``k`` at either end."""
        return [(i, j) for i, j in self.edges() if i == k or j == k]

    def isolated_nodes(self) -> List[int]:
        touching = self.weights.sum(axis=0) + self.weights.sum(axis=1)
        return [int(k) for k in np.nonzero(touching == 0)[0]]

    def components(self) -> List[List[int]]:
        """Weakly connected components, each sorted, ordered by smallest member."""
        _, labels = connected_components(
            csr_matrix(self.weights), directed=True, connection="weak"
        )
        groups: Dict[int, List[int]] = {}
        for node, label in enumerate(labels):
            groups.setdefault(int(label), []).append(node)
        return sorted(groups.values(), key=lambda members: members[0])

    def is_symmetric(self) -> bool:
        return bool(np.array_equal(self.weights, self.weights.T))

    def to_dict(self, ids: Optional[Sequence[str]] = None) -> Dict[str, Any]:
        ids = list(ids) if ids is not None else [str(k) for k in range(self.n)]
        return {
            "nodes": ids,
            "schemes": list(self.schemes),
            "edges": [[i, j] for i, j in self.edges()],
            "distances": self.distances.tolist(),
        }

    def to_json(self, ids: Optional[Sequence[str]] = None) -> str:
        return json.dumps(self.to_dict(ids), indent=2)


def distance_matrix(image_set: ImageSet) -> np.ndarray:
    """Pairwise Euclidean distances between the raw images of a set."""
    flat = np.stack([image.data.ravel() for image in image_set.images])
    return squareform(pdist(flat, metric="euclidean"))


def _ranked_neighbours(dist: np.ndarray, i: int, furthest: bool) -> List[int]:
    """Other nodes ordered by distance from ``i``; ties go to the lower index."""
    others = np.array([j for j in range(dist.shape[0]) if j != i])
    d = dist[i, others]
    order = np.lexsort((others, -d if furthest else d))
    return [int(j) for j in others[order]]


def scheme_edges(dist: np.ndarray, scheme: str, cfg: GraphConfig) -> np.ndarray:
    """Boolean edge matrix produced by one elementary scheme."""
    n = dist.shape[0]
    edges = np.zeros((n, n), dtype=bool)
    if scheme in (KNN, KFURTHEST):
        furthest = scheme == KFURTHEST
        k = cfg.k_far if furthest else cfg.k_near
        for i in range(n):
            for j in _ranked_neighbours(dist, i, furthest)[:k]:
                edges[i, j] = True
    elif scheme == THRESHOLD_NEAR:
        edges = dist <= cfg.d_thres1
    elif scheme == THRESHOLD_FAR:
        edges = dist >= cfg.d_thres2
    else:
        raise ConfigError(f"unknown graph scheme {scheme!r}")
    edges = np.array(edges, dtype=bool)
    np.fill_diagonal(edges, False)
    return edges


def build_graph(dist: np.ndarray, cfg: GraphConfig = GraphConfig()) -> ConstraintsGraph:
    """Union of the edges of every active scheme."""
    dist = np.asarray(dist, dtype=np.float64)
    if dist.ndim != 2 or dist.shape[0] != dist.shape[1]:
        raise DimensionMismatchError(
            f"distance matrix must be square, got {dist.shape}"
        )
    n = dist.shape[0]
    cfg.validate_for(n)
    weights = np.zeros((n, n), dtype=bool)
    for scheme in SCHEMES:
        if scheme in cfg.scheme_list:
            weights |= scheme_edges(dist, scheme, cfg)
    graph = ConstraintsGraph(
        weights=weights,
        distances=dist,
        schemes=tuple(s for s in SCHEMES if s in cfg.scheme_list),
    )
    logger.debug(
        "constraints graph: %d edges, out-degrees %s, symmetric=%s",
        len(graph.edges()),
        graph.out_degree().tolist(),
        graph.is_symmetric(),
    )
    isolated = graph.isolated_nodes()
    if isolated:
        logger.warning(
            "constraints graph leaves node(s) %s isolated; their offsets stay at 0",
            isolated,
        )
    return graph
