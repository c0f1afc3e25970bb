"""Slow, obviously-correct reference implementations used by the tests."""

import itertools
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from python_setreg.core.correlation import SENTINEL
from python_setreg.core.graph import ConstraintsGraph
from python_setreg.core.image import ImageGrid
from python_setreg.core.representation import gaussian_blur, make_kernel

Shift = Tuple[int, int]


def random_image(seed: int, width: int, height: int) -> np.ndarray:
    return np.random.default_rng(seed).random((height, width))


def dyadic_image(seed: int, width: int, height: int) -> np.ndarray:
    """Samples ``k / 256``, so ``1 - I`` is exact in binary floating point."""
    rng = np.random.default_rng(seed)
    return rng.integers(0, 257, size=(height, width)) / 256.0


def overlap_slices(w: int, h: int, dx: int, dy: int):
    """Index windows of the fixed and moving grids for shift ``(dx, dy)``."""
    fixed = (
        slice(max(0, -dy), h - max(0, dy)),
        slice(max(0, -dx), w - max(0, dx)),
    )
    moving = (
        slice(max(0, dy), h + min(0, dy)),
        slice(max(0, dx), w + min(0, dx)),
    )
    return fixed, moving


def spatial_correlation(a: np.ndarray, b: np.ndarray, dx: int, dy: int) -> float:
    """``sum_r a(r) b(r + d)`` by an explicit double loop."""
    h, w = a.shape
    total = 0.0
    for y in range(h):
        for x in range(w):
            yy, xx = y + dy, x + dx
            if 0 <= yy < h and 0 <= xx < w:
                total += a[y, x] * b[yy, xx]
    return total


def overlap_energies(a: np.ndarray, b: np.ndarray, dx: int, dy: int):
    h, w = a.shape
    fixed, moving = overlap_slices(w, h, dx, dy)
    return float(np.sum(a[fixed] ** 2)), float(np.sum(b[moving] ** 2))


def spatial_ncc(
    a: np.ndarray,
    b: np.ndarray,
    dx: int,
    dy: int,
    max_shift: int,
    min_overlap_frac: float = 0.25,
    energy_floor: float = 1e-12,
) -> float:
    h, w = a.shape
    if abs(dx) > max_shift or abs(dy) > max_shift:
        return SENTINEL
    if (w - abs(dx)) * (h - abs(dy)) < min_overlap_frac * w * h:
        return SENTINEL
    ea, eb = overlap_energies(a, b, dx, dy)
    if ea < energy_floor or eb < energy_floor:
        return 0.0
    fixed, moving = overlap_slices(w, h, dx, dy)
    value = float(np.sum(a[fixed] * b[moving])) / np.sqrt(ea * eb)
    return min(max(value, 0.0), 1.0)


def spatial_fitness(
    reps: Sequence[np.ndarray],
    graph: ConstraintsGraph,
    offsets: Sequence[Shift],
    max_shift: int,
    min_overlap_frac: float = 0.25,
) -> float:
    total = 0.0
    for i, j in graph.edges():
        dx = offsets[i][0] - offsets[j][0]
        dy = offsets[i][1] - offsets[j][1]
        total += spatial_ncc(reps[i], reps[j], dx, dy, max_shift, min_overlap_frac)
    return total


def exhaustive_optimum(
    n: int, radius: int, evaluate
) -> Tuple[float, List[Shift]]:
    """Maximize ``evaluate(offsets)`` over ``[-radius, radius]**2`` per free image."""
    lattice = [
        (dx, dy)
        for dy in range(-radius, radius + 1)
        for dx in range(-radius, radius + 1)
    ]
    best_value, best_offsets = -np.inf, []
    for free in itertools.product(lattice, repeat=n - 1):
        offsets = [(0, 0)] + list(free)
        value = evaluate(offsets)
        if value > best_value:
            best_value, best_offsets = value, offsets
    return float(best_value), best_offsets


def softened_triple(
    field: np.ndarray,
    truth: Sequence[Shift],
    margin: int,
    size: int,
    sigma: float = 2.0,
) -> List[np.ndarray]:
    """
    Square crops of ``field`` at ``margin + truth``; every view after the
    first is cut from a blurred copy.

    Two views cut from the same sharp field correlate exactly as well as
    each does with the reference, so a pair stuck one pixel off together
    has nothing to choose between moves. Blurring both keeps their mutual
    peak wider than their peaks against the sharp reference.
    """
    sharp = ImageGrid(field)
    soft = gaussian_blur(sharp, make_kernel(sigma))
    return [
        (sharp if k == 0 else soft).crop(margin + dx, margin + dy, size, size).data
        for k, (dx, dy) in enumerate(truth)
    ]


def knn_edges(dist: np.ndarray, k: int, furthest: bool) -> np.ndarray:
    """k nearest (or furthest) neighbours by sorting ``(distance, index)`` pairs."""
    n = dist.shape[0]
    edges = np.zeros((n, n), dtype=bool)
    for i in range(n):
        ranked = sorted(
            (j for j in range(n) if j != i),
            key=lambda j: ((-dist[i, j]) if furthest else dist[i, j], j),
        )
        for j in ranked[:k]:
            edges[i, j] = True
    return edges


def threshold_edges(dist: np.ndarray, threshold: float, near: bool) -> np.ndarray:
    n = dist.shape[0]
    edges = np.zeros((n, n), dtype=bool)
    for i in range(n):
        for j in range(n):
            if i != j:
                d = dist[i, j]
                edges[i, j] = d <= threshold if near else d >= threshold
    return edges


def random_distance_matrix(seed: int, n: int, ties: bool = False) -> np.ndarray:
    """Symmetric, zero-diagonal matrix; ``ties`` rounds values so duplicates occur."""
    rng = np.random.default_rng(seed)
    upper = rng.random((n, n))
    if ties:
        upper = np.round(upper * 4) / 4
    dist = np.triu(upper, 1)
    return dist + dist.T


def pairwise_errors(
    recovered: Sequence[Shift], truth: Sequence[Shift]
) -> Dict[Tuple[int, int], float]:
    n = len(truth)
    out = {}
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            ex = (recovered[i][0] - recovered[j][0]) - (truth[i][0] - truth[j][0])
            ey = (recovered[i][1] - recovered[j][1]) - (truth[i][1] - truth[j][1])
            out[(i, j)] = (ex * ex + ey * ey) ** 0.5
    return out


def shifted_pair(
    seed: int, size: int, shift: Shift, margin: Optional[int] = None
) -> Tuple[np.ndarray, np.ndarray]:
    """Two crops of one random field, the second one displaced by ``shift``."""
    margin = max(abs(shift[0]), abs(shift[1])) if margin is None else margin
    field = random_image(seed, size + 2 * margin, size + 2 * margin)
    a = field[margin : margin + size, margin : margin + size]
    ox, oy = margin + shift[0], margin + shift[1]
    b = field[oy : oy + size, ox : ox + size]
    return a, b


def naive_blur(data: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Direct 2D correlation with the outer-product kernel, edges replicated."""
    h, w = data.shape
    r = len(weights) // 2
    out = np.zeros((h, w))
    for y in range(h):
        for x in range(w):
            total = 0.0
            for v in range(-r, r + 1):
                for u in range(-r, r + 1):
                    yy = min(max(y + v, 0), h - 1)
                    xx = min(max(x + u, 0), w - 1)
                    total += weights[v + r] * weights[u + r] * data[yy, xx]
            out[y, x] = total
    return out
