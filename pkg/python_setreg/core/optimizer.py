"""
Set-wide fitness and its coarse-to-fine maximization.

The fitness of per-image offsets ``dr_k`` is

    J = sum_{i,j} w[i, j] * rho_hat_ij(dr_i - dr_j)

and is maximized by discrete steepest ascent: at every step all unit
king-moves of every free variable are scored and the single best strictly
improving move is applied. Image 0 is the reference and never moves.
"""

import json
import logging
import time
from dataclasses import dataclass, field
from typing import (
    Any,
    Callable,
    Dict,
    List,
    Mapping,
    NamedTuple,
    Optional,
    Sequence,
    Set,
    Tuple,
)

from .correlation import (
    CorrelationConfig,
    CorrelationTable,
    Edge,
    Shift,
    build_tables,
)
from .errors import ConfigError, MissingTableError
from .graph import ConstraintsGraph, GraphConfig, build_graph, distance_matrix
from .image import ImageSet
from .representation import PyramidSchedule, Representation, representations

logger = logging.getLogger(__name__)

# N, NE, E, SE, S, SW, W, NW with y growing downwards; order breaks ties
MOVES: Tuple[Shift, ...] = (
    (0, -1),
    (1, -1),
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
    (-1, 0),
    (-1, -1),
)

DEFAULT_MAX_ITERATIONS = 10_000

Tables = Mapping[Edge, CorrelationTable]
LevelObserver = Callable[
    [float, List[Representation], Dict[Edge, CorrelationTable]], None
]


@dataclass(frozen=True)
class OptimizerConfig:
    """Schedule and stopping rule of the ascent."""

    schedule: PyramidSchedule = field(default_factory=PyramidSchedule)
    max_iterations_per_level: int = DEFAULT_MAX_ITERATIONS
    min_gain: float = 1e-12

    def __post_init__(self) -> None:
        if self.max_iterations_per_level < 1:
            raise ConfigError(
                "max_iterations_per_level must be at least 1, "
                f"got {self.max_iterations_per_level}"
            )
        if self.min_gain < 0:
            raise ConfigError(f"min_gain must be nonnegative, got {self.min_gain}")

    @property
    def neighborhood(self) -> Tuple[Shift, ...]:
        return MOVES

    def to_dict(self) -> Dict[str, Any]:
        return {
            "sigmas": list(self.schedule.sigmas),
            "max_iterations_per_level": self.max_iterations_per_level,
            "min_gain": self.min_gain,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "OptimizerConfig":
        return cls(
            schedule=PyramidSchedule(
                tuple(data.get("sigmas", PyramidSchedule().sigmas))
            ),
            max_iterations_per_level=int(
                data.get("max_iterations_per_level", DEFAULT_MAX_ITERATIONS)
            ),
            min_gain=float(data.get("min_gain", 1e-12)),
        )


@dataclass(frozen=True)
class LevelTrace:
    """What happened at one filter width."""

    sigma: float
    iterations: int
    fitness: float
    converged: bool
    history: Tuple[float, ...] = ()
    representation_ms: float = 0.0
    tables_ms: float = 0.0
    ascent_ms: float = 0.0

    def to_dict(self, timings: bool = True) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "sigma": self.sigma,
            "iterations": self.iterations,
            "fitness": self.fitness,
            "converged": self.converged,
        }
        if timings:
            data["representation_ms"] = round(self.representation_ms, 3)
            data["tables_ms"] = round(self.tables_ms, 3)
            data["ascent_ms"] = round(self.ascent_ms, 3)
        return data


@dataclass(frozen=True)
class RegistrationSolution:
    """Recovered offsets relative to image 0, final fitness and level trace."""

    offsets: Tuple[Shift, ...]
    fitness: float
    trace: Tuple[LevelTrace, ...] = ()
    components: Tuple[Tuple[int, ...], ...] = ()
    graph: Optional[ConstraintsGraph] = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        offsets = tuple((int(dx), int(dy)) for dx, dy in self.offsets)
        if offsets and offsets[0] != (0, 0):
            raise ConfigError(f"reference offset must be (0, 0), got {offsets[0]}")
        object.__setattr__(self, "offsets", offsets)

    @property
    def n(self) -> int:
        return len(self.offsets)

    def relative_offsets(self) -> Dict[Tuple[int, int], Shift]:
        """``dr_i - dr_j`` for every ordered pair ``i != j``."""
        return {
            (i, j): (a[0] - b[0], a[1] - b[1])
            for i, a in enumerate(self.offsets)
            for j, b in enumerate(self.offsets)
            if i != j
        }

    def stage_ms(self) -> Dict[str, float]:
        return {
            "representation": sum(level.representation_ms for level in self.trace),
            "tables": sum(level.tables_ms for level in self.trace),
            "ascent": sum(level.ascent_ms for level in self.trace),
        }

    def to_dict(self, ids: Optional[Sequence[str]] = None, timings: bool = True):
        ids = list(ids) if ids is not None else [str(k) for k in range(self.n)]
        return {
            "offsets": {name: list(shift) for name, shift in zip(ids, self.offsets)},
            "fitness": self.fitness,
            "trace": [level.to_dict(timings) for level in self.trace],
            "components": [list(c) for c in self.components],
        }

    def to_json(self, ids: Optional[Sequence[str]] = None, timings: bool = True) -> str:
        return json.dumps(self.to_dict(ids, timings), indent=2)


class AscentResult(NamedTuple):
    offsets: Tuple[Shift, ...]
    iterations: int
    fitness: float
    converged: bool
    history: Tuple[float, ...]


def _table(tables: Tables, edge: Edge) -> CorrelationTable:
    try:
        return tables[edge]
    except KeyError:
        raise MissingTableError(edge) from None


def _relative(offsets: Sequence[Shift], i: int, j: int) -> Shift:
    return (offsets[i][0] - offsets[j][0], offsets[i][1] - offsets[j][1])


def fitness(
    offsets: Sequence[Shift], graph: ConstraintsGraph, tables: Tables
) -> float:
    """``J = sum w[i, j] * lookup(table(i, j), dr_i - dr_j)`` over active edges."""
    if len(offsets) != graph.n:
        raise ConfigError(f"{len(offsets)} offsets given for {graph.n} images")
    total = 0.0
    for i, j in graph.edges():
        total += _table(tables, (i, j)).lookup(_relative(offsets, i, j))
    return total


class _AscentState:
    """Offsets plus the current value of every edge term."""

    def __init__(
        self, offsets: Sequence[Shift], graph: ConstraintsGraph, tables: Tables
    ):
        self.offsets: List[Shift] = [(int(dx), int(dy)) for dx, dy in offsets]
        self.edges = graph.edges()
        self.tables = {edge: _table(tables, edge) for edge in self.edges}
        self.values = {
            edge: self.tables[edge].lookup(_relative(self.offsets, *edge))
            for edge in self.edges
        }
        self.incident: Dict[int, List[Edge]] = {
            k: graph.incident(k) for k in range(graph.n)
        }

    def term(self, edge: Edge, k: int, shift: Shift) -> float:
        """Value of ``edge`` if variable ``k`` were at ``shift``."""
        i, j = edge
        a = shift if i == k else self.offsets[i]
        b = shift if j == k else self.offsets[j]
        return self.tables[edge].lookup((a[0] - b[0], a[1] - b[1]))

    def gain(self, k: int, shift: Shift) -> float:
        return sum(
            self.term(edge, k, shift) - self.values[edge] for edge in self.incident[k]
        )

    def best_move(self, k: int, bound: int) -> Tuple[float, Optional[Shift]]:
        x, y = self.offsets[k]
        best_gain, best_shift = 0.0, None
        for mx, my in MOVES:
            candidate = (x + mx, y + my)
            if abs(candidate[0]) > bound or abs(candidate[1]) > bound:
                continue
            g = self.gain(k, candidate)
            if best_shift is None or g > best_gain:
                best_gain, best_shift = g, candidate
        return best_gain, best_shift

    def apply(self, k: int, shift: Shift) -> None:
        self.offsets[k] = shift
        for edge in self.incident[k]:
            self.values[edge] = self.tables[edge].lookup(_relative(self.offsets, *edge))

    def neighbours(self, k: int) -> Set[int]:
        return {i for edge in self.incident[k] for i in edge}


def _max_shift(tables: Tables) -> int:
    for table in tables.values():
        return table.max_shift
    return CorrelationConfig().max_shift


def ascend_level(
    offsets: Sequence[Shift],
    graph: ConstraintsGraph,
    tables: Tables,
    cfg: OptimizerConfig = OptimizerConfig(),
) -> AscentResult:
    """
    Greedy best-single-move ascent from ``offsets`` until no unit move helps.

    Moves that would take a variable beyond the tables' ``max_shift`` are not
    considered. Ties go to the lowest variable index, then to the first
    direction in ``MOVES``.
    """
    state = _AscentState(offsets, graph, tables)
    bound = _max_shift(tables)
    current = fitness(state.offsets, graph, tables)
    history = [current]
    free = range(1, graph.n)

    # best move per variable; only variables sharing an edge with the last
    # moved one need rescoring
    cache: Dict[int, Tuple[float, Optional[Shift]]] = {
        k: state.best_move(k, bound) for k in free
    }
    iterations = 0
    converged = False
    while True:
        chosen: Optional[int] = None
        chosen_gain = cfg.min_gain
        for k in free:
            g, shift = cache[k]
            if shift is not None and g > chosen_gain:
                chosen, chosen_gain = k, g
        if chosen is None:
            converged = True
            break
        if iterations >= cfg.max_iterations_per_level:
            break
        shift = cache[chosen][1]
        assert shift is not None
        state.apply(chosen, shift)
        current += chosen_gain
        history.append(current)
        iterations += 1
        logger.debug(
            "move %d: image %d -> %s (gain %.6g)",
            iterations,
            chosen,
            shift,
            chosen_gain,
        )
        for k in state.neighbours(chosen):
            if k != 0:
                cache[k] = state.best_move(k, bound)

    if not converged:
        logger.warning(
            "ascent stopped at the iteration cap (%d) before converging",
            cfg.max_iterations_per_level,
        )
    return AscentResult(
        offsets=tuple(state.offsets),
        iterations=iterations,
        fitness=fitness(state.offsets, graph, tables),
        converged=converged,
        history=tuple(history),
    )


def _elapsed_ms(started: float) -> float:
    return 1000.0 * (time.perf_counter() - started)


def register_set(
    image_set: ImageSet,
    gcfg: GraphConfig = GraphConfig(),
    ocfg: OptimizerConfig = OptimizerConfig(),
    ccfg: CorrelationConfig = CorrelationConfig(),
    on_level: Optional[LevelObserver] = None,
) -> RegistrationSolution:
    """
    Register a set coarse to fine.

    At every filter width of the schedule the representations and the
    tables of all active edges are rebuilt, and the ascent is warm-started
    from the previous level's offsets.
    """
    ccfg.check_size(image_set.width, image_set.height)
    graph = build_graph(distance_matrix(image_set), gcfg.for_set_size(image_set.n))
    components = graph.components()
    if len(components) > 1:
        logger.warning(
            "constraints graph has %d components %s; offsets of components "
            "without image 0 are relative to themselves",
            len(components),
            components,
        )

    offsets: Tuple[Shift, ...] = tuple((0, 0) for _ in range(image_set.n))
    trace: List[LevelTrace] = []
    tables: Dict[Edge, CorrelationTable] = {}
    for sigma in ocfg.schedule:
        started = time.perf_counter()
        reps = representations(image_set, sigma)
        representation_ms = _elapsed_ms(started)

        started = time.perf_counter()
        tables = build_tables(reps, graph.edges(), ccfg)
        tables_ms = _elapsed_ms(started)

        if on_level is not None:
            on_level(sigma, reps, tables)

        started = time.perf_counter()
        result = ascend_level(offsets, graph, tables, ocfg)
        ascent_ms = _elapsed_ms(started)

        offsets = result.offsets
        trace.append(
            LevelTrace(
                sigma=sigma,
                iterations=result.iterations,
                fitness=result.fitness,
                converged=result.converged,
                history=result.history,
                representation_ms=representation_ms,
                tables_ms=tables_ms,
                ascent_ms=ascent_ms,
            )
        )
        logger.info(
            "sigma=%g: %d moves, J=%.6f (%.0f ms)",
            sigma,
            result.iterations,
            result.fitness,
            representation_ms + tables_ms + ascent_ms,
        )

    return RegistrationSolution(
        offsets=offsets,
        fitness=fitness(offsets, graph, tables),
        trace=tuple(trace),
        components=tuple(tuple(c) for c in components),
        graph=graph,
    )
