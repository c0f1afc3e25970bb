"""
Machine-readable outputs of the command-line tool.

``register`` writes one JSON ``RunReport`` per set. ``eval`` writes one CSV
row per set, sorted by set id, followed by an aggregate footer row:

    set_id               directory name of the set ("ALL" on the footer)
    n                    number of images registered
    mean_error           mean pair-wise error in pixels (needs truth.json)
    baseline_error       mean pair-wise error of the baseline offsets
    error_reduction_pct  100 * (1 - mean_error / baseline_error)
    fitness              final fitness J
    representation_ms    time spent filtering, summed over levels
    tables_ms            time spent building correlation tables
    ascent_ms            time spent in the ascent
    total_ms             sum of the three stages
    error                "Type: message" when the set failed, else empty

Cells without a value are left empty.
"""

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, TextIO

import numpy as np

from ..core.correlation import CorrelationConfig
from ..core.graph import GraphConfig
from ..core.image import ImageSet
from ..core.optimizer import OptimizerConfig, RegistrationSolution
from ..core.outcome import Outcome
from ..dataset.metrics import pairwise_error_stats, registration_error
from ..dataset.synthetic import GroundTruth

EVAL_COLUMNS = (
    "set_id",
    "n",
    "mean_error",
    "baseline_error",
    "error_reduction_pct",
    "fitness",
    "representation_ms",
    "tables_ms",
    "ascent_ms",
    "total_ms",
    "error",
)

SWEEP_COLUMNS = ("k", "mean_error", "std_error", "fitness")

FOOTER_ID = "ALL"


@dataclass
class RunReport:
    """Everything one ``register`` run produced, plus the config that produced it."""

    set_id: str
    n: int
    ids: List[str]
    config: Dict[str, Any]
    offsets: Dict[str, List[int]]
    fitness: float
    trace: List[Dict[str, Any]]
    timings_ms: Dict[str, float]
    errors: Optional[Dict[str, Any]] = None
    components: List[List[int]] = field(default_factory=list)

    @property
    def mean_error(self) -> Optional[float]:
        return None if self.errors is None else self.errors["mean"]

    def to_dict(self, timings: bool = True) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "set_id": self.set_id,
            "n": self.n,
            "ids": self.ids,
            "config": self.config,
            "offsets": self.offsets,
            "fitness": self.fitness,
            "trace": self.trace
            if timings
            else [
                {k: v for k, v in level.items() if not k.endswith("_ms")}
                for level in self.trace
            ],
            "components": self.components,
        }
        if self.errors is not None:
            data["errors"] = self.errors
        if timings:
            data["timings_ms"] = self.timings_ms
        return data

    def to_json(self, timings: bool = True) -> str:
        return json.dumps(self.to_dict(timings), indent=2) + "\n"


def config_echo(
    gcfg: GraphConfig,
    ocfg: OptimizerConfig,
    ccfg: CorrelationConfig,
    subset: Optional[int] = None,
) -> Dict[str, Any]:
    return {
        "graph": gcfg.to_dict(),
        "optimizer": ocfg.to_dict(),
        "correlation": ccfg.to_dict(),
        "subset": subset,
    }


def build_report(
    set_id: str,
    image_set: ImageSet,
    solution: RegistrationSolution,
    truth: Optional[GroundTruth],
    config: Dict[str, Any],
) -> RunReport:
    stages = solution.stage_ms()
    timings = {name: round(ms, 3) for name, ms in stages.items()}
    timings["total"] = round(sum(stages.values()), 3)
    errors = None
    if truth is not None:
        mean, pairs = registration_error(solution, truth)
        _, std = pairwise_error_stats(pairs)
        errors = {"mean": mean, "std": std, "pairs": pairs}
    return RunReport(
        set_id=set_id,
        n=image_set.n,
        ids=list(image_set.ids),
        config=config,
        offsets={k: list(v) for k, v in zip(image_set.ids, solution.offsets)},
        fitness=solution.fitness,
        trace=[level.to_dict() for level in solution.trace],
        timings_ms=timings,
        errors=errors,
        components=[list(c) for c in solution.components],
    )


@dataclass
class EvalRow:
    set_id: str
    n: Optional[int] = None
    mean_error: Optional[float] = None
    baseline_error: Optional[float] = None
    error_reduction_pct: Optional[float] = None
    fitness: Optional[float] = None
    representation_ms: Optional[float] = None
    tables_ms: Optional[float] = None
    ascent_ms: Optional[float] = None
    total_ms: Optional[float] = None
    error: str = ""

    def cells(self) -> List[str]:
        return [_cell(getattr(self, column)) for column in EVAL_COLUMNS]


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def _mean(values: Sequence[Optional[float]]) -> Optional[float]:
    present = [v for v in values if v is not None]
    return float(np.mean(present)) if present else None


def footer_row(rows: Sequence[EvalRow]) -> EvalRow:
    """Means over the successful rows; the error cell counts failures."""
    ok = [row for row in rows if not row.error]
    failed = len(rows) - len(ok)
    footer = EvalRow(set_id=FOOTER_ID, n=len(ok))
    for column in EVAL_COLUMNS[2:-1]:
        setattr(footer, column, _mean([getattr(row, column) for row in ok]))
    footer.error = f"{failed} failed" if failed else ""
    return footer


def eval_row(outcome: "Outcome[EvalRow]") -> EvalRow:
    if outcome.is_success():
        return outcome.get()
    return EvalRow(set_id=outcome.set_id, error=outcome.error_message())


def write_eval_csv(rows: Sequence[EvalRow], out: TextIO) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(EVAL_COLUMNS)
    ordered = sorted(rows, key=lambda row: row.set_id)
    for row in ordered:
        writer.writerow(row.cells())
    writer.writerow(footer_row(ordered).cells())


def read_eval_csv(text: str) -> List[Dict[str, str]]:
    """Parse an eval CSV back into one dict per row, footer included."""
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != EVAL_COLUMNS:
        raise ValueError(f"unexpected CSV header {reader.fieldnames}")
    return list(reader)


def write_sweep_csv(rows: Sequence[Sequence[Any]], out: TextIO) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
