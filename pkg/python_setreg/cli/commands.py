"""Implementations of the ``setreg`` sub-commands."""

import argparse
import io
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, NamedTuple, Optional, TextIO, Tuple

from ..core.correlation import CorrelationConfig, CorrelationTable, Edge
from ..core.errors import ConfigError, DatasetError
from ..core.graph import GraphConfig
from ..core.image import ImageSet
from ..core.optimizer import OptimizerConfig, RegistrationSolution, register_set
from ..core.outcome import attempt
from ..core.representation import (
    PyramidSchedule,
    Representation,
    representation_to_pgm,
)
from ..core.settings import parallel_map
from ..dataset.io import load_set, read_raster, save_set
from ..dataset.metrics import (
    baseline_error,
    error_reduction,
    pairwise_error_stats,
    registration_error,
)
from ..dataset.synthetic import (
    GroundTruth,
    PerturbationSpec,
    generate_set,
    mosaic_texture,
)
from .report import (
    EvalRow,
    RunReport,
    build_report,
    config_echo,
    eval_row,
    write_eval_csv,
    write_sweep_csv,
)

logger = logging.getLogger(__name__)


def configs_from_args(
    args: argparse.Namespace,
) -> Tuple[GraphConfig, OptimizerConfig, CorrelationConfig]:
    """Build the three configs from flags, or from a report's echo via ``--config``."""
    if getattr(args, "config", None):
        try:
            echo = json.loads(Path(args.config).read_text())
        except (OSError, ValueError) as e:
            raise ConfigError(f"cannot read config {args.config}: {e}") from e
        echo = echo.get("config", echo)
        if echo.get("subset") is not None and getattr(args, "subset", 1) is None:
            args.subset = int(echo["subset"])
        return (
            GraphConfig.from_dict(echo.get("graph", {})),
            OptimizerConfig.from_dict(echo.get("optimizer", {})),
            CorrelationConfig.from_dict(echo.get("correlation", {})),
        )
    gcfg = GraphConfig(
        scheme_list=frozenset(s.strip() for s in args.schemes.split(",") if s.strip()),
        k_near=args.k_near,
        k_far=args.k_far,
        d_thres1=args.d_thres1,
        d_thres2=args.d_thres2,
    )
    ocfg = OptimizerConfig(
        schedule=PyramidSchedule.parse(args.sigmas),
        max_iterations_per_level=args.max_iterations,
    )
    ccfg = CorrelationConfig(
        max_shift=args.max_shift, min_overlap_frac=args.min_overlap
    )
    return gcfg, ocfg, ccfg


def _restrict(
    image_set: ImageSet, truth: Optional[GroundTruth], subset: Optional[int]
) -> Tuple[ImageSet, Optional[GroundTruth]]:
    if subset is None:
        return image_set, truth
    return image_set.subset(subset), truth.subset(subset) if truth else None


def _representation_dumper(directory: Path):
    def dump(
        sigma: float,
        reps: List[Representation],
        tables: Dict[Edge, CorrelationTable],
    ) -> None:
        level = directory / f"sigma_{sigma:g}"
        for rep in reps:
            representation_to_pgm(rep, level / f"{Path(rep.source_id).stem}.pgm")

    return dump


class RegisterRun(NamedTuple):
    """Everything one registration of a set directory produced."""

    report: RunReport
    image_set: ImageSet
    truth: Optional[GroundTruth]
    solution: RegistrationSolution


def run_register(
    set_dir: Path,
    gcfg: GraphConfig,
    ocfg: OptimizerConfig,
    ccfg: CorrelationConfig,
    subset: Optional[int] = None,
    dump_representations: Optional[Path] = None,
) -> RegisterRun:
    image_set, truth = _restrict(*load_set(set_dir), subset)
    observer = (
        _representation_dumper(dump_representations) if dump_representations else None
    )
    solution = register_set(image_set, gcfg, ocfg, ccfg, on_level=observer)
    report = build_report(
        set_dir.name, image_set, solution, truth, config_echo(gcfg, ocfg, ccfg, subset)
    )
    return RegisterRun(report, image_set, truth, solution)


def _write(text: str, out: Optional[str], stdout: TextIO) -> None:
    if out:
        path = Path(out)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text)
        except OSError as e:
            raise DatasetError(f"cannot write output: {e}", path=str(path)) from e
    else:
        stdout.write(text)


def cmd_generate(args: argparse.Namespace, stdout: TextIO = sys.stdout) -> int:
    if args.no_perturb:
        spec = PerturbationSpec.none(seed=args.seed)
    else:
        spec = PerturbationSpec(
            gamma_range=args.gamma,
            gradient_amp=args.ramp,
            occluder_count=args.occluders,
            occluder_size_range=args.occluder_size,
            noise_sigma=args.noise,
            seed=args.seed,
        )
    if args.base:
        base = read_raster(args.base)
        size = args.size
    else:
        width, height = args.size or (256, 256)
        base = mosaic_texture(
            width + 2 * args.shift_bound,
            height + 2 * args.shift_bound,
            seed=args.seed,
            cell_size=args.cell_size,
        )
        size = (width, height)
    image_set, truth = generate_set(base, args.n, args.shift_bound, spec, size=size)
    out = save_set(image_set, truth, args.out, bit_depth=args.bit_depth)
    stdout.write(f"{out}\n")
    return 0


def cmd_register(args: argparse.Namespace, stdout: TextIO = sys.stdout) -> int:
    gcfg, ocfg, ccfg = configs_from_args(args)
    dump_dir = Path(args.dump_representations) if args.dump_representations else None
    run = run_register(Path(args.set_dir), gcfg, ocfg, ccfg, args.subset, dump_dir)
    if args.dump_graph and run.solution.graph is not None:
        graph_json = run.solution.graph.to_json(run.image_set.ids)
        _write(graph_json + "\n", args.dump_graph, stdout)
    _write(run.report.to_json(timings=not args.no_timings), args.out, stdout)
    return 0


def _load_baseline(path: Optional[str]) -> Dict[str, Dict[str, Any]]:
    if not path:
        return {}
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, ValueError) as e:
        raise DatasetError(f"cannot parse baseline: {e}", path=path) from e
    if not isinstance(raw, dict) or not all(isinstance(v, dict) for v in raw.values()):
        raise DatasetError(
            "baseline must map set ids to {filename: [dx, dy]}", path=path
        )
    return raw


def _baseline_offsets(entry: Dict[str, Any], ids: Tuple[str, ...], set_id: str):
    missing = [name for name in ids if name not in entry]
    if missing:
        raise DatasetError(f"baseline has no offsets for {missing[0]}", path=set_id)
    return [tuple(entry[name]) for name in ids]


def evaluate_set(
    set_dir: Path,
    gcfg: GraphConfig,
    ocfg: OptimizerConfig,
    ccfg: CorrelationConfig,
    baseline: Dict[str, Dict[str, Any]],
    subset: Optional[int] = None,
) -> EvalRow:
    report, image_set, truth, _ = run_register(set_dir, gcfg, ocfg, ccfg, subset)
    row = EvalRow(
        set_id=set_dir.name,
        n=report.n,
        mean_error=report.mean_error,
        fitness=report.fitness,
        representation_ms=report.timings_ms["representation"],
        tables_ms=report.timings_ms["tables"],
        ascent_ms=report.timings_ms["ascent"],
        total_ms=report.timings_ms["total"],
    )
    if set_dir.name in baseline:
        if truth is None:
            raise DatasetError(
                "baseline given but the set has no truth.json", path=set_dir.name
            )
        offsets = _baseline_offsets(baseline[set_dir.name], image_set.ids, set_dir.name)
        row.baseline_error = baseline_error(offsets, truth)
        if row.mean_error is not None:
            row.error_reduction_pct = error_reduction(
                row.mean_error, row.baseline_error
            )
    return row


def cmd_eval(args: argparse.Namespace, stdout: TextIO = sys.stdout) -> int:
    gcfg, ocfg, ccfg = configs_from_args(args)
    baseline = _load_baseline(args.baseline)
    root = Path(args.sets_dir)
    if not root.is_dir():
        raise DatasetError("not a directory", path=str(root))
    set_dirs = sorted((p for p in root.iterdir() if p.is_dir()), key=lambda p: p.name)
    if not set_dirs:
        raise DatasetError("no set directories found", path=str(root))

    outcomes = parallel_map(
        lambda d: attempt(
            d.name, lambda: evaluate_set(d, gcfg, ocfg, ccfg, baseline, args.subset)
        ),
        set_dirs,
    )
    rows = []
    for outcome in outcomes:
        if not outcome.is_success():
            logger.error("set %s failed: %s", outcome.set_id, outcome.error_message())
        rows.append(eval_row(outcome))

    buffer = io.StringIO()
    write_eval_csv(rows, buffer)
    _write(buffer.getvalue(), args.out, stdout)
    failed = sum(1 for row in rows if row.error)
    return 1 if failed else 0


def cmd_sweep(args: argparse.Namespace, stdout: TextIO = sys.stdout) -> int:
    gcfg, ocfg, ccfg = configs_from_args(args)
    image_set, truth = load_set(Path(args.set_dir))
    if truth is None:
        raise DatasetError("sweep needs a truth.json sidecar", path=args.set_dir)
    last = args.max_k or image_set.n
    if not 2 <= last <= image_set.n:
        raise ConfigError(f"--max-k must be in [2, {image_set.n}], got {last}")
    rows = []
    for k in range(2, last + 1):
        solution = register_set(image_set.subset(k), gcfg, ocfg, ccfg)
        _, pairs = registration_error(solution, truth.subset(k))
        mean, std = pairwise_error_stats(pairs)
        logger.info("k=%d: mean error %.3f px (std %.3f)", k, mean, std)
        rows.append((k, mean, std, solution.fitness))

    buffer = io.StringIO()
    write_sweep_csv(rows, buffer)
    _write(buffer.getvalue(), args.out, stdout)
    return 0
