"""
``setreg`` command-line entry point.

    setreg generate --n 10 --shift-bound 40 --seed 7 --out set7/
    setreg register set7/ --subset 2 --out report.json
    setreg eval sets/ --baseline baseline.json --out summary.csv
    setreg sweep set7/
"""

import argparse
import logging
import sys
from typing import Callable, List, Optional, TextIO, Tuple

from ..core.correlation import DEFAULT_MAX_SHIFT, DEFAULT_MIN_OVERLAP
from ..core.errors import SetRegError
from ..core.graph import KFURTHEST, KNN
from ..core.log import configure_logging
from ..core.optimizer import DEFAULT_MAX_ITERATIONS
from ..core.representation import DEFAULT_SIGMAS
from .commands import cmd_eval, cmd_generate, cmd_register, cmd_sweep
from .report import EVAL_COLUMNS

logger = logging.getLogger(__name__)

Handler = Callable[[argparse.Namespace, TextIO], int]


def _count(text: str) -> int:
    value = int(text)
    if value < 2:
        raise argparse.ArgumentTypeError(f"must be at least 2, got {value}")
    return value


def _nonnegative(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be nonnegative, got {value}")
    return value


def _pair(cast: Callable[[str], float]) -> Callable[[str], Tuple]:
    def parse(text: str) -> Tuple:
        parts = text.replace("x", ",").split(",")
        if len(parts) != 2:
            raise argparse.ArgumentTypeError(f"expected two values, got {text!r}")
        try:
            return (cast(parts[0]), cast(parts[1]))
        except ValueError:
            raise argparse.ArgumentTypeError(f"cannot parse {text!r}")

    return parse


def _add_registration_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("registration")
    group.add_argument(
        "--sigmas",
        default=",".join(f"{s:g}" for s in DEFAULT_SIGMAS),
        help="high-pass widths, coarse to fine (default: %(default)s)",
    )
    group.add_argument(
        "--schemes",
        default=f"{KNN},{KFURTHEST}",
        help="graph schemes: knn, threshold_near, kfurthest, threshold_far "
        "(default: %(default)s)",
    )
    group.add_argument("--k-near", type=int, default=3, help="(default: %(default)s)")
    group.add_argument("--k-far", type=int, default=3, help="(default: %(default)s)")
    group.add_argument("--d-thres1", type=float, help="threshold_near distance")
    group.add_argument("--d-thres2", type=float, help="threshold_far distance")
    group.add_argument(
        "--max-shift",
        type=int,
        default=DEFAULT_MAX_SHIFT,
        help="(default: %(default)s)",
    )
    group.add_argument(
        "--min-overlap",
        type=float,
        default=DEFAULT_MIN_OVERLAP,
        help="minimum overlap fraction (default: %(default)s)",
    )
    group.add_argument(
        "--max-iterations",
        type=int,
        default=DEFAULT_MAX_ITERATIONS,
        help="ascent moves per level (default: %(default)s)",
    )
    group.add_argument(
        "--config",
        help="reuse the config echoed in a previous report (overrides the flags)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="setreg", description="Set-based translational image registration."
    )
    parser.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=0,
        help="-v for progress, -vv for every accepted move",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a synthetic set with ground truth")
    gen.add_argument("--base", help="base raster; a random mosaic when omitted")
    gen.add_argument("--n", type=_count, default=10, help="(default: %(default)s)")
    gen.add_argument(
        "--shift-bound", type=_nonnegative, default=40, help="(default: %(default)s)"
    )
    gen.add_argument("--seed", type=int, default=0, help="(default: %(default)s)")
    gen.add_argument("--size", type=_pair(int), help="view size WxH")
    gen.add_argument(
        "--cell-size",
        type=float,
        default=96.0,
        help="coarsest mosaic cell pitch in px (default: %(default)s)",
    )
    gen.add_argument("--no-perturb", action="store_true", help="exact crops only")
    gen.add_argument("--gamma", type=_pair(float), default=(0.6, 1.6), help="LO,HI")
    gen.add_argument("--ramp", type=float, default=0.3, help="ramp amplitude")
    gen.add_argument("--occluders", type=int, default=5, help="occluders per image")
    gen.add_argument(
        "--occluder-size",
        type=_pair(float),
        default=(0.02, 0.06),
        help="LO,HI as fractions of the image width",
    )
    gen.add_argument("--noise", type=float, default=0.01, help="noise sigma")
    gen.add_argument("--bit-depth", type=int, choices=(8, 16), default=16)
    gen.add_argument("--out", required=True, help="output directory")
    gen.set_defaults(handler=cmd_generate)

    reg = sub.add_parser("register", help="register one set and print a JSON report")
    reg.add_argument("set_dir", help="directory of PNG/PGM images (+ truth.json)")
    _add_registration_flags(reg)
    reg.add_argument("--subset", type=_count, help="register only the first K images")
    reg.add_argument("--dump-graph", metavar="PATH", help="write the graph as JSON")
    reg.add_argument(
        "--dump-representations",
        metavar="DIR",
        help="write every representation of every level as PGM",
    )
    reg.add_argument("--no-timings", action="store_true", help="omit wall-clock fields")
    reg.add_argument("--out", help="report file (default: stdout)")
    reg.set_defaults(handler=cmd_register)

    ev = sub.add_parser(
        "eval",
        help="register every set under a directory and print a CSV summary",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="CSV columns, one row per set sorted by id, then an ALL row:\n  "
        + "\n  ".join(EVAL_COLUMNS),
    )
    ev.add_argument("sets_dir", help="directory whose sub-directories are sets")
    _add_registration_flags(ev)
    ev.add_argument(
        "--subset", type=_count, help="register only the first K images of each set"
    )
    ev.add_argument(
        "--baseline",
        help="JSON {set_id: {filename: [dx, dy]}} to compute error reduction against",
    )
    ev.add_argument("--out", help="CSV file (default: stdout)")
    ev.set_defaults(handler=cmd_eval)

    sw = sub.add_parser(
        "sweep", help="error of the first k images for k = 2..n of one set"
    )
    sw.add_argument("set_dir", help="set directory with truth.json")
    _add_registration_flags(sw)
    sw.add_argument("--max-k", type=_count, help="largest k (default: n)")
    sw.add_argument("--out", help="CSV file (default: stdout)")
    sw.set_defaults(handler=cmd_sweep)
    return parser


def main(argv: Optional[List[str]] = None, stdout: TextIO = sys.stdout) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.verbose)
    handler: Handler = args.handler
    try:
        return handler(args, stdout)
    except SetRegError as e:
        logger.debug("command failed", exc_info=True)
        sys.stderr.write(f"setreg: error: {e}\n")
        return 1

