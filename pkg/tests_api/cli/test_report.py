"""Tests for the JSON run report and the eval/sweep CSV files."""

import csv
import io
import json
import unittest

from python_proptest import Gen, for_all

from python_setreg.cli.report import (
    EVAL_COLUMNS,
    FOOTER_ID,
    SWEEP_COLUMNS,
    EvalRow,
    build_report,
    config_echo,
    eval_row,
    footer_row,
    read_eval_csv,
    write_eval_csv,
    write_sweep_csv,
)
from python_setreg.core.correlation import CorrelationConfig
from python_setreg.core.errors import DatasetError
from python_setreg.core.graph import GraphConfig
from python_setreg.core.image import ImageGrid, ImageSet
from python_setreg.core.optimizer import (
    LevelTrace,
    OptimizerConfig,
    RegistrationSolution,
)
from python_setreg.core.outcome import Failed, Registered
from python_setreg.dataset.synthetic import GroundTruth


def _solution():
    trace = (
        LevelTrace(8.0, 3, 1.5, True, (0.5, 1.0, 1.2, 1.5), 1.0, 2.0, 3.0),
        LevelTrace(3.0, 1, 1.9, True, (1.5, 1.9), 0.5, 1.5, 0.25),
    )
    return RegistrationSolution(
        offsets=((0, 0), (3, 4)), fitness=1.9, trace=trace, components=((0, 1),)
    )


def _image_set():
    grids = (ImageGrid.constant(8, 8, 0.0), ImageGrid.constant(8, 8, 1.0))
    return ImageSet(grids, ("a.png", "b.png"))


class TestRunReport(unittest.TestCase):
    """The ``register`` JSON."""

    def setUp(self):
        self.config = config_echo(GraphConfig(), OptimizerConfig(), CorrelationConfig())

    def test_report_with_truth(self):
        """Test that a report with truth carries offsets, errors, trace and timings."""
        truth = GroundTruth(((0, 0), (3, 4)))
        report = build_report("s1", _image_set(), _solution(), truth, self.config)
        data = json.loads(report.to_json())
        self.assertEqual(data["offsets"], {"a.png": [0, 0], "b.png": [3, 4]})
        self.assertEqual(data["errors"]["mean"], 0.0)
        self.assertEqual(data["errors"]["pairs"], [0.0, 0.0])
        self.assertEqual(data["timings_ms"]["total"], 8.25)
        self.assertEqual(data["timings_ms"]["tables"], 3.5)
        self.assertEqual([lvl["sigma"] for lvl in data["trace"]], [8.0, 3.0])
        self.assertEqual(data["components"], [[0, 1]])
        self.assertEqual(report.mean_error, 0.0)

    def test_wrong_truth_gives_error(self):
        """Test that a wrong truth shows up as the pair's displacement error."""
        truth = GroundTruth(((0, 0), (0, 0)))
        report = build_report("s1", _image_set(), _solution(), truth, self.config)
        self.assertEqual(report.mean_error, 5.0)
        self.assertEqual(report.errors["std"], 0.0)

    def test_no_truth_no_errors(self):
        """Test that a report without truth has no errors block."""
        report = build_report("s1", _image_set(), _solution(), None, self.config)
        self.assertIsNone(report.mean_error)
        self.assertNotIn("errors", report.to_dict())

    def test_without_timings_is_reproducible_text(self):
        """Test that dropping timings removes every wall-clock field."""
        report = build_report("s1", _image_set(), _solution(), None, self.config)
        data = report.to_dict(timings=False)
        self.assertNotIn("timings_ms", data)
        for level in data["trace"]:
            self.assertFalse([k for k in level if k.endswith("_ms")])
        self.assertTrue(report.to_json(timings=False).endswith("}\n"))

    def test_config_echo_restores_configs(self):
        """Test that the config echo rebuilds the configs it came from."""
        gcfg = GraphConfig(k_near=2, k_far=1)
        echo = json.loads(
            json.dumps(config_echo(gcfg, OptimizerConfig(), CorrelationConfig(9), 5))
        )
        self.assertEqual(GraphConfig.from_dict(echo["graph"]), gcfg)
        restored = OptimizerConfig.from_dict(echo["optimizer"])
        self.assertEqual(restored, OptimizerConfig())
        self.assertEqual(CorrelationConfig.from_dict(echo["correlation"]).max_shift, 9)
        self.assertEqual(echo["subset"], 5)


class TestEvalCsv(unittest.TestCase):
    """Rows, footer and the fixed column layout."""

    def _rows(self):
        return [
            EvalRow("set_b", 4, 1.0, 10.0, 90.0, 5.0, 1.0, 2.0, 3.0, 6.0),
            EvalRow("set_a", 4, 3.0, 10.0, 70.0, 6.0, 1.0, 2.0, 3.0, 6.0),
            eval_row(Failed("set_c", DatasetError("no images"))),
        ]

    def test_rows_sorted_with_footer(self):
        """Test that rows are sorted by id and followed by an aggregate footer."""
        out = io.StringIO()
        write_eval_csv(self._rows(), out)
        rows = read_eval_csv(out.getvalue())
        ids = [r["set_id"] for r in rows]
        self.assertEqual(ids, ["set_a", "set_b", "set_c", "ALL"])
        footer = rows[-1]
        self.assertEqual(footer["n"], "2")
        self.assertEqual(footer["mean_error"], "2")
        self.assertEqual(footer["error_reduction_pct"], "80")
        self.assertEqual(footer["error"], "1 failed")
        self.assertEqual(rows[2]["error"], "DatasetError: no images")
        self.assertEqual(rows[2]["mean_error"], "")

    @for_all(
        Gen.list(Gen.float(min_value=0.0, max_value=1e4), min_length=1, max_length=8),
        num_runs=20,
    )
    def test_every_line_has_every_column(self, errors):
        """Test that the header, every row and the footer have all columns."""
        rows = [
            EvalRow(f"set{k:02d}", 3, e, None, None, 1.0) for k, e in enumerate(errors)
        ]
        out = io.StringIO()
        write_eval_csv(rows, out)
        lines = list(csv.reader(io.StringIO(out.getvalue())))
        self.assertEqual(tuple(lines[0]), EVAL_COLUMNS)
        self.assertEqual(len(lines), len(errors) + 2)
        for line in lines:
            self.assertEqual(len(line), len(EVAL_COLUMNS))
        self.assertEqual(lines[-1][0], FOOTER_ID)

    def test_successful_outcome_passes_row_through(self):
        """Test that a successful outcome yields its own row."""
        row = EvalRow("s", 2, 0.5)
        self.assertIs(eval_row(Registered("s", row)), row)

    def test_footer_of_only_failures(self):
        """Test that a footer over failed sets has no mean error."""
        footer = footer_row([EvalRow("s", error="ValueError: x")])
        self.assertEqual(footer.n, 0)
        self.assertIsNone(footer.mean_error)
        self.assertEqual(footer.cells()[2], "")

    def test_unknown_header_rejected(self):
        """Test that a CSV with a foreign header is rejected."""
        with self.assertRaises(ValueError):
            read_eval_csv("a,b\n1,2\n")


class TestSweepCsv(unittest.TestCase):
    def test_layout(self):
        """Test that sweep rows follow the header in k order."""
        out = io.StringIO()
        write_sweep_csv([(2, 0.0, 0.0, 2.0), (3, 0.25, 0.5, 5.75)], out)
        self.assertEqual(
            out.getvalue().splitlines(),
            [",".join(SWEEP_COLUMNS), "2,0,0,2", "3,0.25,0.5,5.75"],
        )


if __name__ == "__main__":
    unittest.main()
