# pylint: disable=missing-module-docstring, missing-function-docstring, missing-class-docstring

import csv
import json
import tempfile
import unittest
from pathlib import Path
from nilbohr.reporting import (
    SUMMARY_FIELDS,
    SUMMARY_FILE,
    append_summary,
    render_latex,
    result_paths,
    write_json,
    write_latex,
)

RUN_ID = "0123456789abcdef" * 4
DOCUMENT = {
    "command": "thm_a",
    "run_id": RUN_ID,
    "result": {
        "outcome": {
            "found": True,
            "value": "1/20",
            "witness": [1, 2],
            "sets_examined": 5,
            "canonical_rank": "4/1",
        }
    },
}


class TestResultPaths(unittest.TestCase):
    def test_stem_uses_run_id_prefix(self):
        json_path, tex_path = result_paths("out", "thm-a", RUN_ID)
        self.assertEqual(json_path, Path("out") / "thm-a-0123456789ab.json")
        self.assertEqual(tex_path, Path("out") / "thm-a-0123456789ab.tex")


class TestWriters(unittest.TestCase):
    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()
        self.addCleanup(self.directory.cleanup)
        self.out = Path(self.directory.name) / "results"

    def test_write_json_creates_directory(self):
        path = write_json(self.out / "run.json", {"b": 1, "a": [2]})
        self.assertEqual(json.loads(path.read_text(encoding="utf-8")), {"a": [2], "b": 1})

    def test_summary_header_written_once(self):
        row = {"run_id": RUN_ID, "command": "thm-a", "status": 0, "found": True, "value": "1/2"}
        append_summary(self.out, row, 1.25)
        append_summary(self.out, dict(row, value=None), 0.5)
        with open(self.out / SUMMARY_FILE, encoding="utf-8", newline="") as summary_file:
            lines = summary_file.read().splitlines()
        self.assertEqual(lines[0], ",".join(SUMMARY_FIELDS))
        self.assertEqual(len(lines), 3)
        with open(self.out / SUMMARY_FILE, encoding="utf-8", newline="") as summary_file:
            rows = list(csv.DictReader(summary_file))
        self.assertEqual(rows[0]["value_approx"], "0.500000")
        self.assertEqual(rows[0]["wall_time"], "1.250")
        self.assertEqual(rows[1]["value_approx"], "")
        self.assertTrue(rows[1]["timestamp"])

    def test_write_latex(self):
        path = write_latex(self.out / "run.tex", DOCUMENT)
        self.assertTrue(path.read_text(encoding="utf-8").startswith(r"\begin{tabular}{ll}"))


class TestRenderLatex(unittest.TestCase):
    def test_scalar_rows(self):
        text = render_latex(DOCUMENT)
        self.assertIn(r"command & thm\_a \\", text)
        self.assertIn(r"\texttt{0123456789ab}", text)
        self.assertIn(r"value & $\frac{1}{20}$ \\", text)
        self.assertIn(r"sets\_examined & 5 \\", text)
        self.assertIn(r"canonical\_rank & $4$ \\", text)
        self.assertIn(r"witness & \texttt{[1, 2]} \\", text)
        self.assertTrue(text.rstrip().endswith(r"\end{tabular}"))

    def test_long_lists_are_left_out(self):
        document = {"command": "sg-enum", "run_id": RUN_ID, "result": {"sums": list(range(100)), "count": 100}}
        text = render_latex(document)
        self.assertNotIn("sums", text)
        self.assertIn(r"count & 100 \\", text)


if __name__ == "__main__":
    unittest.main()
