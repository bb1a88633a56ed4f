import json
import tempfile
import unittest
from pathlib import Path

from csv_writer import CSVWriter
from cyclotomic_builder import build
from growth_oracle import bfs_shells
from hull_engine import enumerate_facets
from json_saver import JSONSaver
from transport_dual import enumerate_vertices_2d
from verification import CheckRecord, VerificationReport


class TestCSVWriter(unittest.TestCase):
    def test_shells(self):
        df = CSVWriter.shells_frame(bfs_shells(build(6), 3))
        self.assertEqual(CSVWriter.to_text(df), "n,count\n0,1\n1,6\n2,12\n3,18\n")

    def test_facets(self):
        df = CSVWriter.facets_frame(enumerate_facets(build(3)))
        self.assertEqual(list(df.columns), ["denominator", "numerators", "incident"])
        self.assertEqual(df.iloc[0]["numerators"], "-2 1")
        self.assertEqual(df.iloc[0]["incident"], "1 2")

    def test_vertices(self):
        df = CSVWriter.vertices_frame(enumerate_vertices_2d(2, 3))
        self.assertEqual(df.shape, (6, 6))
        self.assertTrue((df.sum(axis=1) == 6).all())
        with self.assertRaises(ValueError):
            CSVWriter.vertices_frame([])

    def test_write(self):
        with tempfile.TemporaryDirectory() as tmp:
            target = Path(tmp) / "nested" / "shells.csv"
            written = CSVWriter(target).write(CSVWriter.shells_frame(bfs_shells(build(2), 2)))
            self.assertEqual(written, target)
            self.assertEqual(target.read_text(encoding="utf-8"), "n,count\n0,1\n1,2\n2,2\n")
        with self.assertRaises(ValueError):
            CSVWriter().write(CSVWriter.shells_frame(bfs_shells(build(2), 2)))


class TestJSONSaver(unittest.TestCase):
    def test_dumps_is_stable(self):
        self.assertEqual(JSONSaver.dumps({"b": 1, "a": [1, 2]}), '{\n  "a": [\n    1,\n    2\n  ],\n  "b": 1\n}\n')

    def test_save_report(self):
        report = VerificationReport(
            "fast", (CheckRecord("table/6", "table", 6, [1, 4, 1], [1, 4, 1], "pass", 0.1234, "coordinator-table"),)
        )
        with tempfile.TemporaryDirectory() as tmp:
            saver = JSONSaver(Path(tmp))
            path = saver.save_report(report)
            self.assertTrue(path.name.startswith("verify_fast_"))
            with open(path, "r", encoding="utf-8") as f:
                data = json.load(f)
        self.assertEqual(data["session_id"], saver.session_id)
        self.assertEqual(data["report"]["records"][0]["elapsed"], 0.123)
        self.assertEqual(VerificationReport.from_dict(data["report"]).scope, "fast")


if __name__ == "__main__":
    unittest.main()
