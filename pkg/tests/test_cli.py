import io
import json
import os
import tempfile
import unittest
from contextlib import redirect_stderr, redirect_stdout
from pathlib import Path
from unittest import mock

from config import FIXTURES_FILE
from cyclotomic_builder import VertexMatrix, build
from main import main
from tu_checker import TUVerdict, witness_holds
from utils import format_matrix_text


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = main(list(argv))
    return code, out.getvalue()


class TestBuildCommand(unittest.TestCase):
    def test_two(self):
        self.assertEqual(run("build", "--m", "2"), (0, "1 2\n1 -1\n"))

    def test_fifteen_header(self):
        code, out = run("build", "--m", "15", "--format", "text")
        self.assertEqual(code, 0)
        lines = out.splitlines()
        self.assertEqual(lines[0], "8 15")
        self.assertEqual(len(lines), 9)

    def test_invalid_m(self):
        self.assertEqual(run("build", "--m", "1")[0], 2)

    def test_json_output_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            target = Path(tmp) / "a6.json"
            code, out = run("build", "--m", "6", "--format", "json", "--output", str(target))
            self.assertEqual((code, out), (0, ""))
            with open(target, "r", encoding="utf-8") as f:
                self.assertEqual(VertexMatrix.from_dict(json.load(f)), build(6))


class TestHVectorCommand(unittest.TestCase):
    def test_twenty(self):
        code, out = run("hvector", "--m", "20")
        data = json.loads(out)
        self.assertEqual(code, 0)
        self.assertEqual(data["h"], [1, 12, 68, 204, 330, 204, 68, 12, 1])
        self.assertEqual(data["phi"], 8)
        self.assertTrue(data["palindromic"])
        self.assertEqual(data["provenance"], "factor_power")

    def test_three(self):
        data = json.loads(run("hvector", "--m", "3")[1])
        self.assertEqual(data["h"], [1, 1, 1])
        self.assertEqual(data["provenance"], "prime")

    def test_one_hundred_five(self):
        code, out = run("hvector", "--m", "105")
        data = json.loads(out)
        self.assertEqual(code, 0)
        self.assertEqual(data["provenance"], "unavailable")
        self.assertIsNone(data["h"])
        self.assertEqual((data["tu_certificate"]["p"], data["tu_certificate"]["q"]), (5, 7))
        self.assertIn("no signed split", data["note"])

    def test_explicit_strategy(self):
        data = json.loads(run("hvector", "--m", "10", "--strategy", "triangulation")[1])
        self.assertEqual(data["h"], [1, 6, 16, 6, 1])
        self.assertEqual(data["provenance"], "triangulation")


class TestGrowthCommand(unittest.TestCase):
    def test_six(self):
        self.assertEqual(run("growth", "--m", "6", "--max-n", "3"), (0, "n,count\n0,1\n1,6\n2,12\n3,18\n"))

    def test_two(self):
        self.assertEqual(run("growth", "--m", "2", "--max-n", "4")[1], "n,count\n0,1\n1,2\n2,2\n3,2\n4,2\n")

    def test_fifteen_json(self):
        data = json.loads(run("growth", "--m", "15", "--max-n", "2", "--format", "json")[1])
        self.assertEqual(data["counts"], [1, 15, 120])

    def test_budget_exit_code(self):
        self.assertEqual(run("growth", "--m", "6", "--max-n", "8", "--budget-points", "60")[0], 3)
        self.assertEqual(run("growth", "--m", "6", "--max-n", "3", "--budget-points", "0")[0], 2)

    def test_missing_depth(self):
        self.assertEqual(run("growth", "--m", "6")[0], 2)


class TestOtherCommands(unittest.TestCase):
    def test_facets_deterministic(self):
        first = run("facets", "--m", "10", "--format", "json")
        self.assertEqual(first[0], 0)
        self.assertEqual(len(json.loads(first[1])["facets"]), 30)
        self.assertEqual(run("facets", "--m", "10", "--format", "json"), first)

    def test_facets_text(self):
        code, out = run("facets", "--m", "3")
        self.assertEqual(out, "1 ; -2 1 ; 1 2\n1 ; 1 -2 ; 0 2\n1 ; 1 1 ; 0 1\n")

    def test_facets_csv(self):
        lines = run("facets", "--m", "6", "--format", "csv")[1].splitlines()
        self.assertEqual(lines[0], "denominator,numerators,incident")
        self.assertEqual(len(lines), 7)

    def test_tu(self):
        self.assertTrue(json.loads(run("tu", "--m", "12")[1])["is_tu"])
        data = json.loads(run("tu", "--m", "105")[1])
        self.assertFalse(data["is_tu"])
        self.assertEqual(data["witness"]["kind"], "minor")
        self.assertIn("certificate", data["note"])

    def test_tu_from_matrix_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            good = Path(tmp) / "a15.txt"
            good.write_text(format_matrix_text(build(15).matrix), encoding="utf-8")
            bad = Path(tmp) / "odd_cycle.txt"
            bad.write_text("3 3\n1 1 0\n0 1 1\n1 0 1\n", encoding="utf-8")
            data = json.loads(run("tu", "--matrix", str(good))[1])
            self.assertTrue(data["is_tu"])
            self.assertEqual(data["shape"], [8, 15])
            data = json.loads(run("tu", "--matrix", str(bad))[1])
            self.assertFalse(data["is_tu"])
            self.assertEqual(abs(data["witness"]["det"]), 2)
            self.assertEqual(run("tu", "--matrix", str(Path(tmp) / "gone.txt"))[0], 2)

    def test_tu_certificate_names_its_factor(self):
        code, out = run("tu", "--m", "315")
        data = json.loads(out)
        self.assertEqual(code, 0)
        self.assertFalse(data["is_tu"])
        self.assertEqual(data["certificate_m"], 105)
        self.assertIn("A_105, the 3*5*7 factor of A_315", data["note"])
        self.assertTrue(data["witness_checked"])
        self.assertTrue(witness_holds(build(315).matrix, TUVerdict.from_dict(data)))

    def test_dual(self):
        code, out = run("dual", "--p", "2", "--q", "3", "--verify")
        data = json.loads(out)
        self.assertEqual(code, 0)
        self.assertTrue(data["duality_verified"])
        self.assertEqual(data["spanning_trees"], 12)
        self.assertEqual(len(data["vertices"]), 6)

    def test_dual_csv(self):
        lines = run("dual", "--p", "2", "--q", "3", "--format", "csv")[1].splitlines()
        self.assertEqual(lines[0], "x_0_0,x_0_1,x_0_2,x_1_0,x_1_1,x_1_2")
        self.assertEqual(len(lines), 7)

    def test_dual_rejects_composites(self):
        self.assertEqual(run("dual", "--p", "2", "--q", "4")[0], 2)

    def test_closed_form(self):
        data = json.loads(run("closed-form", "--m", "26")[1])
        self.assertEqual(data["h"], [1, 14, 92, 378, 1093, 2380, 4096, 2380, 1093, 378, 92, 14, 1])
        data = json.loads(run("closed-form", "--m", "30", "--table")[1])
        self.assertEqual(data["provenance"], "table")
        data = json.loads(run("closed-form", "--m", "30")[1])
        self.assertEqual(data["provenance"], "unavailable")

    def test_bad_environment_budget(self):
        with mock.patch.dict(os.environ, {"CYCLOLAT_BUDGET": "bogus=3"}):
            self.assertEqual(run("build", "--m", "6")[0], 2)


class TestVerifyCommand(unittest.TestCase):
    def test_passing_family(self):
        code, out = run("verify", "--family", "duality")
        self.assertEqual(code, 0)
        self.assertTrue(json.loads(out)["passed"])

    def test_tampered_fixture(self):
        with open(FIXTURES_FILE, "r", encoding="utf-8") as f:
            data = json.load(f)
        data["coordinator_table"]["6"]["h"] = [1, 5, 1]
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "tampered.json"
            with open(path, "w", encoding="utf-8") as f:
                json.dump(data, f)
            code, out = run("verify", "--family", "table", "--fixtures", str(path))
        self.assertEqual(code, 1)
        failed = [r["check_id"] for r in json.loads(out)["records"] if r["status"] != "pass"]
        self.assertEqual(failed, ["table/6"])


if __name__ == "__main__":
    unittest.main()
