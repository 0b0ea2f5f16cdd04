"""End-to-end checks of the bethe command-line tool."""

import csv
import io
import json
import math
import subprocess
import sys
import tempfile
import unittest
from pathlib import Path

BIN = sys.argv.pop(1) if len(sys.argv) > 1 else "build/tools/bethe"


def run(*args, code=0):
    proc = subprocess.run([BIN, *map(str, args)], capture_output=True, text=True)
    if proc.returncode != code:
        raise AssertionError(f"{args}: exit {proc.returncode}, stderr {proc.stderr}")
    return proc.stdout


def sweep_rows(text):
    lines = [l for l in text.splitlines() if not l.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(lines))))


class Bp(unittest.TestCase):
    def test_schema(self):
        out = json.loads(run("bp", "--q", 3, "--d", 4, "--beta", 1, "--B", 0.5, "--init", "free"))
        self.assertEqual(out["config"]["command"], "bp")
        self.assertIn("version", out)
        for key in ("b", "h", "residual", "phi", "iterations"):
            self.assertIn(key, out["result"])

    def test_zero_beta_phi(self):
        out = json.loads(run("bp", "--q", 3, "--beta", 0, "--B", 0.7))
        self.assertAlmostEqual(out["result"]["phi"], math.log(math.exp(0.7) + 2), places=12)

    def test_deterministic(self):
        args = ("bp", "--q", 4, "--beta", 1.3, "--B", 0.2, "--init", "max")
        self.assertEqual(run(*args), run(*args))

    def test_exit_codes(self):
        run("bp", "--beta", 3, "--B", 0.1, "--max-iter", 2, code=2)
        run("bp", "--q", 1, code=1)
        run("bp", "--init", "sideways", code=1)
        run("bp", "--no-such-flag", code=1)


class Classify(unittest.TestCase):
    def test_large_v_gives_only_ell_one(self):
        beta = math.log(1 + 1 / 2.5)
        for B in (0.0, 0.3, 2.0):
            sols = json.loads(run("classify", "--q", 3, "--d", 4, "--beta", beta, "--B", B))["solutions"]
            self.assertTrue(sols)
            self.assertTrue(all(s["ltype"][0] == "1" for s in sols))

    def test_schema_and_determinism(self):
        args = ("classify", "--q", 3, "--d", 4, "--beta", 2.5, "--B", 0.05)
        text = run(*args)
        self.assertEqual(text, run(*args))
        for s in json.loads(text)["solutions"]:
            for key in ("h", "phi", "ltype", "labels", "localmax_hessian", "localmax_rho", "jac_spectral_radius"):
                self.assertIn(key, s)


class Logz(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.graph = Path(self.tmp.name) / "g.txt"
        run("graph", "sample", "--n", 10, "--d", 4, "--sampler", "simple", "--seed", 5, "--out", self.graph)

    def tearDown(self):
        self.tmp.cleanup()

    def test_zero_beta_closed_form(self):
        out = json.loads(run("logz", "--graph", self.graph, "--q", 3, "--beta", 0, "--B", 0.4))
        self.assertAlmostEqual(out["logz"], 10 * math.log(math.exp(0.4) + 2), places=10)

    def test_brute_and_mc_agree(self):
        common = ("--graph", self.graph, "--q", 2, "--beta", 0.8, "--B", 0.2)
        exact = json.loads(run("logz", *common))["logz"]
        mc = json.loads(run("logz", *common, "--method", "mc", "--sweeps", 4000, "--threads", 2))
        self.assertLess(abs(mc["logz"] - exact), 4 * mc["stderr"] + 1e-3)

    def test_too_large(self):
        run("logz", "--n", 40, "--method", "brute", code=1)


class Decimate(unittest.TestCase):
    def test_zero_steps_is_header_only(self):
        lines = run("decimate", "--n", 20, "--steps", 0).splitlines()
        self.assertEqual(len(lines), 1)
        self.assertEqual(json.loads(lines[0])["type"], "header")

    def test_trace_and_summary(self):
        with tempfile.TemporaryDirectory() as tmp:
            summary = Path(tmp) / "s.csv"
            args = ("decimate", "--n", 200, "--steps", 50, "--t", 2, "--seed", 9, "--summary", summary)
            text = run(*args)
            first = summary.read_text()
            self.assertEqual(text, run(*args))
            self.assertEqual(first, summary.read_text())
        steps = [json.loads(l) for l in text.splitlines()[1:]]
        self.assertEqual([s["n"] for s in steps], list(range(199, 149, -1)))
        self.assertEqual(len(sweep_rows(first)), 51)


class Sweep(unittest.TestCase):
    def test_single_cell_matches_bethe_and_classify(self):
        cell = ("--q", 3, "--d", 4)
        row = sweep_rows(run("sweep", *cell, "--beta-min", 1.7, "--beta-points", 1, "--B-min", 0.05, "--B-points", 1))[0]
        pred = json.loads(run("bethe", *cell, "--beta", 1.7, "--B", 0.05))
        sols = json.loads(run("classify", *cell, "--beta", 1.7, "--B", 0.05))["solutions"]
        self.assertEqual(float(row["Phi"]), pred["phi"])
        self.assertEqual(float(row["b_max"]), pred["b_max"])
        self.assertEqual(int(row["n_fixed_points"]), len(sols))

    def test_ising_free_equals_max(self):
        rows = sweep_rows(run("sweep", "--q", 2, "--beta-points", 4, "--B-points", 3))
        for r in rows:
            self.assertAlmostEqual(float(r["b_free"]), float(r["b_max"]), places=8)

    def test_b_max_monotone_in_beta(self):
        rows = sweep_rows(run("sweep", "--q", 3, "--beta-points", 8, "--B-points", 2, "--threads", 3))
        for B in {r["B"] for r in rows}:
            col = [float(r["b_max"]) for r in rows if r["B"] == B]
            self.assertEqual(col, sorted(col))


if __name__ == "__main__":
    unittest.main()
