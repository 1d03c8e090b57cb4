#!/usr/bin/env python3
"""End-to-end checks of the grammargen command-line tool.

usage: test_cli.py <grammargen executable> <data directory>
"""

import json
import os
import subprocess
import sys
import tempfile
import unittest

EXE = None
DATA = None


def data(name):
    return os.path.join(DATA, name)


class Cli(unittest.TestCase):
    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp = self._tmp.name

    def tearDown(self):
        self._tmp.cleanup()

    def out(self, name):
        return os.path.join(self.tmp, name)

    def run_cli(self, *args, expect=0):
        proc = subprocess.run([EXE, *args], capture_output=True, text=True)
        self.assertEqual(proc.returncode, expect, f"args {args}\nstderr:\n{proc.stderr}")
        return proc

    def read(self, path, mode="r"):
        with open(path, mode) as f:
            return f.read()

    def manifest(self, path):
        return json.loads(self.read(path + ".manifest.json"))

    # -- helpers that build artifacts -------------------------------------

    def induce(self, name="g.gg", *extra):
        path = self.out(name)
        self.run_cli("induce", "--corpus", data("family.db"), "--coarsener", "rna", "--radii", "0,1",
                     "--thickness", "1", "--base-thickness", "2", "-o", path, *extra)
        return path

    def fit(self):
        path = self.out("m.ocm")
        self.run_cli("fit", "--corpus", data("family.db"), "-o", path)
        return path

    def sample(self, grammar, model, name="s.jsonl", *extra, threads=2):
        path = self.out(name)
        self.run_cli("sample", "--config", data("sample.cfg"), "--grammar", grammar, "--model", model,
                     "--seed-graphs", data("family.db"), "--threads", str(threads), "-o", path, *extra)
        return path

    # -- tests ---------------------------------------------------------------

    def test_fold_reproduces_the_hairpin(self):
        path = self.out("f.db")
        self.run_cli("fold", "--input", data("hairpin.db"), "-o", path)
        self.assertEqual(self.read(path), ">hairpin\nGGGAAACCC\n(((...)))\n")
        m = self.manifest(path)
        self.assertEqual(m["command"], "fold")
        for key in ("inputs", "seed", "version", "wall_time_s"):
            self.assertIn(key, m)
        self.assertEqual(m["results"]["pairs"], 3)

    def test_coarsen_hairpin_is_s_h(self):
        path = self.out("c.jsonl")
        self.run_cli("coarsen", "--coarsener", "rna", "--input", data("hairpin.db"), "-o", path)
        lines = self.read(path).splitlines()
        self.assertEqual(len(lines), 1)
        rec = json.loads(lines[0])
        self.assertEqual([n["label"] for n in rec["graph"]["nodes"]], ["S", "H"])
        self.assertEqual(len(rec["graph"]["edges"]), 1)
        self.assertEqual(rec["members"], [[0, 1, 2, 6, 7, 8], [3, 4, 5]])

    def test_coarsen_fused_rings(self):
        path = self.out("c.jsonl")
        self.run_cli("coarsen", "--coarsener", "mol", "--input", data("methylnaphthalene.json"), "-o", path)
        rec = json.loads(self.read(path).splitlines()[0])
        self.assertEqual(len(rec["graph"]["nodes"]), 2)
        self.assertEqual(sorted(len(m) for m in rec["members"]), [1, 10])

    def test_induce_is_deterministic(self):
        a = self.induce("a.gg")
        b = self.induce("b.gg", "--threads", "3")
        self.assertEqual(self.read(a, "rb"), self.read(b, "rb"))
        self.assertGreater(self.manifest(a)["results"]["productive_interfaces"], 0)

    def test_fit_writes_a_model(self):
        model = self.fit()
        self.assertEqual(self.read(model, "rb")[:5], b"GGOCM")
        m = self.manifest(model)
        self.assertEqual(m["parameters"]["kernel"]["feature_bits"], 16)

    def test_sample_evaluate_pipeline(self):
        grammar, model = self.induce(), self.fit()
        s1 = self.sample(grammar, model, "s1.jsonl")
        s2 = self.sample(grammar, model, "s2.jsonl", threads=1)
        self.assertEqual(self.read(s1, "rb"), self.read(s2, "rb"))
        lines = self.read(s1).splitlines()
        self.assertEqual(len(lines), 2 * 5)  # config: 2 chains, (60 - 10) / 10 records
        for line in lines:
            rec = json.loads(line)
            self.assertTrue(0.0 < rec["score"] < 1.0)
            self.assertIn("graph", rec)
        m = self.manifest(s1)
        self.assertEqual(m["seed"], 5)
        self.assertEqual(m["parameters"]["transformer"], "rna-refold")
        self.assertEqual(m["results"]["audit_failures"], 0)

        # flags override the config file
        s3 = self.sample(grammar, model, "s3.jsonl", "--steps", "30")
        self.assertEqual(len(self.read(s3).splitlines()), 2 * 2)

        filt = self.out("filters.jsonl")
        self.run_cli("filters", "--input", s1, "-o", filt)
        self.assertEqual(self.manifest(filt)["results"]["pass_fraction"], 1.0)

        r1, r2 = self.out("r1.json"), self.out("r2.json")
        for r in (r1, r2):
            self.run_cli("evaluate", "--real", data("family.db"), "--gen", s1, "--folds", "2", "--reps", "3",
                         "-o", r)
        self.assertEqual(self.read(r1, "rb"), self.read(r2, "rb"))
        report = json.loads(self.read(r1))
        for key in ("symmetrized_kl", "set_similarity", "intdiv1", "intdiv2", "filter_pass_fraction", "per_fold"):
            self.assertIn(key, report)
        self.assertGreaterEqual(report["symmetrized_kl"], 0.0)
        self.assertEqual(report["filter_pass_fraction"], 1.0)

    def test_vectorize(self):
        path = self.out("v.svm")
        self.run_cli("vectorize", "--input", data("family.db"), "--r-max", "1", "--d-max", "2", "-o", path)
        lines = self.read(path).splitlines()
        self.assertEqual(len(lines), 30)
        for line in lines:
            pairs = [p.split(":") for p in line.split()]
            idx = [int(i) for i, _ in pairs]
            self.assertEqual(idx, sorted(idx))
            self.assertAlmostEqual(sum(float(w) ** 2 for _, w in pairs), 1.0, places=9)

    def test_strict_and_lenient_records(self):
        path = self.out("x.jsonl")
        proc = self.run_cli("filters", "--input", data("mixed.db"), "-o", path, expect=4)
        self.assertIn("line 6 (unbalanced)", proc.stderr)
        self.assertFalse(os.path.exists(path + ".manifest.json"))
        self.run_cli("filters", "--input", data("mixed.db"), "--lenient", "-o", path)
        m = self.manifest(path)
        self.assertEqual(m["results"]["graphs"], 1)
        self.assertEqual([s["name"] for s in m["skipped"]], ["unbalanced", "short_loop", "bad_char"])

    def test_error_categories(self):
        self.run_cli("filters", "--input", self.out("missing.db"), "-o", self.out("x"), expect=3)
        self.run_cli("fit", "--corpus", data("family.db"), "--nu", "2", "-o", self.out("m"), expect=5)
        self.run_cli("nonsense", expect=2)
        self.run_cli("fold", "-o", self.out("x"), expect=2)
        cfg = self.out("bad.cfg")
        with open(cfg, "w") as f:
            f.write("no-such-key = 1\n")
        self.run_cli("fold", "--config", cfg, "--input", data("hairpin.db"), "-o", self.out("x"), expect=5)

    def test_immovable_seed(self):
        grammar = self.out("one.gg")
        self.run_cli("induce", "--corpus", data("hairpin.db"), "--coarsener", "rna", "-o", grammar)
        model = self.out("m.ocm")
        self.run_cli("fit", "--corpus", data("family.db"), "-o", model)
        proc = self.run_cli("sample", "--grammar", grammar, "--model", model, "--seed-graphs", data("hairpin.db"),
                            "--steps", "5", "--burn-in", "0", "--interval", "1", "-o", self.out("s"), expect=6)
        self.assertIn("cannot move seed", proc.stderr)


if __name__ == "__main__":
    if len(sys.argv) < 3:
        sys.exit(__doc__)
    EXE, DATA = os.path.abspath(sys.argv[1]), os.path.abspath(sys.argv[2])
    unittest.main(argv=[sys.argv[0], "-v"])
