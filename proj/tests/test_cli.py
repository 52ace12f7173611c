"""End-to-end checks of the command-line tool: exit codes, artifacts, reproducibility."""

import json
import subprocess
import sys
import tempfile
import unittest
from pathlib import Path

CVD = None


def run(*args, cwd, check_code=None):
    proc = subprocess.run([CVD, *map(str, args)], cwd=cwd, capture_output=True, text=True)
    if check_code is not None and proc.returncode != check_code:
        raise AssertionError(
            f"cvd {' '.join(map(str, args))} exited {proc.returncode}, expected {check_code}\n"
            f"stdout:\n{proc.stdout}\nstderr:\n{proc.stderr}"
        )
    return proc


class CliTest(unittest.TestCase):
    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self._tmp.name)

    def tearDown(self):
        self._tmp.cleanup()

    def cvd(self, *args, code=0):
        return run(*args, cwd=self.dir, check_code=code)

    def test_gen_state_writes_mps_with_manifest(self):
        self.cvd("gen-state", "ghz", "--n", 8, "-o", "ghz8.mps.json")
        doc = json.loads((self.dir / "ghz8.mps.json").read_text())
        self.assertEqual(doc["format"], "cvdprep.mps")
        self.assertEqual(doc["n"], 8)
        self.assertEqual(doc["manifest"]["command"], "gen-state")
        self.assertIsNone(doc["manifest"]["timestamps"])
        self.assertIn("bond dims", self.cvd("info", "ghz8.mps.json").stdout)

    def test_all_families_generate(self):
        cases = [
            ("cluster", "--n", 6),
            ("aklt", "--n", 3),
            ("random", "--n", 6, "--bond", 3, "--seed", 2),
            ("ising", "--n", 8, "--hx", 0.5, "--hz", 0.05),
            ("xy", "--n", 6, "--hx", 0.1),
            ("xxz", "--n", 6, "--jz", 0.5, "--hx", 0.1, "--hz", 0.1),
            ("fermi-hubbard", "--n", 3, "--t", 1, "--u", 2),
            ("logical-bell", "--code", "5_1_3", "--layout", "separated"),
            ("logical-bell", "--code", "5_1_3", "--layout", "interlaced"),
        ]
        for i, case in enumerate(cases):
            out = f"s{i}.json"
            self.cvd("gen-state", *case, "-o", out)
            self.cvd("info", out)

    def test_reruns_are_byte_identical(self):
        # the manifest records paths, so each rerun uses the same relative names in its own directory
        for sub in ("one", "two"):
            (self.dir / sub).mkdir()
            run("gen-state", "ising", "--n", 8, "--hx", 0.5, "--hz", 0.05, "-o", "a.json", cwd=self.dir / sub, check_code=0)
            run("disentangle", "a.json", "--layers", 3, "--seed", 5, "-o", "run", cwd=self.dir / sub, check_code=0)
            run("verify", "lemma1", "--trials", 50, "-o", "v.json", cwd=self.dir / sub, check_code=0)
        for name in ("a.json", "run/circuit.json", "run/report.json", "run/tails.csv", "v.json"):
            self.assertEqual((self.dir / "one" / name).read_bytes(), (self.dir / "two" / name).read_bytes(), name)

    def test_disentangle_outputs(self):
        self.cvd("gen-state", "ghz", "--n", 6, "-o", "g.json")
        self.cvd("disentangle", "g.json", "-o", "run")
        report = json.loads((self.dir / "run" / "report.json").read_text())
        self.assertEqual(report["format"], "cvdprep.report")
        self.assertEqual(report["converged_layer"], 3)
        self.assertLess(report["eps"], 1e-8)
        self.assertEqual(report["manifest"]["inputs"], ["g.json"])
        circuit = json.loads((self.dir / "run" / "circuit.json").read_text())
        self.assertEqual(circuit["format"], "cvdprep.circuit")
        self.assertEqual(len(circuit["readoff"]), 6)
        csv = (self.dir / "run" / "tails.csv").read_text().splitlines()
        self.assertEqual(csv[0], "layer,bond,S_inf,bond_dim")
        self.assertEqual(len(csv) - 1, 5 * (report["layers_run"] + 1))
        for name in ("circuit.json", "report.json"):
            self.cvd("info", f"run/{name}")

    def test_config_precedence(self):
        self.cvd("gen-state", "random", "--n", 6, "--bond", 4, "-o", "r.json")
        (self.dir / "cfg.json").write_text(json.dumps({"max_layers": 1, "bond_cap": 8}))
        self.cvd("disentangle", "r.json", "--config", "cfg.json", "-o", "a")
        self.cvd("disentangle", "r.json", "--config", "cfg.json", "--layers", 2, "-o", "b")
        a = json.loads((self.dir / "a" / "report.json").read_text())
        b = json.loads((self.dir / "b" / "report.json").read_text())
        self.assertEqual(a["layers_run"], 1)
        self.assertEqual(b["layers_run"], 2)
        self.assertEqual(b["manifest"]["config"]["bond_cap"], 8)
        (self.dir / "bad.json").write_text(json.dumps({"max_layer": 1}))
        self.cvd("disentangle", "r.json", "--config", "bad.json", "-o", "c", code=1)

    def test_verify_checks(self):
        doc = json.loads(self.cvd("verify", "lemma1", "--trials", 200).stdout)
        self.assertEqual(doc["status"], "pass")
        self.assertEqual(doc["result"]["violations"], 0)

        flat = json.loads(self.cvd("verify", "lemma3", "--D", 2, "--spectrum", "flat", "--samples", 4000).stdout)
        self.assertEqual(flat["status"], "pass")
        skew = json.loads(self.cvd("verify", "lemma3", "--D", 2, "--spectrum", "skewed", "--samples", 4000).stdout)
        self.assertEqual(skew["status"], "flagged")
        self.assertLess(skew["result"]["closed_form"], 0)

        haar = json.loads(self.cvd("verify", "haar", "--D", 1, "--samples", 4000).stdout)
        self.assertEqual(haar["status"], "pass")

        self.cvd("gen-state", "cluster", "--n", 6, "-o", "c.json")
        self.cvd("disentangle", "c.json", "--bond-cap", 2, "--cutoff", 1e-3, "-o", "run")
        lemma2 = json.loads(self.cvd("verify", "lemma2", "--run", "run").stdout)
        self.assertEqual(lemma2["status"], "pass")
        self.assertLessEqual(lemma2["result"]["actual"], lemma2["result"]["bound"] + 1e-12)
        # a mismatched target violates the bound
        self.cvd("gen-state", "random", "--n", 6, "--bond", 4, "-o", "other.json")
        self.cvd("verify", "lemma2", "--run", "run", "--mps", "other.json", code=3)

    def test_export(self):
        self.cvd("gen-state", "ghz", "--n", 4, "-o", "g.json")
        self.cvd("disentangle", "g.json", "-o", "run")
        self.cvd("export", "run/circuit.json", "-o", "d.txt")
        self.cvd("export", "run/circuit.json", "--direction", "prepare", "-o", "p.txt")
        d = (self.dir / "d.txt").read_text().splitlines()
        p = (self.dir / "p.txt").read_text().splitlines()
        self.assertEqual(d[:2], ["# n 4", "# direction disentangle"])
        self.assertEqual(p[1], "# direction prepare")
        names = {line.split()[0] for line in d + p if not line.startswith("#")}
        self.assertTrue(names <= {"Rxx", "Ryy", "Rzz", "Rx", "Ry", "Rz"}, names)

    def test_exit_codes(self):
        self.cvd(code=1)
        self.cvd("gen-state", code=1)
        self.cvd("gen-state", "bogus", code=1)
        self.cvd("gen-state", "ghz", "--n", "abc", code=1)
        self.cvd("info", "missing.json", code=2)
        (self.dir / "junk.json").write_text("{ not json")
        self.cvd("info", "junk.json", code=2)
        self.cvd("disentangle", "missing.json", code=2)
        self.cvd("verify", "lemma9", code=1)

        # a state that is not in canonical form is an invariant violation
        self.cvd("gen-state", "ghz", "--n", 4, "-o", "g.json")
        doc = json.loads((self.dir / "g.json").read_text())
        doc["lambdas"][1] = [0.9, 0.1]
        (self.dir / "broken.json").write_text(json.dumps(doc))
        self.cvd("info", "broken.json", code=3)
        self.cvd("disentangle", "broken.json", code=3)


if __name__ == "__main__":
    CVD = str(Path(sys.argv.pop(1)).resolve())
    unittest.main(verbosity=2)
