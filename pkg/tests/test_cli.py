import sys
import os
sys.path.append(os.getcwd())

import json
import shutil
import tempfile
import unittest
from pathlib import Path
from unittest.mock import patch

from src.cli import main
from src.utils.errors import InvariantViolation


def write_config(directory, name, model=None, sim=None, q=1.0):
    data = {
        "name": name,
        "model": {"d": 1, "sigma": [[1.0]], "b0": [0.0], "alpha": 1.0, "p": 2.0, **(model or {})},
        "sim": {"N": 8, "dt": 0.01, "T": 0.5, "paths": 4, "theta": 0.5, "seed": 1, **(sim or {})},
        "q": q,
        "output_dir": str(directory / name),
    }
    path = directory / f"{name}.json"
    path.write_text(json.dumps(data), encoding="utf-8")
    return str(path)


class TestCommandLine(unittest.TestCase):
    def setUp(self):
        self.tmp = Path(tempfile.mkdtemp())

    def tearDown(self):
        shutil.rmtree(self.tmp, ignore_errors=True)

    def run_cli(self, *argv):
        return main(list(argv) + ["--log-level", "ERROR"])

    def test_success(self):
        config = write_config(self.tmp, "ok")
        self.assertEqual(self.run_cli("monotonicity", config, "--N", "2", "4"), 0)
        self.assertTrue((self.tmp / "ok" / "monotonicity.csv").exists())

    def test_out_override(self):
        config = write_config(self.tmp, "ok")
        self.assertEqual(self.run_cli("embedding", config, "--n", "0", "2", "--trials", "10",
                                      "--out", str(self.tmp / "elsewhere")), 0)
        self.assertTrue((self.tmp / "elsewhere" / "embedding.csv").exists())

    def test_configuration_errors(self):
        self.assertEqual(self.run_cli("stability", str(self.tmp / "missing.json")), 2)
        self.assertEqual(self.run_cli("invariant", write_config(self.tmp, "bad_q", q=2.5)), 2)
        self.assertEqual(self.run_cli("stability", write_config(self.tmp, "ok"), "--paths", "0"), 2)

    def test_singular_solver(self):
        # I - theta dt (0 - alpha) I vanishes for theta dt alpha = -1
        config = write_config(self.tmp, "singular", model={"sigma": [[0.0]], "alpha": -16.0},
                              sim={"dt": 0.125, "T": 1.0})
        self.assertEqual(self.run_cli("stability", config), 3)

    def test_blow_up(self):
        config = write_config(self.tmp, "explode", model={"sigma": [[10.0]], "alpha": 0.0},
                              sim={"N": 32, "dt": 1.0, "T": 200.0, "paths": 1, "theta": 0.0})
        self.assertEqual(self.run_cli("stability", config), 4)

    def test_invariant_violation(self):
        config = write_config(self.tmp, "ok")
        with patch("src.cli.ExperimentRunner.stability", side_effect=InvariantViolation("bound failed")):
            self.assertEqual(self.run_cli("stability", config), 5)

    def test_runs_are_byte_identical(self):
        config = write_config(self.tmp, "repeat", sim={"N": 6, "T": 0.5, "paths": 40})
        outputs = []
        for run in ("first", "second"):
            out = self.tmp / run
            self.assertEqual(self.run_cli("stability", config, "--seed", "123", "--out", str(out)), 0)
            self.assertEqual(self.run_cli("monotonicity", config, "--N", "2", "--out", str(out)), 0)
            outputs.append(out)
        for name in ("moments.csv", "stability.json", "monotonicity.csv", "hypothesis.json"):
            self.assertEqual((outputs[0] / name).read_bytes(), (outputs[1] / name).read_bytes())

    def test_different_seeds_differ(self):
        config = write_config(self.tmp, "seeds", sim={"paths": 32})
        for seed in ("1", "2"):
            self.assertEqual(self.run_cli("stability", config, "--seed", seed, "--out", str(self.tmp / seed)), 0)
        self.assertNotEqual((self.tmp / "1" / "moments.csv").read_bytes(),
                            (self.tmp / "2" / "moments.csv").read_bytes())


if __name__ == '__main__':
    unittest.main()
