"""
End-to-end checks at the sizes the bundled experiment files use.

These take a few minutes in total; the per-module suites cover the same
properties at unit-test sizes.
"""
import sys
import os
sys.path.append(os.getcwd())

import shutil
import tempfile
import unittest
from pathlib import Path
from unittest.mock import patch

import numpy as np

from src.analysis.functionals import ExpNegSqNorm
from src.analysis.invariant import ergodic_average, tail_mass
from src.analysis.stability import stability_check
from src.experiment.models import apply_overrides, load_config
from src.experiment.runner import ExperimentRunner
from src.monotonicity.estimator import estimate_constant
from src.simulation.integrator import simulate_ensemble
from src.simulation.rng import split
from src.spectral.basis import basis_size
from src.spectral.models import ModelSpec
from src.spectral.operators import assemble_A, derivative_op
from src.utils.settings import Settings

DATA_DIR = Path(__file__).resolve().parents[1] / "data" / "experiments"

# Strong order of the scheme is 1/2 for this model; a 32-path estimate
# scatters around it, so the check keeps a margin below the asymptotic value.
MIN_STRONG_ORDER = 0.4


class AcceptanceTestCase(unittest.TestCase):
    def setUp(self):
        self.tmp = Path(tempfile.mkdtemp())

    def tearDown(self):
        shutil.rmtree(self.tmp, ignore_errors=True)

    def config(self, name, **overrides):
        return apply_overrides(load_config(str(DATA_DIR / name)), out=str(self.tmp / name), **overrides)


class TestMonotonicityConstants(AcceptanceTestCase):
    def test_zero_form_for_random_constant_coefficient_models(self):
        generator = split(2024, 0)
        truncation = {1: 32, 2: 16, 3: 12}
        for trial in range(20):
            d = 1 + trial % 3
            spec = ModelSpec(
                d=d,
                sigma=generator.standard_normal((d, d)).tolist(),
                b0=generator.standard_normal(d).tolist(),
                alpha=1.0,
                p=0.0,
            )
            estimate = estimate_constant(spec, 0.0, truncation[d])
            self.assertLessEqual(abs(estimate.C_hat), 1e-9, f"trial {trial}, d={d}")

    def test_closed_form_value_on_the_ground_state(self):
        spec = ModelSpec(d=1, sigma=[[1.0]], b0=[0.0], p=1.0)
        self.assertAlmostEqual(estimate_constant(spec, 1.0, 0).C_hat, 4.0, delta=1e-9)


class TestStabilityAndTail(AcceptanceTestCase):
    def test_mean_square_bound_and_tail_mass(self):
        config = self.config("stability.json")
        spec = config.model
        C0 = estimate_constant(spec, spec.p - 2.0, config.sim.N).C_hat
        moments = simulate_ensemble(spec, config.sim, config.x0())

        report = stability_check(moments, spec, C0, tol=0.02)
        self.assertTrue(report.passed)
        self.assertGreaterEqual(report.beta_hat, 1.9)
        self.assertLessEqual(report.beta_hat, 2.1)

        tail = tail_mass(moments, [1.0, 2.0, 5.0, 10.0], enforce=False)
        self.assertTrue(tail.passed)
        for entry in tail.entries:
            self.assertLessEqual(entry.time_avg_exceed, 1.0 / entry.R ** 2 + 3.0 * entry.stderr)


class TestOracleAgreement(AcceptanceTestCase):
    def test_strong_error_decreases_with_step(self):
        runner = ExperimentRunner(self.config("oracle.json"))
        comparison = runner.oracle_compare()
        self.assertEqual(comparison.dts, [1e-2, 1e-3, 1e-4])
        self.assertTrue(all(a > b for a, b in zip(comparison.errors, comparison.errors[1:])))
        self.assertGreaterEqual(comparison.order, MIN_STRONG_ORDER)


class TestInvariantMeasure(AcceptanceTestCase):
    def test_time_average_and_start_gap(self):
        config = self.config("invariant.json")
        f = ExpNegSqNorm(config.q - 2.0)
        report = ergodic_average(config.model, config.sim, config.x0(), f, alternate=config.x1())
        self.assertLessEqual(abs(report.running_avg[-1] - 1.0), 0.02)
        self.assertLessEqual(report.start_gap[-1], 0.02)


class TestCompactEmbedding(AcceptanceTestCase):
    def test_no_violations(self):
        for name in ("invariant.json", "affine_drift.json"):
            rows = ExperimentRunner(self.config(name)).embedding(trials=1000)
            self.assertTrue(rows)
            self.assertEqual(sum(row[-1] for row in rows), 0)


class TestOperatorIdentities(AcceptanceTestCase):
    def test_skew_symmetry_on_three_dimensional_span(self):
        d, N = 3, 8
        size = basis_size(d, N)
        spec = ModelSpec(d=d, sigma=np.eye(d).tolist(), b0=[0.0] * d)
        for axis in range(d):
            top = derivative_op(axis, d, N).to_dense()[:size]
            self.assertLessEqual(np.max(np.abs(top + top.T)), 1e-12)
        for A in assemble_A(spec, N):
            top = A.to_dense()[:size]
            self.assertLessEqual(np.max(np.abs(top + top.T)), 1e-12)


class TestDeterminism(AcceptanceTestCase):
    def test_outputs_do_not_depend_on_thread_count(self):
        outputs = []
        for threads in (1, 4):
            config = self.config("stability.json", paths=96)
            config = apply_overrides(config, out=str(self.tmp / f"threads{threads}"))
            data = config.model_dump()
            data["sim"].update(N=16, T=0.1)
            config = type(config).model_validate(data)
            with patch("src.simulation.integrator.get_settings", return_value=Settings(threads=threads)):
                ExperimentRunner(config).stability()
            outputs.append(Path(config.output_dir) / "moments.csv")
        self.assertEqual(outputs[0].read_bytes(), outputs[1].read_bytes())


if __name__ == '__main__':
    unittest.main()
