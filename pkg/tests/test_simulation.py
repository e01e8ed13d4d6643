import sys
import os
sys.path.append(os.getcwd())

import json
import math
import unittest
from unittest.mock import patch

import numpy as np

from src.simulation.integrator import GalerkinSystem, simulate_ensemble, step
from src.simulation.models import PathState, SimConfig
from src.simulation.rng import NOISE_CHUNK_STEPS, BrownianIncrements, split
from src.spectral.models import ModelSpec
from src.spectral.space import extend, norm, unit, zeros
from src.utils.errors import BlowUpError, ConfigError, SolverError
from src.utils.settings import Settings


def model(**overrides):
    data = {"d": 1, "sigma": [[1.0]], "b0": [0.0], "alpha": 1.0, "p": 2.0}
    data.update(overrides)
    return ModelSpec(**data)


class TestRandomStreams(unittest.TestCase):
    def test_split_is_reproducible_and_independent(self):
        a = split(5, 0).standard_normal(4)
        np.testing.assert_array_equal(a, split(5, 0).standard_normal(4))
        self.assertFalse(np.array_equal(a, split(5, 1).standard_normal(4)))
        self.assertFalse(np.array_equal(a, split(6, 0).standard_normal(4)))

    def test_increments_follow_fixed_chunks(self):
        steps = NOISE_CHUNK_STEPS + 40
        increments = BrownianIncrements(3, 2, 2, 0.25).take(steps)
        self.assertEqual(increments.shape, (steps, 2))
        generator = split(3, 2)
        first = generator.standard_normal((NOISE_CHUNK_STEPS, 2))
        second = generator.standard_normal((NOISE_CHUNK_STEPS, 2))
        np.testing.assert_array_equal(increments[:NOISE_CHUNK_STEPS], 0.5 * first)
        np.testing.assert_array_equal(increments[NOISE_CHUNK_STEPS:], 0.5 * second[:40])


class TestSimConfig(unittest.TestCase):
    def test_default_save_grid_is_every_step(self):
        cfg = SimConfig(N=4, dt=0.25, T=1.0, paths=1)
        self.assertEqual(cfg.n_steps, 4)
        np.testing.assert_array_equal(cfg.save_steps(), [0, 1, 2, 3, 4])
        np.testing.assert_allclose(cfg.save_grid(), [0.0, 0.25, 0.5, 0.75, 1.0])

    def test_explicit_save_times(self):
        cfg = SimConfig(N=4, dt=0.1, T=1.0, paths=1, save_times=[1.0, 0.5, 0.5, 0.0])
        np.testing.assert_array_equal(cfg.save_steps(), [0, 5, 10])

    def test_horizon_must_fit_the_lattice(self):
        with self.assertRaises(ConfigError):
            SimConfig(N=4, dt=0.3, T=1.0, paths=1).n_steps
        with self.assertRaises(ConfigError):
            SimConfig(N=4, dt=0.1, T=1.0, paths=1, save_times=[0.55]).save_steps()

    def test_field_validation(self):
        with self.assertRaises(ValueError):
            SimConfig(N=4, dt=0.1, T=0.05, paths=1)
        with self.assertRaises(ValueError):
            SimConfig(N=4, dt=0.1, T=1.0, paths=1, theta=1.5)
        with self.assertRaises(ValueError):
            SimConfig(N=4, dt=0.1, T=1.0, paths=0)
        with self.assertRaises(ValueError):
            SimConfig(N=4, dt=0.1, T=1.0, paths=1, save_times=[2.0])
        with self.assertRaises(ValueError):
            SimConfig(N=4, dt=0.1, T=1.0, paths=1, save_times=[])


class TestGalerkinSystem(unittest.TestCase):
    def test_implicit_decay_without_noise(self):
        spec = model(sigma=[[0.0]])
        system = GalerkinSystem(spec, 4, 0.1, theta=1.0)
        X = extend(unit((0,), 0), 4).coeffs[:, None]
        for _ in range(10):
            X = system.advance(X, np.zeros((1, 1)))
        self.assertAlmostEqual(X[0, 0], 1.1 ** -10, places=14)
        np.testing.assert_array_equal(X[1:, 0], 0.0)

    def test_explicit_decay_without_noise(self):
        system = GalerkinSystem(model(sigma=[[0.0]]), 3, 0.1, theta=0.0)
        X = system.advance(extend(unit((0,), 0), 3).coeffs[:, None], np.zeros((1, 1)))
        self.assertAlmostEqual(X[0, 0], 0.9, places=15)

    def test_advance_is_linear(self):
        system = GalerkinSystem(model(b0=[0.4]), 6, 0.05)
        X = split(1, 0).standard_normal((7, 3))
        dW = split(1, 1).standard_normal((1, 3))
        np.testing.assert_allclose(system.advance(2.0 * X, dW), 2.0 * system.advance(X, dW), atol=1e-13)

    def test_crank_nicolson_is_second_order_for_the_drift(self):
        spec = model(sigma=[[0.0]], b0=[1.0], alpha=0.5)
        x0 = extend(unit((1,), 1), 8).coeffs[:, None]

        def solve(dt):
            system = GalerkinSystem(spec, 8, dt, theta=0.5)
            X = x0
            for _ in range(int(round(1.0 / dt))):
                X = system.advance(X, np.zeros((1, 1)))
            return X[:, 0]

        coarse, middle, fine = solve(0.02), solve(0.01), solve(0.005)
        ratio = np.linalg.norm(coarse - middle) / np.linalg.norm(middle - fine)
        self.assertGreater(ratio, 3.5)
        self.assertLess(ratio, 4.5)

    def test_singular_implicit_matrix(self):
        # I - 0.5 * 0.125 * (0 + 16) I = 0
        with self.assertRaises(SolverError):
            GalerkinSystem(model(sigma=[[0.0]], alpha=-16.0), 2, 0.125, theta=0.5)

    def test_step_checks_and_blow_up(self):
        spec = model()
        cfg = SimConfig(N=3, dt=0.01, T=1.0, paths=1)
        system = GalerkinSystem.from_config(spec, cfg)
        state = PathState(t=0.0, x=extend(unit((0,), 0), 3), path=7)
        nxt = step(spec, cfg, state, [0.1], system)
        self.assertAlmostEqual(nxt.t, 0.01)
        self.assertEqual(nxt.path, 7)
        with self.assertRaises(ConfigError):
            system.step(PathState(t=0.0, x=unit((0,), 2)), [0.1])
        with self.assertRaises(BlowUpError) as ctx:
            system.step(state, [float("inf")])
        self.assertEqual(ctx.exception.path, 7)


class TestSimulateEnsemble(unittest.TestCase):
    def test_zero_initial_condition_stays_zero(self):
        cfg = SimConfig(N=6, dt=0.01, T=0.1, paths=4, seed=1)
        moments = simulate_ensemble(model(), cfg, zeros(1, 6))
        np.testing.assert_array_equal(moments.norms, 0.0)
        np.testing.assert_array_equal(moments.stderr, 0.0)
        self.assertEqual(moments.x0_norm, 0.0)

    def test_table_layout_and_default_index(self):
        spec = model()
        cfg = SimConfig(N=6, dt=0.01, T=0.1, paths=3, seed=1, save_times=[0.0, 0.05, 0.1])
        x0 = unit((1,), 1)
        moments = simulate_ensemble(spec, cfg, x0, observables={"c0": lambda index_set, X: X[0]})
        self.assertEqual(moments.norms.shape, (3, 3))
        self.assertEqual(moments.observables["c0"].shape, (3, 3))
        self.assertEqual(moments.norm_index, 0.0)
        self.assertAlmostEqual(moments.x0_norm, norm(x0, 0.0))
        np.testing.assert_allclose(moments.norms[:, 0], 1.0)
        np.testing.assert_array_equal(moments.observables["c0"][:, 0], 0.0)
        self.assertEqual(len(moments.rows()), 3)

    def test_single_path_has_zero_stderr(self):
        cfg = SimConfig(N=4, dt=0.01, T=0.05, paths=1)
        moments = simulate_ensemble(model(), cfg, unit((0,), 0))
        np.testing.assert_array_equal(moments.stderr, 0.0)

    def test_same_seed_same_result(self):
        cfg = SimConfig(N=6, dt=0.01, T=0.2, paths=5, seed=42)
        first = simulate_ensemble(model(), cfg, unit((0,), 0))
        second = simulate_ensemble(model(), cfg, unit((0,), 0))
        np.testing.assert_array_equal(first.norms, second.norms)

    def test_thread_count_does_not_change_results(self):
        cfg = SimConfig(N=6, dt=0.01, T=0.1, paths=70, seed=3)
        with patch("src.simulation.integrator.get_settings", return_value=Settings(threads=1)):
            serial = simulate_ensemble(model(), cfg, unit((0,), 0))
        with patch("src.simulation.integrator.get_settings", return_value=Settings(threads=4)):
            parallel = simulate_ensemble(model(), cfg, unit((0,), 0))
        np.testing.assert_array_equal(serial.norms, parallel.norms)

    def test_paths_are_stable_under_ensemble_growth(self):
        small = SimConfig(N=6, dt=0.01, T=0.1, paths=32, seed=3)
        large = SimConfig(N=6, dt=0.01, T=0.1, paths=64, seed=3)
        a = simulate_ensemble(model(), small, unit((0,), 0))
        b = simulate_ensemble(model(), large, unit((0,), 0))
        np.testing.assert_array_equal(a.norms, b.norms[:32])

    def test_state_dump(self):
        cfg = SimConfig(N=4, dt=0.1, T=0.2, paths=2, seed=1, save_times=[0.0, 0.2], dump_states=True)
        moments = simulate_ensemble(model(), cfg, unit((0,), 0))
        self.assertEqual(len(moments.states), 4)
        record = json.loads(moments.states[-1].to_json())
        self.assertEqual((record["path"], record["N"]), (1, 4))
        self.assertAlmostEqual(record["t"], 0.2)

    def test_mean_square_decays_in_stable_regime(self):
        cfg = SimConfig(N=16, dt=1e-3, T=0.2, paths=32, seed=5, save_times=[0.0, 0.2])
        moments = simulate_ensemble(model(), cfg, unit((0,), 0))
        bound = moments.x0_norm ** 2 * math.exp(-2.0 * 0.2)
        self.assertLessEqual(moments.mean_sq_norm[-1], bound * 1.02)

    def test_initial_condition_must_fit(self):
        cfg = SimConfig(N=2, dt=0.1, T=0.2, paths=1)
        with self.assertRaises(ConfigError):
            simulate_ensemble(model(), cfg, unit((3,), 3))
        with self.assertRaises(ConfigError):
            simulate_ensemble(model(), cfg, unit((0, 0), 0))

    def test_blow_up_reports_path(self):
        spec = model(sigma=[[10.0]], alpha=0.0)
        cfg = SimConfig(N=32, dt=1.0, T=200.0, paths=1, theta=0.0)
        with self.assertRaises(BlowUpError) as ctx:
            simulate_ensemble(spec, cfg, unit((0,), 0))
        self.assertEqual(ctx.exception.path, 0)


if __name__ == '__main__':
    unittest.main()
