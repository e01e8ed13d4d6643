import sys
import os
sys.path.append(os.getcwd())

import math
import unittest
from unittest.mock import patch

import numpy as np
from scipy.special import eval_hermite, roots_hermite

from src.spectral.basis import basis_size, enumerate_indices, hermite_eval, hermite_table
from src.utils.errors import ConfigError
from src.utils.settings import Settings


class TestEnumeration(unittest.TestCase):
    def test_sizes(self):
        self.assertEqual(basis_size(1, 5), 6)
        self.assertEqual(basis_size(2, 2), 6)
        self.assertEqual(basis_size(3, 12), 455)
        self.assertEqual(enumerate_indices(3, 12).size, 455)

    def test_graded_lex_order(self):
        index_set = enumerate_indices(2, 2)
        expected = [(0, 0), (0, 1), (1, 0), (0, 2), (1, 1), (2, 0)]
        self.assertEqual([tuple(int(v) for v in row) for row in index_set.indices], expected)
        self.assertEqual(list(index_set.grades), [0, 1, 1, 2, 2, 2])

    def test_truncations_are_prefixes(self):
        small = enumerate_indices(3, 3)
        large = enumerate_indices(3, 6)
        np.testing.assert_array_equal(large.indices[: small.size], small.indices)
        self.assertEqual(large.prefix_size(3), small.size)

    def test_rank_and_unrank_agree_with_enumeration(self):
        index_set = enumerate_indices(3, 6)
        np.testing.assert_array_equal(index_set.ranks(index_set.indices), np.arange(index_set.size))
        for r in range(index_set.size):
            k = index_set.unrank(r)
            self.assertEqual(k, tuple(int(v) for v in index_set.indices[r]))
            self.assertEqual(index_set.rank(k), r)

    def test_rank_rejects_out_of_range_indices(self):
        index_set = enumerate_indices(2, 3)
        with self.assertRaises(ValueError):
            index_set.rank((2, 2))
        with self.assertRaises(ValueError):
            index_set.rank((1,))
        with self.assertRaises(ValueError):
            index_set.unrank(index_set.size)

    def test_invalid_arguments(self):
        with self.assertRaises(ConfigError):
            enumerate_indices(0, 3)
        with self.assertRaises(ConfigError):
            enumerate_indices(2, -1)

    def test_basis_size_cap(self):
        with patch("src.spectral.basis.get_settings", return_value=Settings(max_basis_size=10)):
            with self.assertRaises(ConfigError):
                enumerate_indices(2, 5)


class TestHermiteFunctions(unittest.TestCase):
    def test_low_orders_match_closed_form(self):
        t = np.linspace(-4.0, 4.0, 41)
        table = hermite_table(20, t)
        for n in range(21):
            norm = math.sqrt(2.0 ** n * math.factorial(n) * math.sqrt(math.pi))
            expected = eval_hermite(n, t) * np.exp(-0.5 * t * t) / norm
            np.testing.assert_allclose(table[n], expected, rtol=1e-10, atol=1e-12)

    def test_orthonormal_up_to_order_200(self):
        nodes, weights = roots_hermite(210)
        factor = np.exp(np.log(weights) + nodes * nodes)
        table = hermite_table(200, nodes)
        gram = (table * factor[None, :]) @ table.T
        np.testing.assert_allclose(gram, np.eye(201), atol=1e-10)

    def test_bounded_by_pi_quarter(self):
        table = hermite_table(200, np.linspace(-30.0, 30.0, 301))
        self.assertTrue(np.all(np.abs(table) <= math.pi ** -0.25 + 1e-12))

    def test_tensor_evaluation(self):
        value = hermite_eval((1, 0), (0.5, 0.2))
        h1 = math.sqrt(2.0) * 0.5 * math.pi ** -0.25 * math.exp(-0.125)
        h0 = math.pi ** -0.25 * math.exp(-0.02)
        self.assertAlmostEqual(value, h1 * h0, places=14)

    def test_tensor_evaluation_shape_mismatch(self):
        with self.assertRaises(ValueError):
            hermite_eval((1, 0), (0.5,))


if __name__ == '__main__':
    unittest.main()
