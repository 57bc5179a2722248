from unittest import TestCase

import numpy as np
from numpy.testing import assert_allclose, assert_array_equal

from modtv.exception import ParameterError
from modtv.graph import BoxSpec, Graph, NodeSet
from modtv.graph import generators
from modtv.oracles import dense_modularity_matrix
from modtv.solver import fast_atvo, linear_start
from modtv.spectral import (
    PowerIterParams,
    leading_eigenvector,
    linear_module,
    modularity_matvec,
)


class TestModularityMatvec(TestCase):
    def test_constant_vector_is_in_kernel(self):
        graph = generators.erdos_renyi(20, 0.3, np.random.default_rng(0))

        assert_allclose(modularity_matvec(graph, np.ones(20)), 0.0, atol=1e-12)
        assert_array_equal(modularity_matvec(graph, np.zeros(20)), 0.0)

    def test_matches_dense_matrix(self):
        rng = np.random.default_rng(1)
        graph = generators.planted_partition([10, 12], 0.6, 0.1, rng)
        dense = dense_modularity_matrix(graph)
        for _ in range(5):
            v = rng.standard_normal(graph.n)
            assert_allclose(modularity_matvec(graph, v), dense @ v, rtol=0, atol=1e-12)


class TestLeadingEigenvector(TestCase):
    def test_two_cliques_are_separated(self):
        graph = generators.two_cliques(5)

        pair = leading_eigenvector(graph)

        self.assertTrue(pair.converged)
        self.assertAlmostEqual(pair.eigenvalue, 4.0, places=6)
        positive = NodeSet(pair.vector >= 0)
        self.assertIn(positive, (NodeSet.from_indices(10, range(5)),
                                 NodeSet.from_indices(10, range(5, 10))))

    def test_residual_bound(self):
        graph = generators.planted_partition([8, 8], 0.7, 0.1, np.random.default_rng(2))
        params = PowerIterParams(tol=1e-8)

        pair = leading_eigenvector(graph, params)

        self.assertTrue(pair.converged)
        self.assertAlmostEqual(np.max(np.abs(pair.vector)), 1.0, places=12)
        residual = np.max(np.abs(modularity_matvec(graph, pair.vector)
                                 - pair.eigenvalue * pair.vector))
        self.assertLessEqual(residual, 1e-8 * abs(pair.eigenvalue) * (1 + 1e-6))
        self.assertGreaterEqual(pair.eigenvalue, 0.0)

    def test_eigenvalue_is_the_largest(self):
        graph = generators.erdos_renyi(15, 0.4, np.random.default_rng(3))

        pair = leading_eigenvector(graph)

        spectrum = np.linalg.eigvalsh(dense_modularity_matrix(graph))
        self.assertAlmostEqual(pair.eigenvalue, spectrum[-1], places=6)

    def test_deterministic(self):
        graph = generators.erdos_renyi(15, 0.4, np.random.default_rng(4))

        first = leading_eigenvector(graph, PowerIterParams(seed=3))
        second = leading_eigenvector(graph, PowerIterParams(seed=3))

        assert_array_equal(first.vector, second.vector)
        self.assertEqual(first.iterations, second.iterations)

    def test_sign_convention(self):
        graph = generators.barbell()

        pair = leading_eigenvector(graph)

        first = np.flatnonzero(pair.vector)[0]
        self.assertGreater(pair.vector[first], 0.0)

    def test_not_converged(self):
        graph = generators.erdos_renyi(30, 0.2, np.random.default_rng(5))

        with self.assertLogs("modtv.spectral", level="WARNING"):
            pair = leading_eigenvector(graph, PowerIterParams(tol=1e-15, max_iters=2))

        self.assertFalse(pair.converged)
        self.assertEqual(pair.iterations, 2)

    def test_needs_two_nodes(self):
        graph = Graph.from_edges(1, [0], [0])

        with self.assertRaises(ParameterError):
            leading_eigenvector(graph)

    def test_params_validation(self):
        for changes in ({"tol": 0.0}, {"max_iters": 0}, {"shift": -1.0}):
            with self.assertRaises(ParameterError):
                PowerIterParams(**changes)


class TestLinearModule(TestCase):
    def test_barbell(self):
        graph = generators.barbell()
        for rounding in ("sign", "sweep"):
            result = linear_module(graph, rounding=rounding)

            self.assertAlmostEqual(result.q_value, 5.0 / 28.0, places=12)
            self.assertEqual(result.size, 3)
            self.assertAlmostEqual(result.tv_final, 5.0, places=12)
            self.assertEqual(result.method, "linear")

    def test_x_star_is_vertex_of_community(self):
        graph = generators.planted_partition([6, 9], 0.8, 0.1, np.random.default_rng(6))
        box = BoxSpec(2.0, 3.0)

        result = linear_module(graph, box=box)

        assert_array_equal(result.x_star, box.vertex(result.community))

    def test_sweep_is_at_least_sign(self):
        graph = generators.planted_partition([7, 7], 0.7, 0.2, np.random.default_rng(7))

        by_sign = linear_module(graph, rounding="sign")
        by_sweep = linear_module(graph, rounding="sweep")

        self.assertGreaterEqual(by_sweep.q_value, by_sign.q_value - 1e-12)

    def test_unknown_rounding(self):
        with self.assertRaises(ParameterError):
            linear_module(generators.barbell(), rounding="median")


def test_linear_start_lies_in_box():
    graph = generators.planted_partition([6, 6], 0.8, 0.1, np.random.default_rng(8))
    box = BoxSpec(0.5, 1.0)

    x0 = linear_start(graph, box)

    assert x0.shape == (12,)
    assert np.all(x0 >= -0.5) and np.all(x0 <= 1.0)


def test_solver_improves_on_linear_method():
    wins = 0
    for seed in range(20):
        rng = np.random.default_rng(500 + seed)
        graph = generators.planted_partition([80, 120], 0.08, 0.02, rng)
        box = BoxSpec()

        baseline = linear_module(graph, box=box)
        solved = fast_atvo(graph, linear_start(graph, box), box)

        wins += solved.q_value >= baseline.q_value - 1e-12
    assert wins >= 18
