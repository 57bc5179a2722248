from unittest import TestCase

import numpy as np
import pytest
from numpy.testing import assert_array_equal

from modtv.exception import LineSearchError, ParameterError, SolverError
from modtv.graph import BoxSpec, NodeSet
from modtv.graph import generators
from modtv.graph.modularity import modularity
from modtv.objective.tv import grad_full, tv_q_p
from modtv.solver import SolverParams, fast_atvo, initialize, linear_start, stationarity_measure
from modtv.solver.active_set import estimate_sets, project, violations
from modtv.solver.direction import (
    bb_coefficient,
    direction,
    next_working_set_size,
    select_working_set,
)
from modtv.solver.linesearch import nonmonotone_linesearch
from modtv.solver.state import SolverState


class TestSolverParams(TestCase):
    def test_defaults(self):
        params = SolverParams()

        self.assertEqual((params.Z, params.M, params.delta0, params.beta), (20, 100, 1e20, 0.99))
        self.assertEqual(params.p, 1.4)

    def test_validation(self):
        for changes in (
            {"Z": 0},
            {"M": -1},
            {"delta0": -1.0},
            {"beta": 1.0},
            {"delta_ls": 0.0},
            {"gamma": 1.5},
            {"mu_min": 2.0, "mu_max": 1.0},
            {"p": 1.0},
            {"unit_step_test": "step"},
            {"audit_rate": -0.1},
            {"audit_rate": 1.5},
        ):
            with self.assertRaises(ParameterError):
                SolverParams(**changes)

    def test_derived_limits(self):
        params = SolverParams()

        self.assertEqual(params.iteration_limit(50), 500)
        self.assertEqual(params.iteration_limit(10 ** 7), 10 ** 6)
        self.assertEqual(SolverParams(max_iters=7).iteration_limit(50), 7)
        self.assertEqual(params.working_set_cap(100), 10)
        self.assertEqual(params.working_set_cap(10000), 300)
        self.assertEqual(params.working_set_cap(10 ** 6), 1000)

    def test_working_set_schedule(self):
        sizes = [2]
        while sizes[-1] < 10:
            sizes.append(next_working_set_size(sizes[-1], 10))

        self.assertEqual(sizes, [2, 4, 8, 10])


class TestActiveSet(TestCase):
    def test_initialize(self):
        box = BoxSpec()

        assert_array_equal(initialize([-0.3, 0.2], box), [-1.0, 1.0])
        assert_array_equal(initialize(np.zeros(3), box), [1.0, 1.0, 1.0])
        assert_array_equal(initialize([-1.0, 1.0], box), [-1.0, 1.0])

    def test_initialize_asymmetric_box(self):
        assert_array_equal(initialize([-5.0, 0.0, 2.0], BoxSpec(2.0, 3.0)), [-2.0, 3.0, 3.0])

    def test_estimate_sets(self):
        box = BoxSpec()
        x = np.array([-1.0, -1.0, 1.0, 1.0, 0.2])
        grad = np.array([0.5, -0.5, -0.5, 0.5, 0.1])

        lower, upper, free = estimate_sets(x, grad, box)

        assert_array_equal(lower, [0])
        assert_array_equal(upper, [2])
        assert_array_equal(free, [1, 3, 4])

    def test_stationarity_measure(self):
        box = BoxSpec()
        x = np.array([-1.0, 1.0, 0.0])

        self.assertEqual(stationarity_measure(x, np.array([3.0, -3.0, 0.0]), box), 0.0)
        self.assertAlmostEqual(
            stationarity_measure(x, np.array([3.0, -3.0, 0.25]), box), 0.25
        )
        assert_array_equal(violations(x, np.array([-0.5, 0.0, 2.0]), box), [0.5, 0.0, 1.0])


def make_state(x, grad, box=None, params=None, seed=0):
    box = box or BoxSpec()
    params = params or SolverParams()
    state = SolverState(
        np.asarray(x, dtype=float), np.asarray(grad, dtype=float), 0.0, box, params,
        np.random.default_rng(seed),
    )
    state.sets = estimate_sets(state.x, state.grad, box)
    return state


class TestWorkingSet(TestCase):
    def setUp(self):
        x = np.ones(10)
        grad = -np.ones(10)
        x[[3, 7, 9]] = 0.0
        grad[[3, 7, 9]] = [0.1, 0.5, -0.2]
        self.x, self.grad = x, grad

    def test_contains_worst_violator(self):
        state = make_state(self.x, self.grad)
        assert_array_equal(state.free, [3, 7, 9])

        w = select_working_set(state, 2)

        self.assertEqual(w.size, 2)
        self.assertIn(7, w)
        self.assertTrue(set(w) <= {3, 7, 9})

    def test_single_free_variable(self):
        grad = self.grad.copy()
        x = self.x.copy()
        x[[3, 9]] = 1.0
        grad[[3, 9]] = -1.0
        state = make_state(x, grad)

        assert_array_equal(select_working_set(state, 8), [7])

    def test_tie_goes_to_smallest_index(self):
        grad = self.grad.copy()
        grad[[3, 7, 9]] = 0.5
        state = make_state(self.x, grad)

        assert_array_equal(select_working_set(state, 1), [3])

    def test_seeded_replay(self):
        first = [select_working_set(make_state(self.x, self.grad, seed=4), 2) for _ in range(3)]
        second = [select_working_set(make_state(self.x, self.grad, seed=4), 2) for _ in range(3)]

        for a, b in zip(first, second):
            assert_array_equal(a, b)

    def test_empty_free_set(self):
        state = make_state(np.ones(4), -np.ones(4))

        with self.assertRaises(SolverError):
            select_working_set(state, 2)


class TestBarzilaiBorwein(TestCase):
    def state_with_history(self, s, y, params=None):
        x_prev = np.zeros(len(s))
        grad_prev = np.ones(len(s))
        state = make_state(x_prev + s, grad_prev + y, params=params)
        state.k = 2
        state.prev_x = x_prev
        state.prev_grad = grad_prev
        return state

    def test_first_iterations_use_fallback(self):
        params = SolverParams()
        state = make_state([0.5, -0.5], [2.0, 2.0], params=params)

        mu = bb_coefficient(state, np.array([0, 1]), params)

        self.assertAlmostEqual(mu, np.sqrt(0.5) / np.sqrt(8.0))

    def test_fallback_capped_at_one(self):
        params = SolverParams()
        state = make_state([0.5, -0.5], [0.01, 0.0], params=params)

        self.assertEqual(bb_coefficient(state, np.array([0, 1]), params), 1.0)

    def test_zero_gradient(self):
        params = SolverParams()
        state = make_state([0.5, -0.5], [0.0, 0.0], params=params)

        self.assertEqual(bb_coefficient(state, np.array([0, 1]), params), 1.0)

    def test_identity_curvature(self):
        params = SolverParams()
        state = self.state_with_history(np.array([0.3, -0.1]), np.array([0.3, -0.1]), params)

        self.assertAlmostEqual(bb_coefficient(state, np.array([0, 1]), params), 1.0)

    def test_negative_curvature_falls_back(self):
        params = SolverParams()
        s = np.array([0.1, 0.0])
        y = np.array([-0.2, 0.0])
        state = self.state_with_history(s, y, params)

        mu = bb_coefficient(state, np.array([0, 1]), params)

        x_w, g_w = state.x, state.grad
        expected = max(params.mu_min, min(1.0, np.linalg.norm(x_w) / np.linalg.norm(g_w)))
        self.assertAlmostEqual(mu, expected)

    def test_large_curvature_is_capped(self):
        params = SolverParams(mu_max=10.0)
        s = np.array([0.1, 0.1])
        y = np.array([3.0, 1.0])
        state = self.state_with_history(s, y, params)

        self.assertEqual(bb_coefficient(state, np.array([0, 1]), params), 10.0)

    def test_bounds(self):
        params = SolverParams(mu_min=1e-3, mu_max=1e3)
        rng = np.random.default_rng(0)
        for _ in range(50):
            state = self.state_with_history(rng.normal(size=4), rng.normal(size=4), params)
            mu = bb_coefficient(state, np.arange(4), params)
            self.assertTrue(params.mu_min <= mu <= params.mu_max)


class TestDirection(TestCase):
    def test_direction(self):
        state = make_state([0.0, 0.0, 0.0], [1.0, -2.0, 4.0])
        w = np.array([0, 2])

        assert_array_equal(direction(state, w, 1.0), [-1.0, 0.0, -4.0])
        assert_array_equal(direction(state, w, 0.5), 2 * direction(state, w, 1.0))

    def test_zero_gradient(self):
        state = make_state([0.0, 0.0], [0.0, 0.0])

        assert_array_equal(direction(state, np.array([0, 1]), 3.0), [0.0, 0.0])

    def test_rejects_nonpositive_coefficient(self):
        state = make_state([0.0], [1.0])

        with self.assertRaises(SolverError):
            direction(state, np.array([0]), 0.0)


class TestLineSearch(TestCase):
    def setUp(self):
        self.box = BoxSpec(10.0, 10.0)
        self.params = SolverParams()

    def square(self, x):
        return float(x[0] ** 2)

    def test_quadratic_halving(self):
        result = nonmonotone_linesearch(
            self.square, np.array([1.0]), np.array([-2.0]), 1.0, np.array([2.0]), self.box,
            self.params,
        )

        self.assertEqual(result.alpha, 0.5)
        self.assertEqual(result.x_next[0], 0.0)
        self.assertEqual(result.f_next, 0.0)
        self.assertEqual(result.steps, 2)

    def test_infinite_reference(self):
        result = nonmonotone_linesearch(
            self.square, np.array([1.0]), np.array([-2.0]), np.inf, np.array([2.0]), self.box,
            self.params,
        )

        self.assertEqual(result.alpha, 1.0)

    def test_projection(self):
        result = nonmonotone_linesearch(
            self.square, np.array([1.0]), np.array([-40.0]), np.inf, np.array([2.0]), self.box,
            self.params,
        )

        self.assertEqual(result.x_next[0], -10.0)

    def test_not_descent(self):
        with self.assertRaises(LineSearchError):
            nonmonotone_linesearch(
                self.square, np.array([1.0]), np.array([0.0]), 1.0, np.array([2.0]), self.box,
                self.params,
            )

    def test_exhausted(self):
        params = SolverParams(max_ls_steps=3)

        with self.assertRaises(LineSearchError):
            nonmonotone_linesearch(
                lambda x: 5.0, np.array([1.0]), np.array([-1.0]), 1.0, np.array([1.0]),
                self.box, params,
            )


class TestFastATVO(TestCase):
    def test_stationary_start(self):
        graph = generators.barbell()
        x0 = np.array([1.0, 1.0, 1.0, -1.0, -1.0, -1.0])

        result = fast_atvo(graph, x0, BoxSpec(), SolverParams())

        self.assertEqual(result.iters, 0)
        assert_array_equal(result.x_star, x0)
        self.assertAlmostEqual(result.q_value, 5.0 / 28.0, places=12)

    def test_barbell_from_linear_start(self):
        graph = generators.barbell()
        box = BoxSpec()

        result = fast_atvo(graph, linear_start(graph, box), box, SolverParams())

        self.assertAlmostEqual(result.q_value, 5.0 / 28.0, places=12)
        self.assertEqual(result.size, 3)
        self.assertEqual(result.fraction, 0.5)

    def test_barbell_from_poor_start(self):
        graph = generators.barbell()
        x0 = np.array([0.3, -0.2, 0.1, 0.4, -0.5, 0.6])

        result = fast_atvo(graph, x0, BoxSpec(), SolverParams(max_iters=20000))

        self.assertLessEqual(result.stationarity, 1e-4)
        self.assertGreaterEqual(result.tv_p_final, result.tv_p_init - 1e-9)

    def test_rejects_wrong_length(self):
        with self.assertRaises(ValueError):
            fast_atvo(generators.barbell(), np.zeros(4))


def planted(seed, sizes=(8, 8)):
    return generators.planted_partition(list(sizes), 0.8, 0.1, np.random.default_rng(seed))


@pytest.mark.parametrize("seed", range(6))
@pytest.mark.parametrize("unit_step_test", ["point", "displacement"])
def test_solver_contract(seed, unit_step_test):
    graph = planted(seed)
    box = BoxSpec(1.0, 1.0) if seed % 2 else BoxSpec(2.0, 3.0)
    params = SolverParams(
        max_iters=20000, seed=seed, record_iterates=True, unit_step_test=unit_step_test
    )
    x0 = np.random.default_rng(100 + seed).uniform(-box.a, box.b, graph.n)

    result = fast_atvo(graph, x0, box, params)
    telemetry = result.telemetry

    for x in telemetry.iterates:
        assert box.contains(x)
    assert result.stationarity <= 1e-4
    assert result.tv_p_final >= tv_q_p(graph, initialize(x0, box), params.p) - 1e-9
    references = telemetry.reference_values
    assert all(later <= earlier for earlier, later in zip(references, references[1:]))
    for _, fevals, unit in telemetry.iterations:
        if unit:
            assert fevals == 0

    grad = -grad_full(graph, result.x_star, params.p)
    lower, upper, _ = estimate_sets(result.x_star, grad, box)
    assert np.all(result.x_star[lower] == -box.a) and np.all(grad[lower] > 0)
    assert np.all(result.x_star[upper] == box.b) and np.all(grad[upper] < 0)
    assert result.q_value == pytest.approx(modularity(graph, result.community), abs=1e-12)


@pytest.mark.parametrize("seed", range(3))
def test_solver_is_reproducible(seed):
    graph = planted(seed, (10, 10))
    x0 = np.random.default_rng(seed).uniform(-1, 1, graph.n)
    params = SolverParams(seed=seed, record_iterates=True, max_iters=20000)

    first = fast_atvo(graph, x0, BoxSpec(), params)
    second = fast_atvo(graph, x0, BoxSpec(), params)

    assert len(first.telemetry.iterates) == len(second.telemetry.iterates)
    for a, b in zip(first.telemetry.iterates, second.telemetry.iterates):
        assert_array_equal(a, b)
    assert first.community == second.community


def test_function_control_runs_every_period():
    graph = planted(3, (12, 12))
    x0 = np.random.default_rng(3).uniform(-1, 1, graph.n)
    params = SolverParams(Z=3, seed=1, max_iters=20000, snap_start=False)

    result = fast_atvo(graph, x0, BoxSpec(), params)
    telemetry = result.telemetry

    assert telemetry.checkpoints[0] == 0
    assert len(telemetry.reference_values) == len(telemetry.checkpoints)
    assert result.iters == len(telemetry.iterations)
    assert telemetry.unit_steps + telemetry.line_searches == result.iters


def test_unsnapped_start_is_projected():
    graph = generators.barbell()
    x0 = np.array([3.0, 0.5, -0.2, -4.0, 0.1, 0.0])
    params = SolverParams(snap_start=False, record_iterates=True, max_iters=20000)

    result = fast_atvo(graph, x0, BoxSpec(), params)

    assert_array_equal(result.telemetry.iterates[0], project(x0, BoxSpec()))


def test_community_is_best_level_set():
    graph = planted(9, (6, 6))
    result = fast_atvo(graph, linear_start(graph), BoxSpec(), SolverParams(max_iters=20000))

    order = np.argsort(result.x_star, kind="stable")
    sorted_x = result.x_star[order]
    for t in range(1, graph.n):
        if sorted_x[t] == sorted_x[t - 1]:
            continue
        level = NodeSet.from_indices(graph.n, order[t:])
        assert modularity(graph, level) <= result.q_value + 1e-12


def test_audited_run_checks_every_update():
    graph = planted(4, (10, 10))
    x0 = np.random.default_rng(4).uniform(-1, 1, graph.n)

    plain = fast_atvo(graph, x0, BoxSpec(), SolverParams(seed=4, max_iters=20000))
    audited = fast_atvo(graph, x0, BoxSpec(), SolverParams(seed=4, max_iters=20000, audit_rate=1.0))

    assert audited.stationarity <= 1e-4
    assert audited.telemetry.max_gradient_drift <= 1e-8
    assert audited.telemetry.pair_terms > plain.telemetry.pair_terms
