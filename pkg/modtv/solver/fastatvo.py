"""
Active-set solver
=================

Minimises ``f = -TV_Q^p`` over ``[-a, b]^n``. Each iteration

 - estimates the variables sitting at their bounds (A_l, A_u) and the free ones (N),
 - moves a working set W of N, always holding the worst stationarity violator, along the
   spectral-scaled negative gradient,
 - accepts the unit step without evaluating f while the trial point passes the trust test
   (``Delta`` shrinks by ``beta`` after each such step),
 - otherwise compares f with the reference value ``f_R`` (the largest of the last ``M + 1``
   checkpoint values), backtracking to the last checkpoint when it has not decreased, and runs
   a non-monotone Armijo line search.

Every ``Z`` iterations after the last checkpoint the function is checked the same way, so the
unit steps can never drift upwards for long. f itself is always read off the gradient as
``grad . x / p``, and gradients move incrementally on the working set.
"""
from modtv.exception import SolverError
from modtv.graph import BoxSpec, Graph
from modtv.graph.modularity import threshold_sweep
from modtv.objective import Objective
from modtv.objective.cache import GradientCache
from modtv.objective.tv import tv_q
from modtv.result import ModuleResult, SolverTelemetry
from modtv.solver.active_set import estimate_sets, initialize, project, stationarity_measure
from modtv.solver.direction import (
    bb_coefficient,
    direction,
    next_working_set_size,
    select_working_set,
)
from modtv.solver.linesearch import nonmonotone_linesearch
from modtv.solver.params import SolverParams
from modtv.solver.state import SolverState

import numpy as np

import logging
import time
from typing import Optional


logger = logging.getLogger(__name__)


class FastATVO:
    def __init__(self, graph: Graph, box: BoxSpec, params: SolverParams) -> None:
        self.graph = graph
        self.box = box
        self.params = params
        self.objective = Objective(graph, params.p, sign=-1.0)
        self.telemetry = SolverTelemetry()

    def _unit_step_norm(self, x: np.ndarray, trial: np.ndarray) -> float:
        if self.params.unit_step_test == "displacement":
            return float(np.max(np.abs(trial - x)))
        return float(np.max(np.abs(trial)))

    def _check_finite(self, value: float, what: str) -> None:
        if not np.isfinite(value):
            raise SolverError("non-finite %s encountered" % what)

    def _current_value(self, state: SolverState) -> float:
        if state.f_current is None:
            state.f_current = self.objective.value_from_gradient(state.grad, state.x)
            self._check_finite(state.f_current, "objective value")
        return state.f_current

    def _record_reference(self, state: SolverState) -> None:
        self.telemetry.reference_values.append(state.f_ref)
        self.telemetry.checkpoints.append(state.k)

    def _function_control(self, state: SolverState) -> bool:
        """Compares f(x^k) with f_R. Returns True when the run backtracked to the checkpoint."""

        f_k = self._current_value(state)
        if f_k >= state.f_ref:
            self.telemetry.backtracks += 1
            state.backtrack()
            return True
        state.accept_checkpoint(f_k)
        self._record_reference(state)
        return False

    def solve(self, x0) -> ModuleResult:
        params = self.params
        box = self.box
        graph = self.graph
        n = graph.n
        start = time.perf_counter()

        x = graph.as_vector(x0, "x0")
        x = initialize(x, box) if params.snap_start else project(x, box)
        rng = np.random.default_rng(params.seed)

        cache = GradientCache(
            self.objective,
            x,
            refresh_every=params.refresh_every,
            drift_tol=params.drift_tol,
            audit_rate=params.audit_rate,
            rng=np.random.default_rng(np.random.SeedSequence(params.seed).spawn(1)[0]),
        )
        f0 = self.objective.value_from_gradient(cache.grad, x)
        self._check_finite(f0, "initial objective value")
        state = SolverState(x, cache.grad, f0, box, params, rng)
        self._record_reference(state)
        if params.record_iterates:
            self.telemetry.iterates = [x.copy()]

        def trial_value(x_trial: np.ndarray) -> float:
            grad = cache.evaluate(x_trial, w_active)
            trial["grad"] = grad
            value = self.objective.value_from_gradient(grad, x_trial)
            return value

        trial: dict = {}
        d: Optional[np.ndarray] = None
        w_active = np.empty(0, dtype=np.int64)
        limit = params.iteration_limit(n)
        cap = params.working_set_cap(n)
        stationarity = stationarity_measure(state.x, state.grad, box)

        while state.iterations < limit:
            if stationarity <= params.eps_stat:
                # never stop above f_R at a point the function control has not seen
                if state.k == state.checkpoint.k or self._current_value(state) < state.f_ref:
                    break
                self.telemetry.backtracks += 1
                checkpoint = state.backtrack()
                cache.restore(state.x, state.grad)
                d, w_active = checkpoint.d, checkpoint.w
                fevals_before = self.objective.counter.fevals
                control = False
                unit = False
            else:
                state.sets = estimate_sets(state.x, state.grad, box)
                control = state.k == state.checkpoint.k + params.Z
                backtracked = False
                if control:
                    backtracked = self._function_control(state)
                    if backtracked:
                        cache.restore(state.x, state.grad)
                        d, w_active = state.checkpoint.d, state.checkpoint.w
                fevals_before = self.objective.counter.fevals

                unit = False
                if not backtracked:
                    w_active = select_working_set(state, min(state.ws_target, cap))
                    state.ws_target = next_working_set_size(state.ws_target, cap)
                    mu = bb_coefficient(state, w_active, params)
                    d = direction(state, w_active, mu)
                    if state.checkpoint.k == state.k:
                        state.checkpoint.d = d
                        state.checkpoint.w = w_active

                    x_trial = project(state.x + d, box)
                    if self._unit_step_norm(state.x, x_trial) <= state.delta:
                        grad = cache.advance(x_trial, w_active)
                        state.move_to(x_trial, grad, None)
                        state.delta *= params.beta
                        unit = True
                        self.telemetry.unit_steps += 1
                    elif state.checkpoint.k != state.k and self._function_control(state):
                        cache.restore(state.x, state.grad)
                        d, w_active = state.checkpoint.d, state.checkpoint.w
                    else:
                        state.checkpoint.d = d
                        state.checkpoint.w = w_active

            if not unit:
                if d is None or w_active is None:
                    raise SolverError("checkpoint %d has no stored direction" % state.k)
                result = nonmonotone_linesearch(
                    trial_value, state.x, d, state.f_ref, state.grad, box, params
                )
                cache.commit(result.x_next, trial["grad"])
                state.move_to(result.x_next, cache.grad, result.f_next)
                self.telemetry.line_searches += 1
                self.telemetry.line_search_steps += result.steps

            self.telemetry.iterations.append(
                (control, self.objective.counter.fevals - fevals_before, unit)
            )
            if params.record_iterates:
                self.telemetry.iterates.append(state.x.copy())  # type: ignore

            state.grad = cache.grad
            stationarity = stationarity_measure(state.x, state.grad, box)
            self._check_finite(stationarity, "stationarity measure")
            logger.debug(
                "k=%d |W|=%d unit=%s f_R=%.10g stat=%.3g",
                state.k,
                w_active.size if w_active is not None else 0,
                unit,
                state.f_ref,
                stationarity,
            )
        else:
            logger.info(
                "iteration limit %d reached with stationarity %.3g", limit, stationarity
            )
            if state.k != state.checkpoint.k and self._current_value(state) >= state.f_ref:
                state.backtrack()
                cache.restore(state.x, state.grad)

        return self._finish(state, cache, f0, stationarity, time.perf_counter() - start)

    def _finish(
        self,
        state: SolverState,
        cache: GradientCache,
        f0: float,
        stationarity: float,
        elapsed: float,
    ) -> ModuleResult:
        drift = cache.refresh()
        x_star = state.x
        tv_p_final = -self.objective.value_from_gradient(cache.grad, x_star)
        tv_p_init = -f0
        self._check_finite(tv_p_final, "final objective value")
        if tv_p_final < tv_p_init - 1e-9 * max(1.0, abs(tv_p_init)):
            raise SolverError(
                "objective decreased from %.12g to %.12g" % (tv_p_init, tv_p_final)
            )

        community, q_value = threshold_sweep(self.graph, x_star)
        counter = self.objective.counter
        self.telemetry.max_gradient_drift = max(cache.max_drift, drift)
        self.telemetry.pair_terms = counter.pair_terms
        logger.info(
            "solved: %d iterations, Q=%.6f, |S|=%d, TV_Q^p %.6g -> %.6g",
            state.iterations,
            q_value,
            community.size(),
            tv_p_init,
            tv_p_final,
        )
        return ModuleResult(
            x_star=x_star,
            community=community,
            q_value=q_value,
            tv_p_init=tv_p_init,
            tv_p_final=tv_p_final,
            tv_final=tv_q(self.graph, x_star),
            stationarity=stationarity_measure(x_star, cache.grad, self.box),
            iters=state.iterations,
            fevals=counter.fevals,
            gevals=counter.gevals,
            wall_time=elapsed,
            seed=self.params.seed,
            telemetry=self.telemetry,
        )


def fast_atvo(
    graph: Graph, x0, box: Optional[BoxSpec] = None, params: Optional[SolverParams] = None
) -> ModuleResult:
    return FastATVO(graph, box or BoxSpec(), params or SolverParams()).solve(x0)
