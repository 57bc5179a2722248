"""
Global strategies
=================

Two ways of escaping the local maximisers the active-set solver returns:

``partition_and_swap``
    iterated local search; the incumbent is perturbed by sending a share ``sigma`` of each sign
    class to the opposite bound and solved again.

``multistart``
    independent runs from uniformly random feasible points.

Both keep the solution with the largest TV_Q, which is ``vol (a + b)`` times the modularity of its
thresholded community on vertices.
"""
from modtv.exception import ParameterError
from modtv.graph import BoxSpec, Graph
from modtv.result import ModuleResult
from modtv.solver import SolverParams, fast_atvo

import numpy as np

import dataclasses
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GlobalParams:
    sigma: float = 75.0
    ps_iters: int = 10
    restarts: int = 10
    seed: int = 0
    literal_acceptance: bool = False
    workers: int = 1

    def __post_init__(self):
        check_sigma(self.sigma)
        if self.ps_iters < 0:
            raise ParameterError("ps_iters must be >= 0")
        if self.restarts < 1:
            raise ParameterError("restarts must be >= 1")
        if self.workers < 1:
            raise ParameterError("workers must be >= 1")


def check_sigma(sigma: float) -> None:
    if not 0 <= sigma <= 100:
        raise ParameterError("sigma must lie in [0, 100], got %r" % (sigma,))


def _child_seed(sequence: np.random.SeedSequence) -> int:
    return int(sequence.generate_state(1)[0])


def _pick_count(size: int, sigma: float) -> int:
    if size == 0 or sigma == 0:
        return 0
    return max(1, math.floor(sigma / 100.0 * size))


def swap(x, sigma: float, box: BoxSpec, rng: np.random.Generator) -> np.ndarray:
    """Sends ``floor(sigma% |I|)`` random members of each sign class to the opposite bound.

    Zero components count as positive. Every changed component lands exactly on a bound.
    """

    check_sigma(sigma)
    x = np.asarray(x, dtype=np.float64)
    y = x.copy()
    lower_side = np.flatnonzero(x < 0)
    upper_side = np.flatnonzero(x >= 0)

    to_upper = rng.choice(lower_side, size=_pick_count(lower_side.size, sigma), replace=False)
    to_lower = rng.choice(upper_side, size=_pick_count(upper_side.size, sigma), replace=False)
    y[to_upper] = box.b
    y[to_lower] = -box.a
    return y


def _accepts(candidate: float, incumbent: float, literal: bool) -> bool:
    if literal:
        return candidate < incumbent
    return candidate > incumbent


def _combine(best: ModuleResult, runs: List[ModuleResult], method: str, seed: int,
             rounds: List[dict]) -> ModuleResult:
    return dataclasses.replace(
        best,
        iters=sum(run.iters for run in runs),
        fevals=sum(run.fevals for run in runs),
        gevals=sum(run.gevals for run in runs),
        wall_time=sum(run.wall_time for run in runs),
        seed=seed,
        method=method,
        rounds=rounds,
    )


def partition_and_swap(
    graph: Graph,
    x0,
    box: Optional[BoxSpec] = None,
    params: Optional[SolverParams] = None,
    global_params: Optional[GlobalParams] = None,
) -> ModuleResult:
    box = box or BoxSpec()
    params = params or SolverParams()
    global_params = global_params or GlobalParams()

    incumbent = fast_atvo(graph, x0, box, params)
    best = incumbent
    runs = [incumbent]
    rounds = []
    children = np.random.SeedSequence(global_params.seed).spawn(global_params.ps_iters)

    for round_index, child in enumerate(children, start=1):
        rng = np.random.default_rng(child)
        y = swap(incumbent.x_star, global_params.sigma, box, rng)
        candidate = fast_atvo(
            graph, y, box, dataclasses.replace(params, seed=_child_seed(child))
        )
        runs.append(candidate)

        accepted = _accepts(
            candidate.tv_final, incumbent.tv_final, global_params.literal_acceptance
        )
        if accepted:
            incumbent = candidate
        if candidate.tv_final > best.tv_final:
            best = candidate

        rounds.append(
            {
                "round": round_index,
                "candidate_tv": candidate.tv_final,
                "candidate_q": candidate.q_value,
                "incumbent_tv": incumbent.tv_final,
                "best_tv": best.tv_final,
                "accepted": accepted,
            }
        )
        logger.debug(
            "round %d: candidate TV_Q %.10g, incumbent %.10g%s",
            round_index,
            candidate.tv_final,
            incumbent.tv_final,
            " (accepted)" if accepted else "",
        )

    logger.info(
        "partition and swap: %d rounds, best Q=%.6f", global_params.ps_iters, best.q_value
    )
    return _combine(best, runs, "ps", global_params.seed, rounds)


def multistart(
    graph: Graph,
    box: Optional[BoxSpec] = None,
    params: Optional[SolverParams] = None,
    restarts: int = 10,
    seed: int = 0,
    workers: int = 1,
) -> ModuleResult:
    """Best of ``restarts`` runs from uniform random points in the box.

    Each restart owns a child of ``SeedSequence(seed)``, so the first ``k`` restarts do not depend
    on how many follow them or on ``workers``.
    """

    if restarts < 1:
        raise ParameterError("restarts must be >= 1")
    box = box or BoxSpec()
    params = params or SolverParams()

    def run(child: np.random.SeedSequence) -> ModuleResult:
        rng = np.random.default_rng(child)
        x0 = rng.uniform(-box.a, box.b, size=graph.n)
        return fast_atvo(graph, x0, box, dataclasses.replace(params, seed=_child_seed(child)))

    children = np.random.SeedSequence(seed).spawn(restarts)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            runs = list(pool.map(run, children))
    else:
        runs = [run(child) for child in children]

    best = runs[0]
    rounds = []
    for index, result in enumerate(runs, start=1):
        if result.tv_final > best.tv_final:
            best = result
        rounds.append(
            {
                "round": index,
                "candidate_tv": result.tv_final,
                "candidate_q": result.q_value,
                "best_tv": best.tv_final,
            }
        )

    logger.info("multistart: %d restarts, best Q=%.6f", restarts, best.q_value)
    return _combine(best, runs, "multistart", seed, rounds)
