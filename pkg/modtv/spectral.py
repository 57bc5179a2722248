"""
Linear method
=============

The leading eigenvector of the modularity matrix ``B = A - d d^T / vol``, found by power iteration
on ``B + c I`` with ``c`` large enough to make the top of the spectrum dominant. It is both the
classic spectral bipartition and the default starting point of the active-set solver.
"""
from modtv.exception import ParameterError
from modtv.graph import BoxSpec, Graph, NodeSet
from modtv.graph.modularity import modularity, threshold_sweep
from modtv.objective.tv import grad_full, tv_q, tv_q_p
from modtv.result import ModuleResult
from modtv.solver.active_set import stationarity_measure

import numpy as np

import logging
import time
from dataclasses import dataclass
from typing import Optional


logger = logging.getLogger(__name__)


ROUNDINGS = ("sign", "sweep")


@dataclass(frozen=True)
class PowerIterParams:
    """``shift=None`` picks the row-sum bound ``max_i (d_i + d_i max_j d_j / vol)``."""

    tol: float = 1e-8
    max_iters: int = 10000
    shift: Optional[float] = None
    seed: int = 0

    def __post_init__(self):
        if not self.tol > 0:
            raise ParameterError("tol must be > 0")
        if self.max_iters < 1:
            raise ParameterError("max_iters must be >= 1")
        if self.shift is not None and not self.shift >= 0:
            raise ParameterError("shift must be >= 0")


@dataclass
class EigenPair:
    vector: np.ndarray
    eigenvalue: float
    iterations: int
    residual: float
    converged: bool


def modularity_matvec(graph: Graph, v) -> np.ndarray:
    """``(A - d d^T / vol) v`` in O(m + n)."""

    v = graph.as_vector(v, "v")
    d = graph.degrees
    return graph.adjacency @ v - d * (float(d @ v) / graph.volume)


def default_shift(graph: Graph) -> float:
    d = graph.degrees
    return float(np.max(d + d * d.max() / graph.volume))


def _normalize_sign(v: np.ndarray) -> np.ndarray:
    scale = float(np.max(np.abs(v)))
    if scale == 0.0:
        return v
    v = v / scale
    nonzero = np.flatnonzero(v)
    if v[nonzero[0]] < 0:
        v = -v
    return v


def leading_eigenvector(graph: Graph, params: Optional[PowerIterParams] = None) -> EigenPair:
    params = params or PowerIterParams()
    n = graph.n
    if n < 2:
        raise ParameterError("the leading eigenvector needs at least two nodes")

    shift = default_shift(graph) if params.shift is None else params.shift
    rng = np.random.default_rng(params.seed)
    v = rng.standard_normal(n)
    v -= v.mean()
    v /= np.linalg.norm(v)

    eigenvalue = 0.0
    residual = np.inf
    best = (np.inf, v, eigenvalue)
    for iteration in range(1, params.max_iters + 1):
        bv = modularity_matvec(graph, v)
        eigenvalue = float(v @ bv)

        x = v / np.max(np.abs(v))
        residual = float(np.max(np.abs(bv / np.max(np.abs(v)) - eigenvalue * x)))
        bound = params.tol * abs(eigenvalue) if eigenvalue != 0.0 else params.tol
        if residual < best[0]:
            best = (residual, v, eigenvalue)
        if residual <= bound:
            logger.debug("power iteration converged after %d steps, lambda=%.10g",
                         iteration, eigenvalue)
            return EigenPair(_normalize_sign(v), eigenvalue, iteration, residual, True)

        w = bv + shift * v
        norm = np.linalg.norm(w)
        if norm == 0.0:
            break
        v = w / norm

    residual, v, eigenvalue = best
    logger.warning(
        "power iteration stopped after %d steps with residual %.3g (lambda=%.10g)",
        params.max_iters,
        residual,
        eigenvalue,
    )
    return EigenPair(_normalize_sign(v), eigenvalue, params.max_iters, residual, False)


def linear_module(
    graph: Graph,
    params: Optional[PowerIterParams] = None,
    rounding: str = "sign",
    box: Optional[BoxSpec] = None,
    p: float = 1.4,
) -> ModuleResult:
    """The linear method: split the leading eigenvector by sign, or take its best level set.

    The returned ``x_star`` is the box vertex of the community, so its TV values can be compared
    with the solver's directly.
    """

    if rounding not in ROUNDINGS:
        raise ParameterError("rounding must be one of %s" % ", ".join(ROUNDINGS))
    params = params or PowerIterParams()
    box = box or BoxSpec()
    start = time.perf_counter()

    pair = leading_eigenvector(graph, params)
    if rounding == "sweep":
        community, q_value = threshold_sweep(graph, pair.vector)
    else:
        community = NodeSet(pair.vector >= 0)
        q_value = modularity(graph, community)

    x_star = box.vertex(community)
    tv_p = tv_q_p(graph, x_star, p)
    elapsed = time.perf_counter() - start
    logger.info("linear method: lambda=%.6g, Q=%.6f, |S|=%d", pair.eigenvalue, q_value,
                community.size())
    return ModuleResult(
        x_star=x_star,
        community=community,
        q_value=q_value,
        tv_p_init=tv_p,
        tv_p_final=tv_p,
        tv_final=tv_q(graph, x_star),
        stationarity=stationarity_measure(x_star, -grad_full(graph, x_star, p), box),
        iters=pair.iterations,
        fevals=0,
        gevals=0,
        wall_time=elapsed,
        seed=params.seed,
        method="linear",
    )
