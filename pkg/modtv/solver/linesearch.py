from modtv.exception import LineSearchError
from modtv.graph import BoxSpec
from modtv.solver.active_set import project
from modtv.solver.params import SolverParams

import numpy as np

import logging
from typing import Callable, NamedTuple


logger = logging.getLogger(__name__)


class LineSearchResult(NamedTuple):
    alpha: float
    x_next: np.ndarray
    f_next: float
    steps: int


def nonmonotone_linesearch(
    fun: Callable[[np.ndarray], float],
    x: np.ndarray,
    d: np.ndarray,
    f_ref: float,
    grad: np.ndarray,
    box: BoxSpec,
    params: SolverParams,
) -> LineSearchResult:
    """Armijo backtracking against the reference value ``f_ref``.

    Accepts ``alpha = delta^nu`` for the smallest ``nu >= 0`` with
    ``f([x + alpha d]) <= f_ref + gamma alpha grad.d``.
    """

    slope = float(np.dot(grad, d))
    if not slope < 0:
        raise LineSearchError("not a descent direction (grad.d = %r)" % slope)

    alpha = 1.0
    for nu in range(params.max_ls_steps + 1):
        x_next = project(x + alpha * d, box)
        f_next = fun(x_next)
        if not np.isfinite(f_next):
            raise LineSearchError("non-finite objective value at step %d" % nu)
        if f_next <= f_ref + params.gamma * alpha * slope:
            return LineSearchResult(alpha, x_next, f_next, nu + 1)
        alpha *= params.delta_ls

    raise LineSearchError(
        "no acceptable step after %d reductions (f_ref=%r, slope=%r); "
        "the gradient is probably inconsistent with the objective"
        % (params.max_ls_steps, f_ref, slope)
    )
