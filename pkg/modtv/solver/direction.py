"""Working-set selection and the spectral (Barzilai-Borwein) scaled gradient direction."""
from modtv.exception import SolverError
from modtv.solver.active_set import violations
from modtv.solver.params import SolverParams
from modtv.solver.state import SolverState

import numpy as np


def next_working_set_size(current: int, cap: int) -> int:
    """Doubles each iteration up to ``cap``."""
    return min(2 * current, cap)


def select_working_set(state: SolverState, target_size: int) -> np.ndarray:
    """Sorted indices of W: the worst stationarity violator in N plus random members of N."""

    free = state.free
    if free.size == 0:
        raise SolverError("working set requested with an empty non-active set")

    scores = violations(state.x[free], state.grad[free], state.box)
    worst = free[int(np.argmax(scores))]
    if free.size == 1 or target_size <= 1:
        return np.array([worst], dtype=np.int64)

    others = free[free != worst]
    extra = min(target_size - 1, others.size)
    picked = state.rng.choice(others, size=extra, replace=False)
    return np.sort(np.concatenate([[worst], picked]).astype(np.int64))


def _fallback_coefficient(x_w: np.ndarray, g_w: np.ndarray, params: SolverParams) -> float:
    grad_norm = float(np.linalg.norm(g_w))
    if grad_norm == 0.0:
        return 1.0
    return max(params.mu_min, min(1.0, float(np.linalg.norm(x_w)) / grad_norm))


def bb_coefficient(state: SolverState, w: np.ndarray, params: SolverParams) -> float:
    """Safeguarded inverse spectral step mu, always in [mu_min, mu_max].

    ``s`` and ``y`` are taken on the current working set from the stored previous iterate.
    """

    x_w = state.x[w]
    g_w = state.grad[w]
    if state.k < 2 or state.prev_x is None or state.prev_grad is None:
        return _fallback_coefficient(x_w, g_w, params)

    s = x_w - state.prev_x[w]
    y = g_w - state.prev_grad[w]
    ss = float(s @ s)
    sy = float(s @ y)
    if ss == 0.0:
        return _fallback_coefficient(x_w, g_w, params)

    mu_a = sy / ss
    if 0 < mu_a < params.mu_max:
        return max(params.mu_min, mu_a)
    if mu_a >= params.mu_max:
        mu_b = float(y @ y) / sy
        return max(params.mu_min, min(params.mu_max, mu_b))
    return _fallback_coefficient(x_w, g_w, params)


def direction(state: SolverState, w: np.ndarray, mu: float) -> np.ndarray:
    """-grad_W / mu on W, zero elsewhere."""

    if not mu > 0:
        raise SolverError("direction coefficient must be positive, got %r" % (mu,))
    d = np.zeros(state.n)
    d[w] = -state.grad[w] / mu
    return d
