from modtv.graph import BoxSpec
from modtv.solver.params import SolverParams

import numpy as np

from collections import deque
from dataclasses import dataclass
from typing import Deque, Optional, Tuple


@dataclass
class Checkpoint:
    """Iterate ``x^{l^j}`` with its gradient and the direction computed there."""

    k: int
    x: np.ndarray
    grad: np.ndarray
    f: float
    d: Optional[np.ndarray] = None
    w: Optional[np.ndarray] = None


class SolverState:
    """Mutable state of one solver run. ``grad`` is the gradient of the minimised ``f``."""

    def __init__(
        self,
        x: np.ndarray,
        grad: np.ndarray,
        f: float,
        box: BoxSpec,
        params: SolverParams,
        rng: np.random.Generator,
    ) -> None:
        self.x = x
        self.grad = grad
        self.box = box
        self.params = params
        self.rng = rng

        self.k = 0
        self.j = 0
        self.iterations = 0
        self.f_current: Optional[float] = f
        self.history: Deque[float] = deque([f], maxlen=params.M + 1)
        self.f_ref = f
        self.checkpoint = Checkpoint(0, x.copy(), grad.copy(), f)
        self.delta = params.delta0

        self.prev_x: Optional[np.ndarray] = None
        self.prev_grad: Optional[np.ndarray] = None
        self.ws_target = params.ws_start

        empty = np.empty(0, dtype=np.int64)
        self.sets: Tuple[np.ndarray, np.ndarray, np.ndarray] = (empty, empty, empty)

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def free(self) -> np.ndarray:
        return self.sets[2]

    def move_to(self, x_new: np.ndarray, grad_new: np.ndarray, f_new: Optional[float]) -> None:
        self.prev_x = self.x
        self.prev_grad = self.grad
        self.x = x_new
        self.grad = grad_new
        self.f_current = f_new
        self.k += 1
        self.iterations += 1

    def accept_checkpoint(self, f: float) -> None:
        """New reference point at the current iterate (f < f_R guaranteed by the caller)."""

        self.j += 1
        self.history.append(f)
        self.f_ref = max(self.history)
        self.checkpoint = Checkpoint(self.k, self.x.copy(), self.grad.copy(), f)

    def backtrack(self) -> Checkpoint:
        checkpoint = self.checkpoint
        self.x = checkpoint.x.copy()
        self.grad = checkpoint.grad.copy()
        self.f_current = checkpoint.f
        self.k = checkpoint.k
        return checkpoint
