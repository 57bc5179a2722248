from modtv.exception import ParameterError
from modtv.graph import Graph
from modtv.objective.tv import check_exponent, grad_full_counted, obj_from_grad, tv_q_p

import numpy as np

from dataclasses import dataclass


@dataclass
class OperationCounter:
    """Work done on one objective.

    ``pair_terms`` counts the pair differences raised to a power while computing gradients, as
    reported by the code that evaluated them.
    """

    fevals: int = 0
    gevals: int = 0
    full_gradients: int = 0
    incremental_gradients: int = 0
    pair_terms: int = 0

    def charge_full(self, terms: int) -> None:
        self.gevals += 1
        self.full_gradients += 1
        self.pair_terms += terms

    def charge_incremental(self, terms: int) -> None:
        self.gevals += 1
        self.incremental_gradients += 1
        self.pair_terms += terms


class Objective:
    """``f = sign * TV_Q^p`` on a fixed graph; the solver uses ``sign = -1`` and minimises."""

    def __init__(self, graph: Graph, p: float = 1.4, sign: float = -1.0) -> None:
        check_exponent(p)
        if sign not in (1.0, -1.0):
            raise ParameterError("sign must be +1 or -1")

        self.graph = graph
        self.p = p
        self.sign = sign
        self.counter = OperationCounter()

    def value(self, x) -> float:
        self.counter.fevals += 1
        return self.sign * tv_q_p(self.graph, x, self.p)

    def gradient(self, x) -> np.ndarray:
        grad, terms = grad_full_counted(self.graph, x, self.p)
        self.counter.charge_full(terms)
        return self.sign * grad

    def value_from_gradient(self, grad, x) -> float:
        """f at ``x`` given ``grad = grad f(x)``; linear cost."""
        self.counter.fevals += 1
        return obj_from_grad(grad, x, self.p)
