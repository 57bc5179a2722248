from modtv.graph import BoxSpec, Graph
from modtv.solver.active_set import initialize, project, stationarity_measure
from modtv.solver.fastatvo import FastATVO, fast_atvo
from modtv.solver.params import SolverParams

import numpy as np

from typing import Optional


def linear_start(graph: Graph, box: Optional[BoxSpec] = None, params=None) -> np.ndarray:
    """Sign-snapped leading eigenvector of the modularity matrix, the default starting point."""

    from modtv.spectral import leading_eigenvector

    return initialize(leading_eigenvector(graph, params).vector, box or BoxSpec())


__all__ = [
    "FastATVO",
    "SolverParams",
    "fast_atvo",
    "initialize",
    "linear_start",
    "project",
    "stationarity_measure",
]
