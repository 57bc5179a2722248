from modtv.exception import DimensionError
from modtv.graph import Graph, NodeSet

import numpy as np

from typing import Tuple


def modularity(graph: Graph, nodes: NodeSet) -> float:
    """Q(S) = (1/vol) sum_{i,j in S} (A_ij - d_i d_j / vol)."""

    if nodes.n != graph.n:
        raise DimensionError(graph.n, nodes.n, "node set")

    z = nodes.indicator()
    inside = float(z @ (graph.adjacency @ z))
    degree = float(graph.degrees @ z)
    return (inside - degree * degree / graph.volume) / graph.volume


def level_set_modularities(graph: Graph, x) -> Tuple[np.ndarray, np.ndarray]:
    """Modularity of every upper level set of ``x``.

    Returns ``(order, q)`` where ``order`` sorts ``x`` ascending (stable, so ties keep index order)
    and ``q[t]`` is the modularity of ``{order[t], ..., order[n-1]}``. The values are accumulated
    while the suffix grows one node at a time, so the whole profile costs O(m + n log n).
    """

    x = graph.as_vector(x)
    n = graph.n
    order = np.argsort(x, kind="stable")
    adjacency = graph.adjacency
    degrees = graph.degrees
    volume = graph.volume

    inside_set = np.zeros(n, dtype=bool)
    q = np.empty(n)
    inside = 0.0
    degree = 0.0
    for t in range(n - 1, -1, -1):
        v = order[t]
        start, end = adjacency.indptr[v], adjacency.indptr[v + 1]
        neighbours = adjacency.indices[start:end]
        weights = adjacency.data[start:end]
        inside_set[v] = True
        linked = weights[inside_set[neighbours]]
        loop = weights[neighbours == v]
        # edges to earlier members count in both directions, the loop once
        inside += 2.0 * (linked.sum() - loop.sum()) + loop.sum()
        degree += degrees[v]
        q[t] = (inside - degree * degree / volume) / volume

    return order, q


def threshold_sweep(graph: Graph, x) -> Tuple[NodeSet, float]:
    """Best level set ``C = {k : x_k >= x_i}`` of ``x`` by modularity.

    Candidates are the level sets attached to sorted positions ``2..n``; a block of tied values
    forms one level set. Among equal modularities the smaller set wins.
    """

    x = graph.as_vector(x)
    n = graph.n
    order, q = level_set_modularities(graph, x)
    if n == 1:
        return NodeSet.full(1), float(q[0])

    sorted_x = x[order]
    # first sorted position of each tied block
    starts = np.searchsorted(sorted_x, sorted_x[1:], side="left")

    best_start = -1
    best_q = -np.inf
    for start in np.unique(starts)[::-1]:
        if q[start] > best_q:
            best_q = float(q[start])
            best_start = int(start)

    return NodeSet.from_indices(n, order[best_start:]), best_q
