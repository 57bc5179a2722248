"""Small structured and random graphs used by the oracle suite and the benchmark harness."""
from modtv.graph import EmptyGraphError, Graph

import numpy as np

from typing import Optional, Sequence


def barbell() -> Graph:
    """Two triangles {0,1,2} and {3,4,5} joined by the edge 2 -- 3."""

    edges = [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5), (5, 3)]
    return Graph.from_edges(6, [u for u, _ in edges], [v for _, v in edges])


def complete_graph(n: int) -> Graph:
    rows, cols = np.triu_indices(n, k=1)
    return Graph.from_edges(n, rows, cols)


def two_cliques(k: int) -> Graph:
    """Two disjoint copies of the complete graph on ``k`` nodes."""

    rows, cols = np.triu_indices(k, k=1)
    return Graph.from_edges(
        2 * k, np.concatenate([rows, rows + k]), np.concatenate([cols, cols + k])
    )


def block_labels(sizes: Sequence[int]) -> np.ndarray:
    return np.repeat(np.arange(len(sizes)), sizes)


def _sample(probabilities: np.ndarray, rng: np.random.Generator, max_tries: int) -> Graph:
    """Independent edges ``i < j`` with the given probabilities, redrawn while edgeless."""

    n = probabilities.shape[0]
    rows, cols = np.triu_indices(n, k=1)
    for _ in range(max_tries):
        keep = rng.random(rows.shape[0]) < probabilities[rows, cols]
        if keep.any():
            return Graph.from_edges(n, rows[keep], cols[keep])
    raise EmptyGraphError("no edge drawn in %d attempts" % max_tries)


def erdos_renyi(
    n: int, prob: float, rng: Optional[np.random.Generator] = None, max_tries: int = 100
) -> Graph:
    rng = rng if rng is not None else np.random.default_rng()
    return _sample(np.full((n, n), prob), rng, max_tries)


def planted_partition(
    sizes: Sequence[int],
    p_in: float,
    p_out: float,
    rng: Optional[np.random.Generator] = None,
    max_tries: int = 100,
) -> Graph:
    """Block model: ``p_in`` inside a block, ``p_out`` across blocks."""

    rng = rng if rng is not None else np.random.default_rng()
    labels = block_labels(sizes)
    probabilities = np.where(labels[:, None] == labels[None, :], p_in, p_out)
    return _sample(probabilities, rng, max_tries)
