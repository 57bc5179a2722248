"""
Readers for the two on-disk graph formats and the node-set writer.

Edge lists are whitespace separated ``u v [w]`` lines as distributed by SNAP and DIMACS10; lines
starting with ``#`` or ``%`` are comments. Matrix Market files are read through scipy.
"""
from modtv.exception import ParameterError
from modtv.graph import (
    EmptyGraphError,
    Graph,
    GraphFileError,
    GraphFormatError,
    NegativeWeightError,
    NodeSet,
)

import numpy as np
from scipy import io as spio
from scipy import sparse

import logging
import os
from typing import List, Tuple


logger = logging.getLogger(__name__)

FORMATS = ("edge-list", "matrix-market")
INDEXINGS = ("zero-based", "one-based", "auto")

COMMENT_PREFIXES = ("#", "%")


def guess_format(path: str) -> str:
    if path.endswith((".mtx", ".mm", ".mtx.gz")):
        return "matrix-market"
    return "edge-list"


def load_graph(path: str, format: str = "auto", indexing: str = "auto") -> Graph:
    """Reads an undirected weighted graph.

    Each record is one undirected edge. Repeated edges have their weights summed, self-loops are
    kept, and node ids that never occur become isolated nodes. The resolved node numbering is
    kept on ``graph.indexing``; Matrix Market files are always one-based.
    """

    if format == "auto":
        format = guess_format(path)
    if format not in FORMATS:
        raise ParameterError("unknown graph format '%s'" % format)
    if indexing not in INDEXINGS:
        raise ParameterError("unknown indexing '%s'" % indexing)

    if format == "edge-list":
        rows, cols, weights, n, indexing = _read_edge_list(path, indexing)
    else:
        rows, cols, weights, n = _read_matrix_market(path)
        indexing = "one-based"

    graph = Graph.from_edges(n, rows, cols, weights)
    graph.indexing = indexing
    logger.info("loaded %s: n=%d m=%d vol=%g", path, graph.n, graph.m, graph.volume)
    return graph


def _open_lines(path: str) -> List[str]:
    try:
        with open(path, "r") as handle:
            return handle.readlines()
    except OSError as e:
        raise GraphFileError(e, path)


def _read_edge_list(
    path: str, indexing: str
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, int, str]:
    rows: List[int] = []
    cols: List[int] = []
    weights: List[float] = []

    for lineno, line in enumerate(_open_lines(path), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith(COMMENT_PREFIXES):
            continue

        fields = stripped.split()
        if len(fields) not in (2, 3):
            raise GraphFormatError(
                "expected 'u v [w]', found %d fields" % len(fields), path, lineno
            )
        try:
            u, v = int(fields[0]), int(fields[1])
        except ValueError:
            raise GraphFormatError("node ids must be integers", path, lineno)
        try:
            w = float(fields[2]) if len(fields) == 3 else 1.0
        except ValueError:
            raise GraphFormatError("weight '%s' is not a number" % fields[2], path, lineno)

        if u < 0 or v < 0:
            raise GraphFormatError("negative node id", path, lineno)
        if not np.isfinite(w):
            raise GraphFormatError("weight is not finite", path, lineno)
        if w < 0:
            raise NegativeWeightError("negative weight %g" % w, path, lineno)

        rows.append(u)
        cols.append(v)
        weights.append(w)

    if not rows:
        raise EmptyGraphError("file %s: no edges found" % path)

    row_array = np.asarray(rows, dtype=np.int64)
    col_array = np.asarray(cols, dtype=np.int64)
    smallest = int(min(row_array.min(), col_array.min()))

    if indexing == "auto":
        indexing = "zero-based" if smallest == 0 else "one-based"
        logger.debug("%s: detected %s node ids", path, indexing)

    if indexing == "one-based":
        if smallest == 0:
            raise GraphFormatError("node id 0 in a one-based edge list", path)
        row_array -= 1
        col_array -= 1

    n = int(max(row_array.max(), col_array.max())) + 1
    return row_array, col_array, np.asarray(weights, dtype=np.float64), n, indexing


def _read_matrix_market(path: str) -> Tuple[np.ndarray, np.ndarray, np.ndarray, int]:
    if not os.path.isfile(path):
        raise GraphFileError(FileNotFoundError("no such file"), path)

    try:
        n_rows, n_cols, _, _, field, symmetry = spio.mminfo(path)
        matrix = sparse.coo_matrix(spio.mmread(path))
    except OSError as e:
        raise GraphFileError(e, path)
    except ValueError as e:
        raise GraphFormatError(str(e), path)

    if n_rows != n_cols:
        raise GraphFormatError("matrix is %d x %d, expected square" % (n_rows, n_cols), path)
    if field == "complex":
        raise GraphFormatError("complex matrices are not graphs", path)

    rows, cols = matrix.row.astype(np.int64), matrix.col.astype(np.int64)
    weights = matrix.data.astype(np.float64)
    if weights.size and weights.min() < 0:
        raise NegativeWeightError("negative weight %g" % weights.min(), path)

    if symmetry != "general":
        # scipy expands symmetric storage; keep one triangle so each edge is listed once
        keep = rows <= cols
        rows, cols, weights = rows[keep], cols[keep], weights[keep]
    else:
        # both triangles are stored, so the graph is (A + A^T) / 2
        weights = np.where(rows == cols, weights, 0.5 * weights)

    return rows, cols, weights, int(n_rows)


def write_node_set(path: str, nodes: NodeSet, one_based: bool = False) -> None:
    """Writes one node id per line."""

    offset = 1 if one_based else 0
    with open(path, "w") as target:
        for index in nodes.indices():
            target.write("%d\n" % (index + offset))
