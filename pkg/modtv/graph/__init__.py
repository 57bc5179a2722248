"""
Graph core
==========

Immutable undirected weighted graphs, node sets and the feasible box of the relaxed problem.

The adjacency is stored as a canonical CSR matrix holding both directions of every edge. A
self-loop ``i -- i`` of weight ``w`` is stored once as ``A_ii = w`` so that ``d_i = sum_j A_ij``
counts it exactly once.
"""
from modtv.exception import DimensionError, ModTVError, ParameterError

import numpy as np
from scipy import sparse

from dataclasses import dataclass
from typing import Iterable, Optional


class GraphError(ModTVError):
    pass


class GraphFormatError(GraphError):
    def __init__(self, error: str, filename: str, lineno: Optional[int] = None):
        super().__init__(error)

        self.error = error
        self.filename = filename
        self.lineno = lineno

    def __str__(self):
        if self.lineno is None:
            return "file %s: %s" % (self.filename, self.error)
        return "file %s, line %d: %s" % (self.filename, self.lineno, self.error)


class NegativeWeightError(GraphFormatError):
    pass


class GraphFileError(GraphError):
    def __init__(self, error: Exception, filename: str):
        super().__init__(error)

        self.error = error
        self.filename = filename

    def __str__(self):
        return "file %s: %s" % (self.filename, self.error)


class EmptyGraphError(GraphError):
    pass


class Graph:
    """Undirected graph with nonnegative weights, its degree vector and volume.

    Instances are read-only: the adjacency arrays and the degree vector are flagged non-writeable
    so a graph can be shared by concurrent solver runs.
    """

    def __init__(self, adjacency: sparse.spmatrix) -> None:
        matrix = sparse.csr_matrix(adjacency, dtype=np.float64, copy=True)
        if matrix.shape[0] != matrix.shape[1]:
            raise GraphError("adjacency must be square, got shape %s" % (matrix.shape,))
        matrix.sum_duplicates()
        matrix.eliminate_zeros()
        matrix.sort_indices()

        if matrix.nnz and matrix.data.min() < 0:
            raise GraphError("adjacency has negative weights")
        asymmetry = abs(matrix - matrix.T)
        if asymmetry.nnz:
            scale = matrix.data.max() if matrix.nnz else 1.0
            if asymmetry.max() > 1e-12 * scale:
                raise GraphError("adjacency is not symmetric")
            # summation order may differ between (i, j) and (j, i)
            matrix = sparse.csr_matrix((matrix + matrix.T) * 0.5)
            matrix.sort_indices()

        degrees = np.asarray(matrix.sum(axis=1)).ravel()
        volume = float(degrees.sum())
        if not volume > 0:
            raise EmptyGraphError("graph has zero volume")

        for array in (matrix.data, matrix.indices, matrix.indptr, degrees):
            array.setflags(write=False)

        self._adjacency = matrix
        self._degrees = degrees
        self._volume = volume
        # node numbering of the file the graph was read from, used when writing node ids back
        self.indexing = "zero-based"

        rows = np.repeat(np.arange(matrix.shape[0]), np.diff(matrix.indptr))
        rows.setflags(write=False)
        self._edge_rows = rows

    @classmethod
    def from_edges(
        cls,
        n: int,
        rows: Iterable[int],
        cols: Iterable[int],
        weights: Optional[Iterable[float]] = None,
    ) -> "Graph":
        """Builds a graph from a list of undirected edges.

        Every ``(u, v, w)`` is an undirected edge: both directions are stored for ``u != v``, a loop
        is stored once. Repeated edges have their weights summed.
        """

        rows = np.fromiter(rows, dtype=np.int64)
        cols = np.fromiter(cols, dtype=np.int64)
        if weights is None:
            weights = np.ones(rows.shape[0])
        else:
            weights = np.fromiter(weights, dtype=np.float64)
        if not (rows.shape == cols.shape == weights.shape):
            raise GraphError("edge arrays differ in length")
        if rows.size and (min(rows.min(), cols.min()) < 0 or max(rows.max(), cols.max()) >= n):
            raise GraphError("edge endpoint out of range for %d nodes" % n)
        if weights.size and weights.min() < 0:
            raise GraphError("negative edge weight")

        off = rows != cols
        all_rows = np.concatenate([rows, cols[off]])
        all_cols = np.concatenate([cols, rows[off]])
        all_weights = np.concatenate([weights, weights[off]])
        return cls(sparse.coo_matrix((all_weights, (all_rows, all_cols)), shape=(n, n)))

    @property
    def n(self) -> int:
        return self._adjacency.shape[0]

    @property
    def m(self) -> int:
        """Number of undirected edges, loops included."""
        loops = int(np.count_nonzero(self._adjacency.diagonal()))
        return (self._adjacency.nnz - loops) // 2 + loops

    @property
    def adjacency(self) -> sparse.csr_matrix:
        return self._adjacency

    @property
    def degrees(self) -> np.ndarray:
        return self._degrees

    @property
    def volume(self) -> float:
        return self._volume

    @property
    def edge_rows(self) -> np.ndarray:
        """Row index of every stored entry, aligned with ``adjacency.indices``."""
        return self._edge_rows

    @property
    def edge_cols(self) -> np.ndarray:
        return self._adjacency.indices

    @property
    def edge_weights(self) -> np.ndarray:
        return self._adjacency.data

    def neighbors(self, i: int):
        start, end = self._adjacency.indptr[i], self._adjacency.indptr[i + 1]
        return self._adjacency.indices[start:end], self._adjacency.data[start:end]

    def check_degrees(self) -> bool:
        recomputed = np.bincount(self._edge_rows, weights=self.edge_weights, minlength=self.n)
        return bool(np.allclose(recomputed, self._degrees, rtol=1e-12, atol=0.0))

    def as_vector(self, x, what: str = "x") -> np.ndarray:
        vector = np.asarray(x, dtype=np.float64)
        if vector.ndim != 1 or vector.shape[0] != self.n:
            raise DimensionError(self.n, vector.size if vector.ndim == 1 else -1, what)
        return vector

    def __repr__(self):
        return "Graph(n=%d, m=%d, volume=%g)" % (self.n, self.m, self._volume)


class NodeSet:
    """A subset of the nodes ``0 .. n-1`` in indicator representation."""

    def __init__(self, membership) -> None:
        membership = np.array(membership, dtype=bool)
        if membership.ndim != 1:
            raise GraphError("node set membership must be one-dimensional")
        membership.setflags(write=False)
        self._membership = membership

    @classmethod
    def from_indices(cls, n: int, indices: Iterable[int]) -> "NodeSet":
        membership = np.zeros(n, dtype=bool)
        indices = np.asarray(list(indices), dtype=np.int64)
        if indices.size and (indices.min() < 0 or indices.max() >= n):
            raise GraphError("node index out of range for %d nodes" % n)
        membership[indices] = True
        return cls(membership)

    @classmethod
    def empty(cls, n: int) -> "NodeSet":
        return cls(np.zeros(n, dtype=bool))

    @classmethod
    def full(cls, n: int) -> "NodeSet":
        return cls(np.ones(n, dtype=bool))

    @property
    def n(self) -> int:
        return self._membership.shape[0]

    @property
    def membership(self) -> np.ndarray:
        return self._membership

    def indicator(self) -> np.ndarray:
        return self._membership.astype(np.float64)

    def indices(self) -> np.ndarray:
        return np.flatnonzero(self._membership)

    def complement(self) -> "NodeSet":
        return NodeSet(~self._membership)

    def size(self) -> int:
        return int(np.count_nonzero(self._membership))

    def fraction(self) -> float:
        return self.size() / self.n if self.n else 0.0

    def __len__(self):
        return self.size()

    def __contains__(self, i):
        return 0 <= i < self.n and bool(self._membership[i])

    def __eq__(self, other):
        if not isinstance(other, NodeSet):
            return NotImplemented
        return self.n == other.n and bool(np.array_equal(self._membership, other._membership))

    def __hash__(self):
        return hash(self._membership.tobytes())

    def __repr__(self):
        return "NodeSet(%s)" % self.indices().tolist()


@dataclass(frozen=True)
class BoxSpec:
    """The feasible box ``[-a, b]^n``."""

    a: float = 1.0
    b: float = 1.0

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0) or not np.isfinite([self.a, self.b]).all():
            raise ParameterError("box bounds must be positive and finite, got a=%r b=%r"
                                 % (self.a, self.b))

    @property
    def lower(self) -> float:
        return -self.a

    @property
    def upper(self) -> float:
        return self.b

    def vertex(self, s: NodeSet) -> np.ndarray:
        """Returns ``b 1_S - a 1_{S bar}``."""
        return np.where(s.membership, self.b, -self.a)

    def contains(self, x: np.ndarray) -> bool:
        return bool(np.all(x >= -self.a) and np.all(x <= self.b))
