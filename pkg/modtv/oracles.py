"""
Reference implementations
=========================

Slow, obviously-correct counterparts of the fast code paths: set functions and their Lovász
extensions, exhaustive modularity maximisation, enumeration of TV_Q over the box vertices,
finite-difference gradients and the dense modularity matrix. Exhaustive routines refuse graphs
with more than ``MAX_NODES`` nodes.
"""
from modtv.exception import OracleError
from modtv.graph import BoxSpec, Graph, NodeSet
from modtv.graph.modularity import modularity
from modtv.objective.tv import BLOCK_ELEMENTS, tv_g, tv_q, tv_q_p

import numpy as np

import logging
from dataclasses import dataclass, field
from typing import Callable, Iterator, List, Optional, Sequence, Tuple


logger = logging.getLogger(__name__)


MAX_NODES = 20


@dataclass
class SetFunction:
    """A set function ``F: 2^V -> R`` on ``n`` nodes."""

    n: int
    evaluator: Callable[[NodeSet], float]
    name: str = "F"

    def __call__(self, nodes: NodeSet) -> float:
        return self.evaluator(nodes)


def cut_function(graph: Graph) -> SetFunction:
    """K(S), the weight of the edges leaving S."""

    def evaluate(nodes: NodeSet) -> float:
        z = nodes.indicator()
        return float(z @ (graph.adjacency @ (1.0 - z)))

    return SetFunction(graph.n, evaluate, "K")


def null_cut_function(graph: Graph) -> SetFunction:
    """K_0(S) = d(S) d(S bar) / vol, the expected cut under the null model."""

    def evaluate(nodes: NodeSet) -> float:
        inside = float(graph.degrees @ nodes.indicator())
        return inside * (graph.volume - inside) / graph.volume

    return SetFunction(graph.n, evaluate, "K0")


def modularity_function(graph: Graph) -> SetFunction:
    return SetFunction(graph.n, lambda nodes: modularity(graph, nodes), "Q")


def lovasz_extension(function: SetFunction, x) -> float:
    """``F(V) x_(1) + sum_i F(C_(i+1)) (x_(i+1) - x_(i))`` over ``x`` sorted ascending.

    ``C_(i)`` is the set of the nodes from the ``i``-th smallest component upwards; ties are broken
    by index.
    """

    x = np.asarray(x, dtype=np.float64)
    if x.shape != (function.n,):
        raise OracleError("expected a vector of length %d" % function.n)

    order = np.argsort(x, kind="stable")
    xs = x[order]
    membership = np.ones(function.n, dtype=bool)
    total = function(NodeSet(membership)) * xs[0]
    for i in range(function.n - 1):
        membership[order[i]] = False
        total += function(NodeSet(membership)) * (xs[i + 1] - xs[i])
    return float(total)


def _check_size(graph: Graph) -> None:
    if graph.n > MAX_NODES:
        raise OracleError(
            "exhaustive enumeration is limited to %d nodes, graph has %d" % (MAX_NODES, graph.n)
        )


def _subset_chunks(n: int, width: int) -> Iterator[Tuple[int, np.ndarray]]:
    """Yields ``(first mask, membership rows)`` covering all ``2^n`` subsets in mask order."""

    bits = np.arange(n, dtype=np.int64)
    total = 1 << n
    for start in range(0, total, width):
        masks = np.arange(start, min(start + width, total), dtype=np.int64)
        yield start, ((masks[:, None] >> bits[None, :]) & 1).astype(bool)


def brute_force_max_modularity(graph: Graph) -> Tuple[NodeSet, float]:
    """Exact leading module by enumerating every subset.

    Ties go to the subset with the smallest bit mask, so ``S`` and its complement resolve to the
    one that holds the lowest-indexed node of the difference.
    """

    _check_size(graph)
    n = graph.n
    rows, cols, weights = graph.edge_rows, graph.edge_cols, graph.edge_weights
    degrees = graph.degrees
    volume = graph.volume

    best_q = -np.inf
    best_members: Optional[np.ndarray] = None
    width = max(1, BLOCK_ELEMENTS // max(n, rows.size, 1))
    for _, members in _subset_chunks(n, width):
        inside = (members[:, rows] & members[:, cols]) @ weights
        degree = members @ degrees
        q = (inside - degree * degree / volume) / volume
        index = int(np.argmax(q))
        if q[index] > best_q:
            best_q = float(q[index])
            best_members = members[index].copy()

    assert best_members is not None
    return NodeSet(best_members), best_q


def vertex_max_tv(graph: Graph, box: Optional[BoxSpec] = None, check: bool = True) -> float:
    """Largest TV_Q over the ``2^n`` vertices ``b 1_S - a 1_(S bar)`` of the box.

    Each vertex is evaluated from its pairwise differences, independently of any modularity code.
    With ``check`` the result is compared against ``vol (a + b) max_S Q(S)`` and an
    :class:`OracleError` is raised when they differ by more than ``1e-9``.
    """

    _check_size(graph)
    box = box or BoxSpec()
    n = graph.n
    d = graph.degrees
    volume = graph.volume
    rows, cols, weights = graph.edge_rows, graph.edge_cols, graph.edge_weights

    best = -np.inf
    width = max(1, BLOCK_ELEMENTS // max(n * n, 1))
    for _, members in _subset_chunks(n, width):
        x = np.where(members, box.b, -box.a)
        gaps = np.abs(x[:, :, None] - x[:, None, :])
        null_part = 0.5 * np.einsum("i,cij,j->c", d, gaps, d) / volume
        graph_part = 0.5 * (np.abs(x[:, rows] - x[:, cols]) @ weights)
        best = max(best, float(np.max(null_part - graph_part)))

    if check:
        _, q_star = brute_force_max_modularity(graph)
        expected = volume * (box.a + box.b) * q_star
        if abs(best - expected) > 1e-9 * max(1.0, abs(expected)):
            raise OracleError(
                "vertex maximum %.15g differs from vol (a + b) max Q = %.15g" % (best, expected)
            )
    return best


def finite_diff_gradient(graph: Graph, x, p: float, h: float = 1e-6) -> np.ndarray:
    """Central differences of TV_Q^p; components of ``x`` must be at least ``10 h`` apart."""

    x = graph.as_vector(x)
    if not h > 0:
        raise OracleError("step must be positive")
    if x.size > 1:
        spacing = float(np.min(np.diff(np.sort(x))))
        if spacing < 10 * h:
            raise OracleError(
                "components are %.3g apart, central differences need at least %.3g"
                % (spacing, 10 * h)
            )

    grad = np.empty(graph.n)
    step = np.zeros(graph.n)
    for i in range(graph.n):
        step[i] = h
        grad[i] = (tv_q_p(graph, x + step, p) - tv_q_p(graph, x - step, p)) / (2 * h)
        step[i] = 0.0
    return grad


def dense_modularity_matrix(graph: Graph) -> np.ndarray:
    """``A - d d^T / vol`` as a dense array."""

    d = graph.degrees
    return graph.adjacency.toarray() - np.outer(d, d) / graph.volume


def tv_q_naive(graph: Graph, x) -> float:
    """``1/2 sum_ij (d_i d_j / vol - A_ij) |x_i - x_j|`` by a plain double loop."""

    x = graph.as_vector(x)
    weights = -dense_modularity_matrix(graph)
    total = 0.0
    for i in range(graph.n):
        for j in range(i + 1, graph.n):
            total += weights[i, j] * abs(x[i] - x[j])
    return total


@dataclass
class OracleCheck:
    name: str
    expected: float
    actual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return abs(self.expected - self.actual) <= self.tolerance * max(1.0, abs(self.expected))


@dataclass
class OracleReport:
    n: int
    max_modularity: float
    community: NodeSet
    checks: List[OracleCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def failures(self) -> List[OracleCheck]:
        return [check for check in self.checks if not check.passed]

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "max_modularity": self.max_modularity,
            "community": self.community.indices().tolist(),
            "passed": self.passed,
            "checks": [
                {
                    "name": check.name,
                    "expected": check.expected,
                    "actual": check.actual,
                    "passed": check.passed,
                }
                for check in self.checks
            ],
        }


DEFAULT_BOXES = ((1.0, 1.0), (2.0, 3.0), (0.5, 1.0))


def verify_graph(
    graph: Graph,
    boxes: Sequence[Tuple[float, float]] = DEFAULT_BOXES,
    samples: int = 5,
    seed: int = 0,
) -> OracleReport:
    """Runs the exhaustive and identity checks on a small graph and collects the outcomes."""

    _check_size(graph)
    rng = np.random.default_rng(seed)
    community, q_star = brute_force_max_modularity(graph)
    report = OracleReport(graph.n, q_star, community)
    volume = graph.volume

    for a, b in boxes:
        box = BoxSpec(a, b)
        report.checks.append(
            OracleCheck(
                "vertex maximum a=%g b=%g" % (a, b),
                volume * (a + b) * q_star,
                vertex_max_tv(graph, box, check=False),
                1e-9,
            )
        )
        subset = NodeSet(rng.random(graph.n) < 0.5)
        report.checks.append(
            OracleCheck(
                "vertex value a=%g b=%g" % (a, b),
                volume * (a + b) * modularity(graph, subset),
                tv_q(graph, box.vertex(subset)),
                1e-10,
            )
        )

    cut = cut_function(graph)
    q_function = modularity_function(graph)
    for sample in range(samples):
        x = rng.standard_normal(graph.n)
        subset = NodeSet(x > 0)
        report.checks.append(
            OracleCheck(
                "complement symmetry #%d" % sample,
                modularity(graph, subset),
                modularity(graph, subset.complement()),
                1e-12,
            )
        )
        report.checks.append(
            OracleCheck("cut extension #%d" % sample, tv_g(graph, x), lovasz_extension(cut, x),
                        1e-10)
        )
        report.checks.append(
            OracleCheck(
                "modularity extension #%d" % sample,
                tv_q(graph, x),
                volume * lovasz_extension(q_function, x),
                1e-10,
            )
        )

    for failure in report.failures():
        logger.warning(
            "%s: expected %.15g, got %.15g", failure.name, failure.expected, failure.actual
        )
    return report
