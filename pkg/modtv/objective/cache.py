"""
Incremental gradients
=====================

When only the coordinates in a working set ``W`` move, the gradient components outside ``W``
change only through their pairs with ``W``. Splitting each component into the part summed over
``j in W`` (phi) and the rest (rho) gives

    grad_i f(x_new) = phi_i(x_new) + rho_i(x_new)                    i in W
    grad_h f(x_new) = phi_h(x_new) + grad_h f(x_old) - phi_h(x_old)  h not in W

which touches |W|(|W|-1)/2 + 2|W|(n-|W|) distinct pairs instead of n(n-1)/2, the better choice
while |W| < (n-1)/3. The operation counter is charged with the pair differences actually
evaluated by each path.
"""
from modtv.exception import CacheError, DimensionError
from modtv.graph import Graph
from modtv.objective import Objective
from modtv.objective.tv import row_blocks, signed_power

import numpy as np

import logging
from typing import Optional


logger = logging.getLogger(__name__)


def prefers_incremental(n: int, w: int) -> bool:
    return w < (n - 1) / 3.0


class GradientCache:
    """Gradient of ``objective`` at the last committed point.

    The owner commits every accepted point; ``version`` counts commits so callers can tell whether
    a gradient they hold is still current. A cache handed a non-finite gradient stops being
    ``valid`` and refuses incremental updates until it is restored or refreshed.
    """

    def __init__(
        self,
        objective: Objective,
        x,
        refresh_every: int = 1000,
        drift_tol: float = 1e-8,
        audit_rate: float = 0.0,
        rng: Optional[np.random.Generator] = None,
    ) -> None:
        self.objective = objective
        self.refresh_every = refresh_every
        self.drift_tol = drift_tol
        self.audit_rate = audit_rate
        self.rng = rng if rng is not None else np.random.default_rng(0)

        self.x = np.array(objective.graph.as_vector(x))
        self.grad = objective.gradient(self.x)
        self.valid = True
        self.version = 0
        self.updates_since_refresh = 0
        self.max_drift = 0.0

    @property
    def graph(self) -> Graph:
        return self.objective.graph

    @property
    def p(self) -> float:
        return self.objective.p

    def evaluate(self, x_new, w) -> np.ndarray:
        """Gradient at ``x_new`` (differing from the cached point on ``w`` only), not committed."""

        n = self.graph.n
        w = np.unique(np.asarray(w, dtype=np.int64))
        if prefers_incremental(n, w.size):
            return grad_incremental(self, x_new, w)
        return self.objective.gradient(x_new)

    def commit(self, x_new, grad_new: np.ndarray, incremental: bool = True) -> None:
        self.x = np.array(x_new, dtype=np.float64)
        self.grad = grad_new
        self.version += 1
        if not np.all(np.isfinite(grad_new)):
            self.invalidate()
            raise CacheError("non-finite gradient at version %d" % self.version)
        self.valid = True

        if not incremental:
            self.updates_since_refresh = 0
            return

        self.updates_since_refresh += 1
        audit = self.audit_rate > 0 and self.rng.random() < self.audit_rate
        if audit or self.updates_since_refresh >= self.refresh_every:
            self.refresh()

    def advance(self, x_new, w) -> np.ndarray:
        """Moves the cache to ``x_new`` and returns the new gradient."""

        n = self.graph.n
        w = np.unique(np.asarray(w, dtype=np.int64))
        incremental = prefers_incremental(n, w.size)
        grad = grad_incremental(self, x_new, w) if incremental else self.objective.gradient(x_new)
        self.commit(x_new, grad, incremental)
        return grad

    def invalidate(self) -> None:
        if self.valid:
            logger.debug("gradient cache invalidated at version %d", self.version)
        self.valid = False

    def restore(self, x, grad: np.ndarray) -> None:
        """Resets to a point whose gradient is already known (a stored checkpoint)."""

        self.x = np.array(x, dtype=np.float64)
        self.grad = np.array(grad, dtype=np.float64)
        self.valid = True
        self.version += 1

    def refresh(self) -> float:
        """Recomputes the gradient from scratch and returns the relative drift it removed."""

        exact = self.objective.gradient(self.x)
        if not np.all(np.isfinite(exact)):
            self.invalidate()
            raise CacheError("non-finite gradient at version %d" % self.version)
        scale = max(float(np.max(np.abs(exact))), np.finfo(float).tiny)
        drift = float(np.max(np.abs(exact - self.grad))) / scale
        self.max_drift = max(self.max_drift, drift)
        if drift > self.drift_tol:
            logger.warning(
                "incremental gradient drifted %.3g relative after %d updates; refreshed",
                drift,
                self.updates_since_refresh,
            )
        self.grad = exact
        self.valid = True
        self.updates_since_refresh = 0
        return drift


def grad_incremental(cache: GradientCache, x_new, w, p: Optional[float] = None) -> np.ndarray:
    """Gradient at ``x_new`` from the cached gradient, updating only pairs that touch ``w``."""

    if not cache.valid:
        raise CacheError("gradient cache at version %d is not valid" % cache.version)
    if p is not None and p != cache.p:
        raise CacheError("cache holds exponent %g, asked for %g" % (cache.p, p))

    graph = cache.graph
    n = graph.n
    p = cache.p
    sign = cache.objective.sign
    x_old = cache.x
    x_new = np.asarray(x_new, dtype=np.float64)
    if x_new.shape != (n,):
        raise DimensionError(n, x_new.size, "x_new")

    w = np.unique(np.asarray(w, dtype=np.int64))
    in_w = np.zeros(n, dtype=bool)
    in_w[w] = True
    if np.any(x_new[~in_w] != x_old[~in_w]):
        raise CacheError("x_new differs from the cached point outside the working set")

    new = cache.grad.copy()
    if w.size == 0:
        return new

    d = graph.degrees
    volume = graph.volume
    inside = np.empty(w.size)
    outside = np.zeros(n)
    terms = 0

    # rank-one part d_i d_j / vol
    for block in row_blocks(w.size, n):
        rows = w[block]
        phi_new = signed_power(x_new[rows, None] - x_new[None, :], p)
        phi_old = signed_power(x_old[rows, None] - x_old[None, :], p)
        scaled = d[rows] / volume
        inside[block] = scaled * (phi_new @ d)
        outside -= d * (scaled @ (phi_new - phi_old))
        terms += phi_new.size + phi_old.size

    # adjacency part over the stored entries of the rows in W
    sub = graph.adjacency[w].tocoo()
    entry_rows = w[sub.row]
    term_new = sub.data * signed_power(x_new[entry_rows] - x_new[sub.col], p)
    term_old = sub.data * signed_power(x_old[entry_rows] - x_old[sub.col], p)
    inside -= np.bincount(sub.row, weights=term_new, minlength=w.size)
    outside += np.bincount(sub.col, weights=term_new - term_old, minlength=n)
    terms += term_new.size + term_old.size

    new[w] = sign * p * inside
    new[~in_w] += sign * p * outside[~in_w]
    cache.objective.counter.charge_incremental(terms)
    return new
