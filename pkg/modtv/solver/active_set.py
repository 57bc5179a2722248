"""Projection, active-set estimates and the stationarity measure on the box ``[-a, b]^n``."""
from modtv.graph import BoxSpec

import numpy as np

from typing import Tuple


def project(x, box: BoxSpec) -> np.ndarray:
    return np.clip(np.asarray(x, dtype=np.float64), -box.a, box.b)


def initialize(x0, box: BoxSpec) -> np.ndarray:
    """Negative components go to the lower bound, the others (zero included) to the upper one."""

    x0 = np.asarray(x0, dtype=np.float64)
    return np.where(x0 < 0, -box.a, box.b)


def estimate_sets(x, grad, box: BoxSpec) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(A_l, A_u, N)``: variables predicted at the lower bound, at the upper bound, and free.

    Bounds are tested with exact equality; ``project`` and ``initialize`` write the bound values
    themselves.
    """

    x = np.asarray(x)
    grad = np.asarray(grad)
    at_lower = (x == -box.a) & (grad > 0)
    at_upper = (x == box.b) & (grad < 0)
    free = ~(at_lower | at_upper)
    return np.flatnonzero(at_lower), np.flatnonzero(at_upper), np.flatnonzero(free)


def violations(x, grad, box: BoxSpec) -> np.ndarray:
    """|x_i - [x - grad]_i|, componentwise."""
    x = np.asarray(x, dtype=np.float64)
    return np.abs(x - project(x - np.asarray(grad), box))


def stationarity_measure(x, grad, box: BoxSpec) -> float:
    """||x - [x - grad]||_inf; zero exactly at stationary points."""
    v = violations(x, grad, box)
    return float(v.max()) if v.size else 0.0
