from modtv.graph import NodeSet

import numpy as np

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional


@dataclass
class SolverTelemetry:
    reference_values: List[float] = field(default_factory=list)
    checkpoints: List[int] = field(default_factory=list)
    unit_steps: int = 0
    line_searches: int = 0
    line_search_steps: int = 0
    backtracks: int = 0
    # per iteration: (function control ran, fevals outside the control, unit step accepted)
    iterations: List[tuple] = field(default_factory=list)
    iterates: Optional[List[np.ndarray]] = None
    max_gradient_drift: float = 0.0
    pair_terms: int = 0


@dataclass
class ModuleResult:
    """A continuous solution, its best level set and the work it took."""

    x_star: np.ndarray
    community: NodeSet
    q_value: float
    tv_p_init: float
    tv_p_final: float
    tv_final: float
    stationarity: float
    iters: int
    fevals: int
    gevals: int
    wall_time: float
    seed: Optional[int]
    method: str = "fastatvo"
    telemetry: Optional[SolverTelemetry] = None
    rounds: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def size(self) -> int:
        return self.community.size()

    @property
    def fraction(self) -> float:
        return self.community.fraction()
