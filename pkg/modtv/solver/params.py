from modtv.exception import ParameterError

from dataclasses import dataclass
from typing import Optional


UNIT_STEP_TESTS = ("point", "displacement")


@dataclass(frozen=True)
class SolverParams:
    """Tunables of the active-set solver.

    ``max_iters=None`` means ``10 n`` capped at one million. ``audit_rate`` is the probability that
    an incremental gradient update is checked against a full recomputation.
    """

    p: float = 1.4
    Z: int = 20
    M: int = 100
    delta0: float = 1e20
    beta: float = 0.99
    delta_ls: float = 0.5
    gamma: float = 1e-3
    mu_min: float = 1e-10
    mu_max: float = 1e10
    ws_start: int = 2
    ws_cap: Optional[int] = None
    eps_stat: float = 1e-4
    max_iters: Optional[int] = None
    max_ls_steps: int = 100
    seed: int = 0
    unit_step_test: str = "point"
    snap_start: bool = True
    refresh_every: int = 1000
    drift_tol: float = 1e-8
    audit_rate: float = 0.0
    record_iterates: bool = False

    def __post_init__(self):
        if not self.p > 1:
            raise ParameterError("p must be > 1")
        if self.Z < 1:
            raise ParameterError("Z must be >= 1")
        if self.M < 0:
            raise ParameterError("M must be >= 0")
        if not self.delta0 >= 0:
            raise ParameterError("delta0 must be >= 0")
        for name in ("beta", "delta_ls", "gamma"):
            value = getattr(self, name)
            if not 0 < value < 1:
                raise ParameterError("%s must lie in (0, 1), got %r" % (name, value))
        if not 0 < self.mu_min <= self.mu_max < float("inf"):
            raise ParameterError("need 0 < mu_min <= mu_max < inf")
        if self.ws_start < 1:
            raise ParameterError("ws_start must be >= 1")
        if self.ws_cap is not None and self.ws_cap < 1:
            raise ParameterError("ws_cap must be >= 1")
        if not self.eps_stat >= 0:
            raise ParameterError("eps_stat must be >= 0")
        if self.max_iters is not None and self.max_iters < 0:
            raise ParameterError("max_iters must be >= 0")
        if self.max_ls_steps < 1:
            raise ParameterError("max_ls_steps must be >= 1")
        if self.unit_step_test not in UNIT_STEP_TESTS:
            raise ParameterError(
                "unit_step_test must be one of %s" % ", ".join(UNIT_STEP_TESTS)
            )
        if self.refresh_every < 1:
            raise ParameterError("refresh_every must be >= 1")
        if not 0 <= self.audit_rate <= 1:
            raise ParameterError("audit_rate must lie in [0, 1]")

    def iteration_limit(self, n: int) -> int:
        if self.max_iters is not None:
            return self.max_iters
        return min(10 * n, 1_000_000)

    def working_set_cap(self, n: int) -> int:
        if self.ws_cap is not None:
            return self.ws_cap
        return int(max(10, min(1000, 0.03 * n)))
