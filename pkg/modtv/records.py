"""Machine-readable run records and their aggregation for the benchmark harness."""
from modtv.exception import ParameterError
from modtv.graph import Graph
from modtv.result import ModuleResult

import numpy as np

import csv
import json
from dataclasses import asdict, dataclass, field, fields
from typing import Any, Dict, IO, Iterable, List, Optional


# bump when fields are added, renamed or change meaning
SCHEMA_VERSION = 1

# fields that differ between otherwise identical invocations
TIMING_FIELDS = ("wall_time_ms", "load_time_ms")


@dataclass
class RunRecord:
    dataset: str
    n: int
    m: int
    method: str
    seed: Optional[int]
    q: float
    size: int
    fraction: float
    tv_final: float
    tv_p_init: float
    tv_p_final: float
    stationarity: float
    iters: int
    fevals: int
    gevals: int
    wall_time_ms: float
    load_time_ms: float = 0.0
    params: Dict[str, Any] = field(default_factory=dict)
    schema_version: int = SCHEMA_VERSION

    @classmethod
    def from_result(
        cls,
        result: ModuleResult,
        graph: Graph,
        dataset: str,
        params: Optional[Dict[str, Any]] = None,
        load_time: float = 0.0,
    ) -> "RunRecord":
        return cls(
            dataset=dataset,
            n=graph.n,
            m=graph.m,
            method=result.method,
            seed=None if result.seed is None else int(result.seed),
            q=float(result.q_value),
            size=result.size,
            fraction=float(result.fraction),
            tv_final=float(result.tv_final),
            tv_p_init=float(result.tv_p_init),
            tv_p_final=float(result.tv_p_final),
            stationarity=float(result.stationarity),
            iters=int(result.iters),
            fevals=int(result.fevals),
            gevals=int(result.gevals),
            wall_time_ms=1000.0 * result.wall_time,
            load_time_ms=1000.0 * load_time,
            params=dict(params or {}),
        )

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunRecord":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ParameterError("unknown record fields: %s" % ", ".join(sorted(unknown)))
        return cls(**data)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def dump_records(records: Iterable[RunRecord], stream: IO[str]) -> None:
    """One JSON object for a single record, an array otherwise."""

    records = list(records)
    payload: Any = [record.to_dict() for record in records]
    if len(payload) == 1:
        payload = payload[0]
    json.dump(payload, stream, indent=2, sort_keys=True)
    stream.write("\n")


SUMMARY_COLUMNS = (
    "dataset",
    "method",
    "runs",
    "q_mean",
    "q_std",
    "q_max",
    "fraction_mean",
    "tv_final_mean",
    "wall_time_ms_mean",
    "q_ratio_linear",
)


def aggregate(records: Iterable[RunRecord]) -> List[Dict[str, Any]]:
    """Mean and (population) standard deviation per ``(dataset, method)``, in first-seen order.

    ``q_ratio_linear`` is the mean Q of the row over the mean Q of the ``linear`` rows of the same
    dataset. It is None when that dataset was not run with ``linear`` or its mean Q is not positive.
    """

    groups: Dict[tuple, List[RunRecord]] = {}
    for record in records:
        groups.setdefault((record.dataset, record.method), []).append(record)

    rows = []
    for (dataset, method), group in groups.items():
        q = np.array([record.q for record in group])
        rows.append(
            {
                "dataset": dataset,
                "method": method,
                "runs": len(group),
                "q_mean": float(q.mean()),
                "q_std": float(q.std()),
                "q_max": float(q.max()),
                "fraction_mean": float(np.mean([record.fraction for record in group])),
                "tv_final_mean": float(np.mean([record.tv_final for record in group])),
                "wall_time_ms_mean": float(np.mean([record.wall_time_ms for record in group])),
            }
        )

    linear = {row["dataset"]: row["q_mean"] for row in rows if row["method"] == "linear"}
    for row in rows:
        baseline = linear.get(row["dataset"])
        row["q_ratio_linear"] = row["q_mean"] / baseline if baseline and baseline > 0 else None
    return rows


def write_summary_csv(rows: Iterable[Dict[str, Any]], stream: IO[str]) -> None:
    writer = csv.DictWriter(stream, fieldnames=SUMMARY_COLUMNS)
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
