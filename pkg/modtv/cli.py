"""
    modtv.cli
    ~~~~~~~~~

    Command line front end: ``solve`` runs one method on one graph, ``bench`` runs a
    method x graph x seed matrix and aggregates it, ``oracle`` runs the exhaustive checks on a
    small graph. JSON goes to stdout (or ``--out``), everything else to stderr.
"""
from modtv import __version__
from modtv.exception import CacheError, DimensionError, OracleError, ParameterError, SolverError
from modtv.graph import BoxSpec, Graph, GraphError, GraphFileError
from modtv.graph import generators
from modtv.graph.loader import FORMATS, INDEXINGS, load_graph, write_node_set
from modtv.oracles import MAX_NODES, verify_graph
from modtv.records import RunRecord, aggregate, dump_records, write_summary_csv
from modtv.result import ModuleResult
from modtv.search import GlobalParams, multistart, partition_and_swap
from modtv.solver import SolverParams, fast_atvo, linear_start
from modtv.solver.params import UNIT_STEP_TESTS
from modtv.spectral import ROUNDINGS, PowerIterParams, linear_module

import numpy as np

import argparse
import json
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict
from typing import Any, Dict, List, Optional, Tuple


logger = logging.getLogger(__name__)


METHODS = ("linear", "fastatvo", "multistart", "ps")
STARTS = ("linear", "random", "file")

EXIT_OK = 0
EXIT_GRAPH = 3
EXIT_PARAMETERS = 4
EXIT_SOLVER = 5
EXIT_ORACLE = 6

# small graphs the oracle subcommand can build without a file
GENERATED = {
    "barbell": generators.barbell,
    "triangle": lambda: generators.complete_graph(3),
    "two-cliques": lambda: generators.two_cliques(4),
}


def print_info(msg, args):
    if not args.quiet:
        print(msg, file=sys.stderr)


class MethodListAction(argparse.Action):
    def __init__(self, option_strings, dest, **kwargs):
        super(MethodListAction, self).__init__(option_strings, dest, **kwargs)
        self.default = list(METHODS)
        self.metavar = ",".join(METHODS)

    def __call__(self, parser, namespace, values, option_string=None):
        value_list = [value for value in values.split(",") if value]
        for value in value_list:
            if value not in METHODS:
                parser.error("%s is not a valid method (choose from %s)" % (value, self.metavar))
        setattr(namespace, self.dest, value_list)


def _add_graph_arguments(parser, required=True, multiple=False):
    parser.add_argument(
        "--graph",
        action="append" if multiple else "store",
        dest="graph",
        required=required,
        help="edge-list or Matrix Market file",
    )
    parser.add_argument(
        "--format", choices=("auto",) + FORMATS, default="auto", help="input format"
    )
    parser.add_argument(
        "--indexing", choices=INDEXINGS, default="auto", help="node numbering of edge lists"
    )


def _add_method_arguments(parser):
    parser.add_argument(
        "--start", choices=STARTS, default="linear", help="starting point (default: linear)"
    )
    parser.add_argument("--start-file", dest="start_file", help="vector file for --start file")
    parser.add_argument("--p", type=float, default=1.4, help="exponent of TV_Q^p (default: 1.4)")
    parser.add_argument("--a", type=float, default=1.0, help="box lower bound is -a (default: 1)")
    parser.add_argument("--b", type=float, default=1.0, help="box upper bound (default: 1)")
    parser.add_argument("--eps", type=float, default=1e-4, help="stationarity tolerance")
    parser.add_argument("--max-iters", dest="max_iters", type=int, help="solver iteration limit")
    parser.add_argument(
        "--ps-iters", dest="ps_iters", type=int, default=10, help="partition and swap rounds"
    )
    parser.add_argument(
        "--sigma", type=float, default=75.0, help="swap percentage (default: 75)"
    )
    parser.add_argument("--restarts", type=int, default=10, help="multistart restarts")
    parser.add_argument(
        "--unit-step-test",
        dest="unit_step_test",
        choices=UNIT_STEP_TESTS,
        default="point",
        help="norm compared with the trust radius before a unit step",
    )
    parser.add_argument(
        "--literal-acceptance",
        dest="literal_acceptance",
        action="store_true",
        help="accept partition and swap candidates with SMALLER TV_Q",
    )
    parser.add_argument(
        "--rounding", choices=ROUNDINGS, default="sign", help="rounding of the linear method"
    )
    parser.add_argument(
        "-j", "--jobs", type=int, default=1, help="worker count for multistart and bench"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="modtv",
        description="""\
Leading module detection by maximising the modularity total variation over a box.

Exit codes: 0 ok, 2 bad arguments, 3 unreadable or malformed graph file,
4 invalid parameters, 5 solver abort, 6 oracle failure.""",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument(
        "-q", "--quiet", action="store_true", dest="quiet", help="suppress informational messages"
    )
    parser.add_argument(
        "-v", "--verbose", action="store_true", dest="verbose", help="log solver iterations"
    )
    parser.add_argument("--version", action="version", version="modtv %s" % __version__)
    subparsers = parser.add_subparsers(dest="command")
    subparsers.required = True

    solve = subparsers.add_parser("solve", help="run one method on one graph")
    _add_graph_arguments(solve)
    solve.add_argument("--method", choices=METHODS, default="fastatvo")
    solve.add_argument("--seed", type=int, default=0)
    _add_method_arguments(solve)
    solve.add_argument("-o", "--out", help="write the JSON record here instead of stdout")
    solve.add_argument(
        "--community-out", dest="community_out", help="write the community, one node per line"
    )

    bench = subparsers.add_parser("bench", help="methods x graphs x seeds with aggregates")
    _add_graph_arguments(bench, multiple=True)
    bench.add_argument(
        "-m",
        "--methods",
        action=MethodListAction,
        dest="methods",
        help="methods to run, comma-separated list",
    )
    bench.add_argument("--seeds", type=int, default=10, help="seeds per cell (default: 10)")
    bench.add_argument("--seed", type=int, default=0, help="first seed")
    _add_method_arguments(bench)
    bench.add_argument("-o", "--out", help="write the JSON array here instead of stdout")
    bench.add_argument("--csv", help="write the aggregated summary as CSV")

    oracle = subparsers.add_parser("oracle", help="exhaustive checks on a small graph")
    _add_graph_arguments(oracle, required=False)
    oracle.add_argument(
        "--generate",
        choices=sorted(GENERATED),
        default="barbell",
        help="built-in graph used when --graph is not given",
    )
    oracle.add_argument("--samples", type=int, default=5, help="random vectors per identity")
    oracle.add_argument("--seed", type=int, default=0)
    oracle.add_argument("-o", "--out", help="write the JSON report here instead of stdout")
    return parser


def configure_logging(args) -> None:
    level = logging.INFO
    if args.quiet:
        level = logging.WARNING
    if args.verbose:
        level = logging.DEBUG
    logging.basicConfig(
        level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s"
    )


def _settings(args, seed: int) -> Tuple[BoxSpec, SolverParams, GlobalParams]:
    box = BoxSpec(args.a, args.b)
    solver_params = SolverParams(
        p=args.p,
        eps_stat=args.eps,
        max_iters=args.max_iters,
        seed=seed,
        unit_step_test=args.unit_step_test,
    )
    global_params = GlobalParams(
        sigma=args.sigma,
        ps_iters=args.ps_iters,
        restarts=args.restarts,
        seed=seed,
        literal_acceptance=args.literal_acceptance,
        workers=max(1, args.jobs),
    )
    return box, solver_params, global_params


def _start_vector(graph: Graph, args, box: BoxSpec, seed: int) -> np.ndarray:
    if args.start == "linear":
        return linear_start(graph, box, PowerIterParams(seed=seed))
    if args.start == "random":
        return np.random.default_rng(seed).uniform(-box.a, box.b, size=graph.n)
    if not args.start_file:
        raise ParameterError("--start file needs --start-file")
    try:
        vector = np.loadtxt(args.start_file, dtype=np.float64, ndmin=1)
    except (OSError, ValueError) as exc:
        raise GraphFileError(exc, args.start_file)
    return graph.as_vector(vector, "start vector")


def run_method(graph: Graph, method: str, args, seed: int) -> ModuleResult:
    box, solver_params, global_params = _settings(args, seed)
    if method == "linear":
        return linear_module(graph, PowerIterParams(seed=seed), args.rounding, box, args.p)
    if method == "multistart":
        return multistart(
            graph, box, solver_params, global_params.restarts, seed, global_params.workers
        )

    x0 = _start_vector(graph, args, box, seed)
    if method == "ps":
        return partition_and_swap(graph, x0, box, solver_params, global_params)
    return fast_atvo(graph, x0, box, solver_params)


def params_echo(args, method: str, seed: int) -> Dict[str, Any]:
    box, solver_params, global_params = _settings(args, seed)
    echo: Dict[str, Any] = {"box": asdict(box)}
    if method == "linear":
        echo["rounding"] = args.rounding
        echo["p"] = args.p
        return echo
    echo["solver"] = asdict(solver_params)
    if method in ("ps", "multistart"):
        echo["global"] = asdict(global_params)
    if method != "multistart":
        echo["start"] = args.start
    return echo


def _read_graph(path: str, args) -> Tuple[Graph, float]:
    start = time.perf_counter()
    graph = load_graph(path, args.format, args.indexing)
    return graph, time.perf_counter() - start


def _open_output(path: Optional[str]):
    if path is None:
        return sys.stdout
    return open(path, "w", encoding="utf-8")


def _run_cell(cell) -> RunRecord:
    graph, dataset, method, seed, load_time, args = cell
    result = run_method(graph, method, args, seed)
    return RunRecord.from_result(
        result, graph, dataset, params_echo(args, method, seed), load_time
    )


def command_solve(args) -> int:
    graph, load_time = _read_graph(args.graph, args)
    result = run_method(graph, args.method, args, args.seed)
    record = RunRecord.from_result(
        result, graph, args.graph, params_echo(args, args.method, args.seed), load_time
    )

    output = _open_output(args.out)
    try:
        dump_records([record], output)
    finally:
        if output is not sys.stdout:
            output.close()

    if args.community_out:
        one_based = graph.indexing == "one-based"
        write_node_set(args.community_out, result.community, one_based=one_based)
    print_info(
        "%s on %s: Q = %.6f, |S| = %d (%.1f%%), %.1f ms"
        % (
            args.method,
            os.path.basename(args.graph),
            record.q,
            record.size,
            100.0 * record.fraction,
            record.wall_time_ms,
        ),
        args,
    )
    return EXIT_OK


def format_summary(rows: List[Dict[str, Any]]) -> str:
    lines = ["%-24s %-10s %5s %10s %10s %8s %8s" % ("dataset", "method", "runs", "Q avg", "Q std",
                                                      "size %", "Q/lin")]
    for row in rows:
        ratio = row.get("q_ratio_linear")
        lines.append(
            "%-24s %-10s %5d %10.6f %10.6f %8.2f %8s"
            % (
                os.path.basename(row["dataset"])[:24],
                row["method"],
                row["runs"],
                row["q_mean"],
                row["q_std"],
                100.0 * row["fraction_mean"],
                "-" if ratio is None else "%.3f" % ratio,
            )
        )
    return "\n".join(lines)


def command_bench(args) -> int:
    if args.seeds < 1:
        raise ParameterError("--seeds must be >= 1")

    cells = []
    for path in args.graph:
        graph, load_time = _read_graph(path, args)
        for method in args.methods:
            for seed in range(args.seed, args.seed + args.seeds):
                cells.append((graph, path, method, seed, load_time, args))

    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            records = list(pool.map(_run_cell, cells))
    else:
        records = [_run_cell(cell) for cell in cells]

    output = _open_output(args.out)
    try:
        json.dump([record.to_dict() for record in records], output, indent=2, sort_keys=True)
        output.write("\n")
    finally:
        if output is not sys.stdout:
            output.close()

    rows = aggregate(records)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as stream:
            write_summary_csv(rows, stream)
    print_info(format_summary(rows), args)
    return EXIT_OK


def command_oracle(args) -> int:
    if args.graph:
        graph, _ = _read_graph(args.graph, args)
    else:
        graph = GENERATED[args.generate]()
    if graph.n > MAX_NODES:
        raise OracleError("the oracle suite is limited to %d nodes" % MAX_NODES)

    report = verify_graph(graph, samples=args.samples, seed=args.seed)
    output = _open_output(args.out)
    try:
        json.dump(report.as_dict(), output, indent=2, sort_keys=True)
        output.write("\n")
    finally:
        if output is not sys.stdout:
            output.close()

    print_info(
        "%d checks, %d failed; max Q = %.6f"
        % (len(report.checks), len(report.failures()), report.max_modularity),
        args,
    )
    return EXIT_OK if report.passed else EXIT_ORACLE


COMMANDS = {
    "solve": command_solve,
    "bench": command_bench,
    "oracle": command_oracle,
}


def main(argv=None) -> int:
    """Parse the command line, run the command and map failures to exit codes."""
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args)

    try:
        return COMMANDS[args.command](args)
    except GraphError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_GRAPH
    except (ParameterError, DimensionError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_PARAMETERS
    except (SolverError, CacheError) as exc:
        print("solver aborted: %s" % exc, file=sys.stderr)
        return EXIT_SOLVER
    except OracleError as exc:
        print("oracle failed: %s" % exc, file=sys.stderr)
        return EXIT_ORACLE


# So program can be started with "python -m modtv.cli ..."
if __name__ == "__main__":
    sys.exit(main())
