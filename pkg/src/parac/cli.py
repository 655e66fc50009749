"""``parac`` command line: factor, solve, analyze, bench, check-expectation, gen.

Exit status is 0 on success, the ``exit_code`` of the raised
:class:`~parac.errors.ParacError` on module errors, 64 for bad usage and 74
for I/O failures.
"""

import argparse
import json
import os
import sys
import time
from dataclasses import asdict, dataclass, field

from . import io
from .analysis import etree_report, fill_ratio
from .api import BACKENDS, factorize
from .bench import (BENCH_FIELDS, check_enumeration, check_monte_carlo,
                    run_bench)
from .errors import MaxItersExceeded, ParacError
from .factor import FactorTrace, schedule_depth
from .ordering import make_ordering
from .solver import RHS_MODES, SolveConfig, make_rhs, pcg_solve

EXIT_USAGE = 64
EXIT_IO = 74
EXIT_CHECK_FAILED = 14
SEED_ENV = "PARAC_SEED"


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(message)


@dataclass
class RunConfig:
    """Everything that determines a run, serialized next to its outputs."""

    input: str = ""
    ordering: str = "nnz-sort"
    backend: str = "seq"
    workers: int = 1
    seed: int = 0
    solve: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)

    def to_dict(self):
        d = asdict(self)
        if self.backend not in ("par-left", "par-right"):
            d["workers"] = 1
        return d


def _resolve_seed(value):
    if value is not None:
        return value
    env = os.environ.get(SEED_ENV)
    if env is None or env.strip() == "":
        return 0
    try:
        return int(env)
    except ValueError:
        raise _UsageError(f"{SEED_ENV}={env!r} is not an integer") from None


def _load_graph(args):
    if args.gen:
        return io.generate(args.gen), args.gen
    if args.input:
        return io.read_laplacian(args.input), args.input
    raise _UsageError("one of --input or --gen is required")


def _run_config(args, source):
    return RunConfig(input=source, ordering=args.ordering,
                     backend=getattr(args, "backend", "seq"),
                     workers=getattr(args, "workers", 1), seed=args.seed)


def _emit(payload, path=None):
    text = json.dumps(payload, indent=2, sort_keys=True, default=float)
    print(text)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")


# -- subcommands -------------------------------------------------------------
def cmd_factor(args):
    graph, source = _load_graph(args)
    cfg = _run_config(args, source)
    trace = FactorTrace(graph.n)
    t0 = time.perf_counter()
    factor = factorize(graph, args.ordering, args.backend, args.seed,
                       args.workers, trace=trace)
    wall = time.perf_counter() - t0
    stats = {
        "config": cfg.to_dict(),
        "n": graph.n,
        "edges": graph.n_edges,
        "wall_time": wall,
        "nnz_G": factor.nnz,
        "fill_ratio": fill_ratio(graph, factor),
        "schedule_depth": schedule_depth(trace),
        "checksum": factor.checksum(),
    }
    if args.output:
        stats["config"]["outputs"]["factor"] = list(
            io.write_factor(factor, args.output))
    if args.trace:
        trace.extra["config"] = cfg.to_dict()
        trace.dump(args.trace)
    _emit(stats, args.stats)
    return 0


def cmd_solve(args):
    graph, source = _load_graph(args)
    cfg = _run_config(args, source)
    config = SolveConfig(tol=args.tol, max_iters=args.max_iters,
                         rhs_mode=args.rhs_mode, strict=False)
    cfg.solve = asdict(config)
    t0 = time.perf_counter()
    if args.factor:
        factor = io.read_factor(args.factor)
    else:
        factor = factorize(graph, args.ordering, args.backend, args.seed,
                           args.workers)
    ftime = time.perf_counter() - t0
    if config.rhs_mode == "given":
        if not args.rhs:
            raise _UsageError("--rhs-mode given needs --rhs FILE")
        b = io.read_vector(args.rhs)
    else:
        b = make_rhs(graph, config.rhs_mode, args.seed)
    x, rep = pcg_solve(graph, factor, b, config, factor_time=ftime)
    if args.solution:
        io.write_vector(args.solution, x)
    _emit({"config": cfg.to_dict(), "report": rep.to_dict()}, args.report)
    if not rep.converged:
        err = MaxItersExceeded(rep)
        print(f"error: {err}", file=sys.stderr)
        return err.exit_code
    return 0


def cmd_analyze(args):
    graph, source = _load_graph(args)
    order = make_ordering(args.ordering, graph, args.seed)
    trace = FactorTrace(graph.n)
    factor = factorize(graph, order, args.backend, args.seed, args.workers,
                       trace=trace)
    row = {"input": source, "ordering": args.ordering, "seed": args.seed,
           **etree_report(graph, order, factor, trace).as_row()}
    fields = list(row)
    if args.output:
        io.write_csv(args.output, [row], fields)
    print(",".join(fields))
    print(",".join(str(row[f]) for f in fields))
    return 0


def cmd_bench(args):
    inputs = {}
    for spec in args.inputs:
        if os.path.exists(spec):
            inputs[spec] = (lambda p=spec: io.read_laplacian(p))
        else:
            inputs[spec] = (lambda s=spec: io.generate(s))
    config = SolveConfig(tol=args.tol, max_iters=args.max_iters)

    def progress(row):
        msg = row["error"] or (f"factor {row['factor_time']:.3f}s "
                               f"iters {row['iterations']}")
        print(f"[bench] {row['input']} {row['ordering']} "
              f"w={row['workers']}: {msg}", file=sys.stderr)

    rows = run_bench(inputs, args.orderings, args.workers, args.backend,
                     args.seed, args.repeats, args.warmup, config,
                     progress=None if args.quiet else progress)
    if args.output:
        io.write_csv(args.output, rows, BENCH_FIELDS)
    else:
        import csv
        w = csv.DictWriter(sys.stdout, fieldnames=BENCH_FIELDS)
        w.writeheader()
        w.writerows(rows)
    return 0


def cmd_check_expectation(args):
    results = [check_enumeration(args.lists, args.max_size, args.seed)]
    if args.trials > 0:
        if args.input or args.gen:
            graph, _ = _load_graph(args)
        else:
            graph = io.gen_random_graph(args.n, seed=args.seed)
        results.append(check_monte_carlo(graph, args.trials, seed=args.seed))
    for r in results:
        status = "PASS" if r["passed"] else "FAIL"
        extra = (f" max SE multiple {r['max_se_multiple']:.2f}"
                 if "max_se_multiple" in r else "")
        print(f"{status} {r['check']}: max deviation "
              f"{r['max_deviation']:.3e}{extra}")
    if args.report:
        io.write_json(args.report, results)
    return 0 if all(r["passed"] for r in results) else EXIT_CHECK_FAILED


def cmd_gen(args):
    graph = io.generate(args.gen)
    io.write_laplacian(graph, args.output)
    print(f"wrote {args.output}: n={graph.n} edges={graph.n_edges}")
    return 0


# -- parser ------------------------------------------------------------------
def _common(p, backend=True):
    src = p.add_argument_group("input")
    src.add_argument("--input", help="Matrix Market Laplacian")
    src.add_argument("--gen", help="generator, e.g. poisson3d:n=32,"
                     "variant=uniform or random:n=100,m=300,seed=1")
    p.add_argument("--ordering", default="nnz-sort",
                   help="natural, random, nnz-sort or file:<path>")
    p.add_argument("--seed", type=int, default=None,
                   help=f"random seed (default ${SEED_ENV} or 0)")
    if backend:
        p.add_argument("--backend", choices=BACKENDS, default="seq")
        p.add_argument("--workers", type=int, default=1)


def build_parser():
    parser = _Parser(prog="parac", description=(
        "Randomized parallel approximate Cholesky for graph Laplacians."))
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    p = sub.add_parser("factor", help="factor a Laplacian")
    _common(p)
    p.add_argument("--output", help="factor stem (<stem>.G.mtx, .D.mtx)")
    p.add_argument("--stats", help="write stats JSON here")
    p.add_argument("--trace", help="write per-vertex trace JSON here")
    p.set_defaults(func=cmd_factor)

    p = sub.add_parser("solve", help="PCG solve with a randomized factor")
    _common(p)
    p.add_argument("--factor", help="read an existing factor stem")
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--max-iters", type=int, default=1000)
    p.add_argument("--rhs-mode", choices=RHS_MODES,
                   default="random-projected")
    p.add_argument("--rhs", help="right-hand side (Matrix Market array)")
    p.add_argument("--solution", help="write x here (Matrix Market array)")
    p.add_argument("--report", help="write the solve report JSON here")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("analyze", help="elimination-tree metrics as CSV")
    _common(p)
    p.add_argument("--output", help="CSV path")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("bench", help="inputs x orderings x workers table")
    p.add_argument("--inputs", nargs="+", required=True,
                   help="Matrix Market paths or generator specs")
    p.add_argument("--orderings", nargs="+", default=["random", "nnz-sort"])
    p.add_argument("--workers", nargs="+", type=int, default=[1, 2, 4, 8])
    p.add_argument("--backend", choices=BACKENDS, default="par-left")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--warmup", type=int, default=1)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--max-iters", type=int, default=1000)
    p.add_argument("--output", help="CSV path (stdout when omitted)")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("check-expectation",
                       help="enumeration and Monte Carlo expectation checks")
    p.add_argument("--input")
    p.add_argument("--gen")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--lists", type=int, default=1000)
    p.add_argument("--max-size", type=int, default=6)
    p.add_argument("--n", type=int, default=30,
                   help="vertices of the random Monte Carlo graph")
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--report", help="write results JSON here")
    p.set_defaults(func=cmd_check_expectation)

    p = sub.add_parser("gen", help="write a generated Laplacian")
    p.add_argument("--gen", required=True)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if hasattr(args, "seed"):
            args.seed = _resolve_seed(args.seed)
        return args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParacError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
