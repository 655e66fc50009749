"""Benchmark matrix and expectation checks behind the CLI."""

import statistics
import time

import numpy as np

from .analysis import fill_ratio
from .api import factorize
from .factor import FactorTrace, factor_randomized, schedule_depth
from .graph import dense_reconstruct
from .sampling import NeighborList, enumerate_expectation, exact_clique
from .solver import SolveConfig, make_rhs, pcg_solve

SCHEMA = "parac-bench/1"
BENCH_FIELDS = [
    "schema", "input", "ordering", "backend", "workers", "seed", "repeats",
    "factor_time", "solve_time", "speedup", "iterations", "residual",
    "converged", "nnz", "fill_ratio", "schedule_depth", "checksum", "error",
]
TIMING_FIELDS = ("factor_time", "solve_time", "speedup")

MC_SE_MULTIPLE = 5.0
# entries whose samples never vary still pick up summation roundoff
MC_ROUNDOFF = 1e-10


# -- expectation checks --------------------------------------------------------
def random_neighbor_list(rng, max_size=6, id_range=100):
    m = int(rng.integers(1, max_size + 1))
    vertices = rng.choice(id_range, m, replace=False)
    weights = np.exp(rng.uniform(np.log(0.1), np.log(10.0), m))
    return NeighborList(vertices, weights)


def check_enumeration(n_lists=1000, max_size=6, seed=0, tol=1e-12):
    """Compare the enumerated sampler expectation to the exact clique.

    Returns a dict with the worst absolute entry deviation.
    """
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_lists):
        nl = random_neighbor_list(rng, max_size)
        dev = float(np.max(np.abs(enumerate_expectation(nl)
                                  - exact_clique(nl)), initial=0.0))
        worst = max(worst, dev)
    return {"check": "enumeration", "lists": n_lists, "max_size": max_size,
            "max_deviation": worst, "tol": tol, "passed": worst <= tol}


def monte_carlo_expectation(graph, trials, ordering=None, seed=0):
    """Mean deviation from ``L`` and standard error of ``G D G^T``.

    Trial ``t`` uses sampler seed ``seed + t``. Deviations ``G D G^T - L``
    are accumulated rather than raw entries, so trials that reproduce ``L``
    exactly contribute exactly zero.
    """
    n = graph.n
    L = graph.to_dense()
    s1 = np.zeros((n, n))
    s2 = np.zeros((n, n))
    for t in range(trials):
        f = factor_randomized(graph, ordering, seed + t)
        d = dense_reconstruct(f) - L
        s1 += d
        s2 += d * d
    mean_dev = s1 / trials
    var = np.maximum(s2 / trials - mean_dev * mean_dev, 0.0)
    se = np.sqrt(var / max(trials - 1, 1))
    return mean_dev, se


def check_monte_carlo(graph, trials=100_000, ordering=None, seed=0,
                      multiple=MC_SE_MULTIPLE):
    """Every entry of the sample mean lies within ``multiple`` SEs of L.

    Entries whose standard error is zero must match to within a roundoff
    floor of ``MC_ROUNDOFF * max|L|``.
    """
    mean_dev, se = monte_carlo_expectation(graph, trials, ordering, seed)
    dev = np.abs(mean_dev)
    floor = MC_ROUNDOFF * np.abs(graph.to_dense()).max(initial=1.0)
    allowed = np.maximum(multiple * se, floor)
    # SE multiples are only meaningful above the roundoff floor
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(dev <= floor, 0.0,
                         np.where(se > 0, dev / se, np.inf))
    return {"check": "monte-carlo", "n": graph.n, "trials": trials,
            "max_deviation": float(dev.max(initial=0.0)),
            "max_se_multiple": float(ratio.max(initial=0.0)),
            "violations": int((dev > allowed).sum()),
            "passed": bool(np.all(dev <= allowed))}


# -- benchmark matrix ----------------------------------------------------------
def _median_time(fn, repeats, warmup):
    for _ in range(warmup):
        fn()
    times, out = [], None
    for _ in range(max(repeats, 1)):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times), out


def bench_cell(graph, name, ordering, backend, workers, seed, repeats=3,
               warmup=1, config=None):
    """One benchmark row; module errors land in the ``error`` column."""
    config = config or SolveConfig()
    row = {"schema": SCHEMA, "input": name, "ordering": ordering,
           "backend": backend, "workers": workers, "seed": seed,
           "repeats": repeats, "error": ""}
    try:
        ft, factor = _median_time(
            lambda: factorize(graph, ordering, backend, seed, workers),
            repeats, warmup)
        trace = FactorTrace(graph.n)
        factorize(graph, ordering, backend, seed, workers, trace=trace)
        b = make_rhs(graph, "random-projected", seed)
        st, (_, rep) = _median_time(
            lambda: pcg_solve(graph, factor, b, config), repeats, 0)
        row.update(factor_time=ft, solve_time=st,
                   iterations=rep.iterations,
                   residual=rep.relative_residual, converged=rep.converged,
                   nnz=factor.nnz, fill_ratio=fill_ratio(graph, factor),
                   schedule_depth=schedule_depth(trace),
                   checksum=factor.checksum()[:16])
    except Exception as exc:  # noqa: BLE001 - recorded, run continues
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def run_bench(inputs, orderings, workers, backend="par-left", seed=0,
              repeats=3, warmup=1, config=None, progress=None):
    """Run every ``input x ordering x workers`` cell.

    ``inputs`` maps a display name to a graph (or a zero-argument callable
    returning one). ``speedup`` is the factor time of the smallest worker
    count over the row's factor time, within the same input and ordering.
    """
    rows = []
    for name, graph in inputs.items():
        try:
            graph = graph() if callable(graph) else graph
        except Exception as exc:  # noqa: BLE001
            for o in orderings:
                for w in workers:
                    rows.append({"schema": SCHEMA, "input": name,
                                 "ordering": o, "backend": backend,
                                 "workers": w, "seed": seed,
                                 "repeats": repeats,
                                 "error": f"{type(exc).__name__}: {exc}"})
            continue
        for o in orderings:
            cell = []
            for w in workers:
                row = bench_cell(graph, name, o, backend, w, seed, repeats,
                                 warmup, config)
                cell.append(row)
                if progress:
                    progress(row)
            base = next((r["factor_time"] for r in cell
                         if "factor_time" in r), None)
            for r in cell:
                if base is not None and r.get("factor_time"):
                    r["speedup"] = base / r["factor_time"]
            rows.extend(cell)
    return rows


def non_timing(row):
    return {k: v for k, v in row.items() if k not in TIMING_FIELDS}
