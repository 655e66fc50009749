"""Backend dispatch shared by the estimator facade and the CLI."""

from .factor import factor_exact, factor_randomized
from .ordering import make_ordering
from .parallel import factor_parallel_left, factor_parallel_right

BACKENDS = ("seq", "par-left", "par-right", "exact")


def factorize(graph, ordering="nnz-sort", backend="seq", seed=0, workers=1,
              trace=None, **kwargs):
    """Factor ``graph`` with a named backend.

    Parameters
    ----------
    ordering : str or Ordering
        ``natural``, ``random``, ``nnz-sort``, ``file:<path>`` or an
        explicit :class:`~parac.graph.Ordering`. Random orderings use
        ``seed``.
    backend : str
        One of ``seq``, ``par-left``, ``par-right``, ``exact``. ``workers``
        only matters for the parallel backends.
    """
    order = make_ordering(ordering, graph, seed)
    if backend == "seq":
        return factor_randomized(graph, order, seed=seed, trace=trace,
                                 **kwargs)
    if backend == "exact":
        return factor_exact(graph, order, trace=trace, **kwargs)
    if backend == "par-left":
        return factor_parallel_left(graph, order, seed=seed, workers=workers,
                                    trace=trace, **kwargs)
    if backend == "par-right":
        return factor_parallel_right(graph, order, seed=seed,
                                     workers=workers, trace=trace, **kwargs)
    raise ValueError(f"unknown backend {backend!r}; choose from {BACKENDS}")
