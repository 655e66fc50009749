"""Randomized parallel approximate Cholesky for graph Laplacians."""

from .analysis import (EtreeReport, classical_etree, critical_path,
                       etree_report, fill_ratio, fill_ratio_bound,
                       sampled_etree)
from .api import BACKENDS, factorize
from .errors import ParacError
from .estimator import ApproximateCholesky, LaplacianPCG, check_laplacian
from .factor import (FactorTrace, factor_exact, factor_randomized,
                     schedule_depth)
from .graph import (LaplacianGraph, LdlFactor, Ordering, dense_reconstruct,
                    validate_laplacian)
from .io import (PoissonSpec, gen_poisson3d, gen_random_graph,
                 read_factor, read_matrix_market, write_factor,
                 write_matrix_market)
from .ordering import make_ordering
from .parallel import factor_parallel_left, factor_parallel_right
from .solver import (SolveConfig, SolveReport, apply_preconditioner,
                     make_rhs, pcg_solve)

__version__ = "0.1.0"

__all__ = [
    "LaplacianGraph", "LdlFactor", "Ordering", "validate_laplacian",
    "dense_reconstruct", "factor_randomized", "factor_exact",
    "factor_parallel_left", "factor_parallel_right", "factorize", "BACKENDS",
    "FactorTrace", "schedule_depth", "make_ordering", "EtreeReport",
    "classical_etree", "sampled_etree", "critical_path", "etree_report",
    "fill_ratio", "fill_ratio_bound", "SolveConfig", "SolveReport",
    "apply_preconditioner", "pcg_solve", "make_rhs", "PoissonSpec",
    "gen_poisson3d", "gen_random_graph", "read_matrix_market",
    "write_matrix_market", "read_factor", "write_factor",
    "ApproximateCholesky", "LaplacianPCG", "check_laplacian", "ParacError",
]
