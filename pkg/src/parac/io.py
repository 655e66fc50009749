"""Matrix Market I/O, synthetic Poisson problems and report files."""

import csv
import json
import os

import numpy as np

from .errors import BudgetExceeded, ParseError, UnsupportedField
from .graph import LaplacianGraph, LdlFactor

MAX_GENERATED_VERTICES = 2**24


# -- Matrix Market -------------------------------------------------------------
def _parse_header(line, lineno):
    parts = line.strip().split()
    if len(parts) != 5 or parts[0].lower() != "%%matrixmarket":
        raise ParseError("missing %%MatrixMarket banner", lineno)
    obj, fmt, field, symmetry = (p.lower() for p in parts[1:])
    if obj != "matrix":
        raise UnsupportedField(f"object {obj!r} is not supported", lineno)
    if field != "real":
        raise UnsupportedField(f"field {field!r} is not supported", lineno)
    if symmetry not in ("symmetric", "general"):
        raise UnsupportedField(f"symmetry {symmetry!r} is not supported",
                               lineno)
    if fmt not in ("coordinate", "array"):
        raise UnsupportedField(f"format {fmt!r} is not supported", lineno)
    return fmt, symmetry


def _data_lines(fh, start):
    for lineno, line in enumerate(fh, start=start):
        s = line.strip()
        if not s or s.startswith("%"):
            continue
        yield lineno, s


def read_matrix_market(path, return_shape=False):
    """Read a coordinate real Matrix Market file as 0-based triplets.

    Symmetric files are expanded to both triangles. Explicit zeros are
    dropped. Returns ``(rows, cols, vals)`` arrays, plus ``(nrows, ncols)``
    when ``return_shape`` is set.
    """
    with open(path) as fh:
        fmt, symmetry = _parse_header(fh.readline(), 1)
        if fmt != "coordinate":
            raise UnsupportedField("expected coordinate format", 1)
        lines = _data_lines(fh, 2)
        try:
            lineno, size = next(lines)
        except StopIteration:
            raise ParseError("missing size line", 2) from None
        try:
            nrows, ncols, nnz = (int(x) for x in size.split())
        except ValueError:
            raise ParseError(f"bad size line {size!r}", lineno) from None
        rows = np.empty(nnz, dtype=np.int64)
        cols = np.empty(nnz, dtype=np.int64)
        vals = np.empty(nnz, dtype=np.float64)
        count = 0
        for lineno, line in lines:
            if count >= nnz:
                raise ParseError("more entries than declared", lineno)
            parts = line.split()
            if len(parts) != 3:
                raise ParseError(f"expected 'row col value', got {line!r}",
                                 lineno)
            try:
                i, j, v = int(parts[0]), int(parts[1]), float(parts[2])
            except ValueError:
                raise ParseError(f"cannot parse entry {line!r}",
                                 lineno) from None
            if not (1 <= i <= nrows and 1 <= j <= ncols):
                raise ParseError(f"index ({i}, {j}) out of range", lineno)
            rows[count], cols[count], vals[count] = i - 1, j - 1, v
            count += 1
        if count != nnz:
            raise ParseError(f"expected {nnz} entries, found {count}")

    keep = vals != 0
    rows, cols, vals = rows[keep], cols[keep], vals[keep]
    if symmetry == "symmetric":
        off = rows != cols
        rows, cols, vals = (np.concatenate([rows, cols[off]]),
                            np.concatenate([cols, rows[off]]),
                            np.concatenate([vals, vals[off]]))
    if return_shape:
        return (rows, cols, vals), (nrows, ncols)
    return rows, cols, vals


def write_matrix_market(path, rows, cols, vals, shape, symmetric=False,
                        comment=None):
    """Write triplets (0-based) as a coordinate real file.

    With ``symmetric`` only entries with ``row >= col`` are written. Values
    use ``repr`` so reading them back is bit-exact.
    """
    rows = np.asarray(rows)
    cols = np.asarray(cols)
    vals = np.asarray(vals, dtype=np.float64)
    if symmetric:
        keep = rows >= cols
        rows, cols, vals = rows[keep], cols[keep], vals[keep]
    with open(path, "w") as fh:
        kind = "symmetric" if symmetric else "general"
        fh.write(f"%%MatrixMarket matrix coordinate real {kind}\n")
        if comment:
            for line in comment.splitlines():
                fh.write(f"% {line}\n")
        fh.write(f"{shape[0]} {shape[1]} {len(vals)}\n")
        for i, j, v in zip(rows.tolist(), cols.tolist(), vals.tolist()):
            fh.write(f"{i + 1} {j + 1} {v!r}\n")


def write_laplacian(graph, path):
    mat = graph.to_scipy().tocoo()
    write_matrix_market(path, mat.row, mat.col, mat.data, mat.shape,
                        symmetric=True)


def read_laplacian(path):
    from .graph import validate_laplacian
    (rows, cols, vals), (nr, nc) = read_matrix_market(path, return_shape=True)
    if nr != nc:
        raise ParseError(f"matrix is {nr}x{nc}, not square")
    return validate_laplacian((rows, cols, vals), n=nr)


def write_vector(path, values):
    with open(path, "w") as fh:
        fh.write("%%MatrixMarket matrix array real general\n")
        fh.write(f"{len(values)} 1\n")
        for v in np.asarray(values, dtype=np.float64).tolist():
            fh.write(f"{v!r}\n")


def read_vector(path):
    with open(path) as fh:
        fmt, _ = _parse_header(fh.readline(), 1)
        if fmt != "array":
            raise UnsupportedField("expected array format", 1)
        lines = _data_lines(fh, 2)
        try:
            lineno, size = next(lines)
        except StopIteration:
            raise ParseError("missing size line", 2) from None
        try:
            nr, nc = (int(x) for x in size.split())
        except ValueError:
            raise ParseError(f"bad size line {size!r}", lineno) from None
        out = []
        for lineno, line in lines:
            try:
                out.append(float(line))
            except ValueError:
                raise ParseError(f"cannot parse value {line!r}",
                                 lineno) from None
    if len(out) != nr * nc:
        raise ParseError(f"expected {nr * nc} values, found {len(out)}")
    return np.array(out)


def factor_paths(stem):
    stem = os.fspath(stem)
    return f"{stem}.G.mtx", f"{stem}.D.mtx", f"{stem}.perm"


def write_factor(factor, stem):
    """Write ``<stem>.G.mtx``, ``<stem>.D.mtx`` and ``<stem>.perm``.

    ``G`` is strictly lower triangular in elimination positions (unit
    diagonal omitted); the permutation file lists the vertex eliminated at
    each position.
    """
    gpath, dpath, ppath = factor_paths(stem)
    cols = np.repeat(np.arange(factor.n), factor.column_counts)
    write_matrix_market(gpath, factor.indices, cols, factor.data,
                        (factor.n, factor.n))
    write_vector(dpath, factor.D)
    with open(ppath, "w") as fh:
        fh.write(" ".join(map(str, factor.ordering.order.tolist())) + "\n")
    return gpath, dpath, ppath


def read_factor(stem):
    gpath, dpath, ppath = factor_paths(stem)
    (rows, cols, vals), (n, _) = read_matrix_market(gpath, return_shape=True)
    D = read_vector(dpath)
    if len(D) != n:
        raise ParseError(f"D has {len(D)} entries, G is {n}x{n}")
    if np.any(rows <= cols):
        raise ParseError("G must be strictly lower triangular")
    key = np.lexsort((rows, cols))
    rows, cols, vals = rows[key], cols[key], vals[key]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(cols, minlength=n), out=indptr[1:])
    order = None
    if os.path.exists(ppath):
        from .ordering import ordering_from_file
        order = ordering_from_file(ppath, n)
    return LdlFactor(n, indptr, rows, vals, D, order)


# -- Poisson generators --------------------------------------------------------
class PoissonSpec:
    """Parameters of a 7-point 3D Poisson problem on an ``n^3`` grid."""

    VARIANTS = ("uniform", "anisotropic", "contrast")

    def __init__(self, n, variant="uniform", epsilon=1e-3,
                 contrast_ratio=1e4, seed=0):
        self.n = int(n)
        self.variant = variant
        self.epsilon = float(epsilon)
        self.contrast_ratio = float(contrast_ratio)
        self.seed = int(seed)
        if self.n < 2:
            raise ValueError("need at least 2 grid points per axis")
        if variant not in self.VARIANTS:
            raise ValueError(f"unknown Poisson variant {variant!r}")
        if self.epsilon <= 0 or self.contrast_ratio <= 0:
            raise ValueError("epsilon and contrast ratio must be positive")

    @classmethod
    def parse(cls, text):
        """Parse ``poisson3d:n=32,variant=uniform,...``."""
        name, _, args = text.partition(":")
        if name != "poisson3d":
            raise ValueError(f"unknown generator {name!r}")
        kw = {}
        for item in filter(None, args.split(",")):
            key, _, value = item.partition("=")
            key = key.strip().replace("-", "_")
            if key in ("n", "seed"):
                kw[key] = int(value)
            elif key in ("epsilon", "contrast_ratio", "contrast"):
                kw["contrast_ratio" if key == "contrast" else key] = \
                    float(value)
            elif key == "variant":
                kw[key] = value.strip()
            else:
                raise ValueError(f"unknown generator option {key!r}")
        return cls(**kw)

    def __repr__(self):
        return (f"poisson3d:n={self.n},variant={self.variant},"
                f"epsilon={self.epsilon},contrast_ratio={self.contrast_ratio},"
                f"seed={self.seed}")


def gen_poisson3d(spec, max_vertices=MAX_GENERATED_VERTICES):
    """7-point finite-difference Laplacian on an ``n x n x n`` grid.

    Vertex ``(x, y, z)`` has label ``x + n*y + n*n*z``. ``anisotropic``
    scales z-direction edges by ``epsilon``; ``contrast`` draws a per-cell
    coefficient log-uniformly in ``[1, contrast_ratio]`` and weights each
    edge by the harmonic mean of its two cells.
    """
    if isinstance(spec, str):
        spec = PoissonSpec.parse(spec)
    n = spec.n
    if n**3 > max_vertices:
        raise BudgetExceeded(
            f"{n}^3 = {n**3} vertices exceeds budget {max_vertices}")
    idx = np.arange(n**3, dtype=np.int64).reshape(n, n, n)  # [z, y, x]
    heads, tails, weights = [], [], []
    # axis 2 is x, 1 is y, 0 is z
    for axis in (2, 1, 0):
        a = np.take(idx, np.arange(n - 1), axis=axis).ravel()
        b = np.take(idx, np.arange(1, n), axis=axis).ravel()
        w = np.ones(len(a))
        if spec.variant == "anisotropic" and axis == 0:
            w *= spec.epsilon
        heads.append(a)
        tails.append(b)
        weights.append(w)
    a = np.concatenate(heads)
    b = np.concatenate(tails)
    w = np.concatenate(weights)
    if spec.variant == "contrast":
        rng = np.random.default_rng(spec.seed)
        coef = np.exp(rng.uniform(0.0, np.log(spec.contrast_ratio), n**3))
        w = 2.0 * coef[a] * coef[b] / (coef[a] + coef[b])
    return LaplacianGraph.from_edges(n**3, a, b, w)


def gen_random_graph(n, m=None, seed=0, low=0.5, high=2.0):
    """Connected random graph: a random recursive tree plus extra edges.

    ``m`` is the total number of distinct edges (at least ``n - 1``, default
    ``2n``); weights are uniform in ``[low, high)``.
    """
    n = int(n)
    rng = np.random.default_rng(seed)
    if n < 2:
        return LaplacianGraph.from_edges(max(n, 0), [], [], [])
    max_m = n * (n - 1) // 2
    m = min(2 * n if m is None else int(m), max_m)
    m = max(m, n - 1)
    edges = set()
    for v in range(1, n):
        edges.add((int(rng.integers(v)), v))
    while len(edges) < m:
        a, b = rng.choice(n, 2, replace=False)
        edges.add((int(min(a, b)), int(max(a, b))))
    edges = sorted(edges)
    a, b = (np.array(x) for x in zip(*edges))
    return LaplacianGraph.from_edges(n, a, b, rng.uniform(low, high, len(a)))


def generate(text):
    """Build a graph from ``poisson3d:...`` or ``random:n=..,m=..,seed=..``."""
    name, _, args = text.partition(":")
    if name == "poisson3d":
        return gen_poisson3d(PoissonSpec.parse(text))
    if name == "random":
        kw = {}
        for item in filter(None, args.split(",")):
            key, _, value = item.partition("=")
            if key.strip() not in ("n", "m", "seed"):
                raise ValueError(f"unknown generator option {key!r}")
            kw[key.strip()] = int(value)
        if "n" not in kw:
            raise ValueError("random generator needs n=")
        return gen_random_graph(**kw)
    raise ValueError(f"unknown generator {name!r}")


# -- reports ---------------------------------------------------------------
def write_json(path, payload):
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=_jsonable)
        fh.write("\n")


def _jsonable(x):
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(f"cannot serialize {type(x).__name__}")


def write_csv(path, rows, fieldnames):
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fieldnames)
        writer.writeheader()
        for row in rows:
            writer.writerow(row)


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


__all__ = [
    "read_matrix_market", "write_matrix_market", "read_laplacian",
    "write_laplacian", "write_factor", "read_factor", "factor_paths",
    "PoissonSpec", "gen_poisson3d", "gen_random_graph", "generate",
    "write_json", "write_csv", "read_csv", "read_vector", "write_vector",
]
