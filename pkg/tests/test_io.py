from collections import Counter

import numpy as np
import pytest

from parac.errors import BudgetExceeded, ParseError, UnsupportedField
from parac.factor import factor_randomized
from parac.graph import validate_laplacian
from parac.io import (PoissonSpec, gen_poisson3d, read_factor,
                      read_laplacian, read_matrix_market, write_factor,
                      write_laplacian, write_matrix_market)
from parac.ordering import ordering_nnz_sort, ordering_random

from conftest import edgeless, multi_component, path3

HEADER = "%%MatrixMarket matrix coordinate real symmetric\n"


def _write(tmp_path, text, name="m.mtx"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_symmetric_expansion(tmp_path):
    p = _write(tmp_path, HEADER + "2 2 1\n2 1 -1.0\n")
    rows, cols, vals = read_matrix_market(p)
    assert Counter(zip(rows.tolist(), cols.tolist(), vals.tolist())) == \
        Counter({(1, 0, -1.0): 1, (0, 1, -1.0): 1})


def test_pattern_rejected(tmp_path):
    p = _write(tmp_path, "%%MatrixMarket matrix coordinate pattern general\n"
               "2 2 1\n2 1\n")
    with pytest.raises(UnsupportedField):
        read_matrix_market(p)


@pytest.mark.parametrize("body, line", [
    ("2 2 1\n2 x -1.0\n", 3),
    ("2 2 1\n3 1 -1.0\n", 3),
    ("2 2\n", 2),
    ("% comment\n2 2 1\n1 1 1 1\n", 4),
])
def test_parse_errors_carry_line(tmp_path, body, line):
    p = _write(tmp_path, HEADER + body)
    with pytest.raises(ParseError) as exc:
        read_matrix_market(p)
    assert exc.value.line == line


def test_missing_banner(tmp_path):
    with pytest.raises(ParseError):
        read_matrix_market(_write(tmp_path, "2 2 1\n1 1 1\n"))


def test_explicit_zeros_dropped(tmp_path):
    p = _write(tmp_path, HEADER + "3 3 2\n2 1 -1.0\n3 1 0.0\n")
    rows, _, _ = read_matrix_market(p)
    assert len(rows) == 2


def test_p3_round_trip(tmp_path):
    g = path3()
    write_laplacian(g, tmp_path / "p3.mtx")
    a = read_matrix_market(tmp_path / "p3.mtx")
    mat = g.to_scipy().tocoo()
    write_matrix_market(tmp_path / "p3g.mtx", mat.row, mat.col, mat.data,
                        mat.shape)
    b = read_matrix_market(tmp_path / "p3g.mtx")
    ta = Counter(zip(*(x.tolist() for x in a)))
    tb = Counter(zip(*(x.tolist() for x in b)))
    assert ta == tb
    assert read_laplacian(tmp_path / "p3.mtx").to_dense().tolist() == \
        g.to_dense().tolist()


def test_values_bit_exact(tmp_path):
    rng = np.random.default_rng(0)
    vals = rng.standard_normal(50) * 10.0 ** rng.integers(-200, 200, 50)
    write_matrix_market(tmp_path / "v.mtx", np.arange(50), np.zeros(50, int),
                        vals, (50, 1))
    _, _, back = read_matrix_market(tmp_path / "v.mtx")
    assert back.tobytes() == vals.tobytes()


def test_poisson_n2_uniform():
    g = gen_poisson3d(PoissonSpec(2))
    assert g.n == 8 and g.n_edges == 12
    assert np.all(g.edges()[2] == 1.0)


def test_poisson_n2_anisotropic():
    g = gen_poisson3d(PoissonSpec(2, "anisotropic", epsilon=0.5))
    a, b, w = g.edges()
    z_edges = np.abs(b - a) == 4
    assert z_edges.sum() == 4 and np.all(w[z_edges] == 0.5)
    assert np.all(w[~z_edges] == 1.0) and (~z_edges).sum() == 8


def test_poisson_center_degree():
    g = gen_poisson3d("poisson3d:n=3")
    assert g.degree[1 + 3 * 1 + 9 * 1] == 6


def test_poisson_contrast_range_and_determinism():
    spec = PoissonSpec(6, "contrast", contrast_ratio=1e4, seed=3)
    g = gen_poisson3d(spec)
    w = g.edges()[2]
    assert w.min() >= 1.0 and w.max() <= 1e4
    assert np.array_equal(gen_poisson3d(spec).edges()[2], w)
    other = gen_poisson3d(PoissonSpec(6, "contrast", seed=4)).edges()[2]
    assert not np.array_equal(other, w)


@pytest.mark.parametrize("variant", PoissonSpec.VARIANTS)
def test_poisson_validates(variant):
    for seed in range(10):
        g = gen_poisson3d(PoissonSpec(4, variant, seed=seed))
        again = validate_laplacian(g.to_scipy())
        assert again.n_edges == g.n_edges == 3 * 4 * 4 * 3


def test_poisson_spec_checks():
    with pytest.raises(ValueError):
        PoissonSpec(1)
    with pytest.raises(ValueError):
        PoissonSpec(3, epsilon=0)
    with pytest.raises(ValueError):
        PoissonSpec(3, "spiky")
    with pytest.raises(BudgetExceeded):
        gen_poisson3d(PoissonSpec(10), max_vertices=999)
    s = PoissonSpec.parse("poisson3d:n=4,variant=anisotropic,epsilon=0.1")
    assert (s.n, s.variant, s.epsilon) == (4, "anisotropic", 0.1)


def test_factor_round_trip_p3(tmp_path):
    f = factor_randomized(path3())
    write_factor(f, tmp_path / "p3")
    back = read_factor(tmp_path / "p3")
    assert back.identical(f) and back.ordering == f.ordering


def test_factor_round_trip_isolated_vertex(tmp_path):
    g = multi_component([3, 1, 2])
    f = factor_randomized(g, ordering_random(g.n, 2), seed=1)
    write_factor(f, tmp_path / "iso")
    back = read_factor(tmp_path / "iso")
    assert back.identical(f) and int((back.D == 0).sum()) == 3
    e = factor_randomized(edgeless(4))
    write_factor(e, tmp_path / "e")
    assert read_factor(tmp_path / "e").D.tolist() == [0.0] * 4


def test_factor_round_trip_poisson32(tmp_path):
    g = gen_poisson3d("poisson3d:n=32")
    f = factor_randomized(g, ordering_nnz_sort(g, 0), seed=0)
    write_factor(f, tmp_path / "p32")
    back = read_factor(tmp_path / "p32")
    assert back.nnz == f.nnz and back.checksum() == f.checksum()
