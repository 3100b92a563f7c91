from fractions import Fraction

import numpy as np
import pytest
import sympy

from _planted import random_cope
from enmf.matrix import (
    CopeValidationError, Matrix, MatrixError, check_rank_separation, normalize_factorization,
    orthogonal_bases, pseudoinverse_full_col_rank, rank, rank_factorize, to_b_form,
    validate_cope,
)


def _rand_int_matrix(rng, m, n, lo=-4, hi=4):
    return [[rng.randint(lo, hi) for _ in range(n)] for _ in range(m)]


def test_rank_matches_sympy(exact, rng):
    for _ in range(60):
        m, n = rng.randint(1, 6), rng.randint(1, 6)
        rows = _rand_int_matrix(rng, m, n)
        if rng.random() < 0.5 and m > 1:
            rows[-1] = [a + b for a, b in zip(rows[0], rows[1 % m])]
        mat = Matrix(rows, exact)
        assert rank(mat) == sympy.Matrix(rows).rank()
        assert mat.rank() == rank(mat)


def test_float_rank_uses_tolerance():
    from enmf.field import make_field
    f = make_field("float", tol=1e-9)
    m = Matrix([[1.0, 2.0], [2.0, 4.0 + 1e-12]], f)
    assert rank(m) == 1


def test_rref_and_pivots(exact):
    m = Matrix([[1, 2, 3], [2, 4, 7]], exact)
    red, piv = m.rref()
    assert piv == [0, 2]
    assert red == Matrix([[1, 2, 0], [0, 0, 1]], exact)


def test_inverse_and_solve(exact, rng):
    for _ in range(20):
        rows = _rand_int_matrix(rng, 4, 4)
        if sympy.Matrix(rows).det() == 0:
            continue
        m = Matrix(rows, exact)
        assert m @ m.inverse() == Matrix.identity(4, exact)
        b = [exact(rng.randint(-5, 5)) for _ in range(4)]
        assert m @ m.solve(b) == b


def test_singular_inverse_raises(exact):
    with pytest.raises(MatrixError):
        Matrix([[1, 2], [2, 4]], exact).inverse()


def test_nullspace_is_kernel(exact, rng):
    rows = _rand_int_matrix(rng, 2, 5)
    m = Matrix(rows, exact)
    ker = m.nullspace()
    assert len(ker) == 5 - rank(m)
    for v in ker:
        assert all(x == 0 for x in m @ v)


def test_orthogonal_bases(exact):
    g = Matrix([[1, 0, 1, 2], [0, 1, 1, -1]], exact)
    row_b, ker_b = orthogonal_bases(g)
    assert len(row_b) == 2 and len(ker_b) == 2
    allv = row_b + ker_b
    for i in range(4):
        for j in range(i + 1, 4):
            assert sum((x * y for x, y in zip(allv[i], allv[j])), exact.zero) == 0
    for v in ker_b:
        assert all(x == 0 for x in g @ v)


def test_pseudoinverse_full_col_rank(exact):
    g = Matrix([[1, 0], [0, 1], [1, 1]], exact)
    assert pseudoinverse_full_col_rank(g) @ g == Matrix.identity(2, exact)
    with pytest.raises(MatrixError, match="column 1"):
        pseudoinverse_full_col_rank(Matrix([[1, 2], [1, 2]], exact))


def test_validate_cope_errors(exact):
    good = Matrix([[Fraction(1, 2), 1], [Fraction(1, 2), 0]], exact)
    assert validate_cope(good, [2]).l == 1
    with pytest.raises(CopeValidationError) as e:
        validate_cope(Matrix([[1, 1], [1, 0]], exact), [2])
    assert e.value.kind == "stochastic" and e.value.column == 0
    with pytest.raises(CopeValidationError) as e:
        validate_cope(Matrix([[2, 1], [-1, 0]], exact), [2])
    assert e.value.kind == "negative" and (e.value.row, e.value.column) == (1, 0)
    with pytest.raises(CopeValidationError) as e:
        validate_cope(good, [1, 2])
    assert e.value.kind == "blocks"
    with pytest.raises(CopeValidationError) as e:
        validate_cope(Matrix([[1, 1], [0, 0]], exact), [2])
    assert e.value.kind == "zero_row"
    assert e.value.as_dict()["row"] == 1


def test_to_b_form(exact):
    c = validate_cope(Matrix([[1, 0], [0, 1]], exact), [2])
    assert to_b_form(c).form == "B"
    box = validate_cope(Matrix([[1, 1, 0, 0], [0, 0, 1, 1], [1, 0, 1, 0], [0, 1, 0, 1]], exact),
                        [2, 2])
    b = to_b_form(box)
    assert b.column_total == 1
    assert all(s == 1 for s in b.data.column_sums())


def test_rank_factorize_round_trip(exact, rng):
    for _ in range(40):
        c = random_cope(rng, exact)
        fac = rank_factorize(c)
        assert fac.product() == c.data
        assert fac.inner_dim == rank(c.data)
        assert all(s == 1 for s in fac.right.column_sums())
        assert all(s == c.l for s in fac.left.column_sums())


def test_rank_factorize_float(rng):
    from enmf.field import make_field
    f = make_field("float", tol=1e-9)
    c = random_cope(rng, make_field("exact"))
    cf = validate_cope(c.data.with_field(f), c.block_heights)
    fac = rank_factorize(cf)
    assert np.allclose(fac.product().to_numpy(), cf.data.to_numpy(), atol=1e-9)


def test_normalize_factorization_with_zero_unit_component(exact):
    # left has a column summing to zero; the elementary transform is needed
    left = Matrix([[1, 1], [0, -1]], exact)
    right = Matrix([[1, 1], [0, 1]], exact)
    c = left @ right
    l2, r2 = normalize_factorization(left, right, 1)
    assert l2 @ r2 == c
    assert all(s == 1 for s in r2.column_sums())


def test_rank_separation(exact):
    box = Matrix([[1, 1, 0, 0], [0, 0, 1, 1], [1, 0, 1, 0], [0, 1, 0, 1]], exact)
    sep = check_rank_separation(box, Matrix.identity(4, exact))
    assert (sep.rank_r, sep.rank_e) == (3, 4) and not sep.equal_ranks
    assert str(sep) == "separated(3, 4)"
    with pytest.raises(MatrixError):
        check_rank_separation(box, Matrix.identity(3, exact))
