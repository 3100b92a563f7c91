"""Dense matrices over a scalar backend, COPE matrices and rank factorizations."""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Iterable, Sequence

import numpy as np

from .field import FloatField

__all__ = [
    "Matrix",
    "MatrixError",
    "CopeMatrix",
    "CopeValidationError",
    "RankFactorization",
    "RankSeparation",
    "validate_cope",
    "to_b_form",
    "rank",
    "rank_factorize",
    "normalize_factorization",
    "pseudoinverse_full_col_rank",
    "orthogonal_bases",
    "check_rank_separation",
    "dot",
]


class MatrixError(ValueError):
    pass


def dot(u: Sequence, v: Sequence, zero):
    s = zero
    for a, b in zip(u, v):
        s = s + a * b
    return s


class Matrix:
    """Immutable dense matrix whose entries belong to ``field``."""

    __slots__ = ("rows", "cols", "_d", "field")

    def __init__(self, data: Iterable[Iterable], field, *, _trusted: bool = False):
        if _trusted:
            d = data
        else:
            d = tuple(tuple(field(x) for x in row) for row in data)
        self.rows = len(d)
        self.cols = len(d[0]) if d else 0
        if any(len(r) != self.cols for r in d):
            raise MatrixError("ragged matrix")
        self._d = d
        self.field = field

    # -- construction -------------------------------------------------------
    @classmethod
    def _wrap(cls, rows, field) -> "Matrix":
        return cls(tuple(tuple(r) for r in rows), field, _trusted=True)

    @classmethod
    def zeros(cls, rows: int, cols: int, field) -> "Matrix":
        z = field.zero
        return cls._wrap([[z] * cols for _ in range(rows)], field)

    @classmethod
    def identity(cls, n: int, field) -> "Matrix":
        z, o = field.zero, field.one
        return cls._wrap([[o if i == j else z for j in range(n)] for i in range(n)], field)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], field) -> "Matrix":
        if not columns:
            raise MatrixError("no columns")
        return cls([[c[i] for c in columns] for i in range(len(columns[0]))], field)

    @classmethod
    def hstack(cls, blocks: Sequence["Matrix"]) -> "Matrix":
        blocks = [b for b in blocks if b.cols]
        f = blocks[0].field
        if len({b.rows for b in blocks}) != 1:
            raise MatrixError("hstack row mismatch")
        return cls._wrap([sum((b._d[i] for b in blocks), ()) for i in range(blocks[0].rows)], f)

    @classmethod
    def vstack(cls, blocks: Sequence["Matrix"]) -> "Matrix":
        blocks = [b for b in blocks if b.rows]
        f = blocks[0].field
        if len({b.cols for b in blocks}) != 1:
            raise MatrixError("vstack column mismatch")
        return cls._wrap([r for b in blocks for r in b._d], f)

    # -- access -------------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, idx):
        i, j = idx
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(f"entry ({i}, {j}) outside {self.rows}x{self.cols} matrix")
        return self._d[i][j]

    def row(self, i: int) -> tuple:
        return self._d[i]

    def col(self, j: int) -> tuple:
        return tuple(r[j] for r in self._d)

    def row_list(self) -> list[tuple]:
        return list(self._d)

    def columns(self) -> list[tuple]:
        return [self.col(j) for j in range(self.cols)]

    def tolist(self) -> list[list]:
        return [list(r) for r in self._d]

    def to_numpy(self) -> np.ndarray:
        return np.array([[float(x) for x in r] for r in self._d], dtype=float).reshape(
            self.rows, self.cols)

    def select_columns(self, idx: Sequence[int]) -> "Matrix":
        return Matrix._wrap([[r[j] for j in idx] for r in self._d], self.field)

    def select_rows(self, idx: Sequence[int]) -> "Matrix":
        return Matrix._wrap([self._d[i] for i in idx], self.field)

    def submatrix(self, r0: int, r1: int, c0: int, c1: int) -> "Matrix":
        return Matrix._wrap([r[c0:c1] for r in self._d[r0:r1]], self.field)

    def with_field(self, field) -> "Matrix":
        return Matrix([[field(x) if not isinstance(field, FloatField) else float(x)
                        for x in r] for r in self._d], field)

    # -- algebra ------------------------------------------------------------
    @property
    def T(self) -> "Matrix":
        return Matrix._wrap(list(zip(*self._d)) if self.rows else [], self.field)

    def __matmul__(self, other):
        if isinstance(other, Matrix):
            if self.cols != other.rows:
                raise MatrixError(f"cannot multiply {self.rows}x{self.cols} by "
                                  f"{other.rows}x{other.cols}")
            z = self.field.zero
            oc = other.columns()
            return Matrix._wrap([[dot(r, c, z) for c in oc] for r in self._d], self.field)
        v = list(other)
        if len(v) != self.cols:
            raise MatrixError("vector length mismatch")
        z = self.field.zero
        return [dot(r, v, z) for r in self._d]

    def _elementwise(self, other: "Matrix", op) -> "Matrix":
        if self.shape != other.shape:
            raise MatrixError(f"shape mismatch {self.shape} vs {other.shape}")
        return Matrix._wrap([[op(a, b) for a, b in zip(r, s)]
                             for r, s in zip(self._d, other._d)], self.field)

    def __add__(self, other: "Matrix") -> "Matrix":
        return self._elementwise(other, lambda a, b: a + b)

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self._elementwise(other, lambda a, b: a - b)

    def __neg__(self) -> "Matrix":
        return Matrix._wrap([[-a for a in r] for r in self._d], self.field)

    def scale(self, s) -> "Matrix":
        s = self.field(s) if not isinstance(self.field, FloatField) else float(s)
        return Matrix._wrap([[a * s for a in r] for r in self._d], self.field)

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        if self.shape != other.shape:
            return False
        if self.field.exact and other.field.exact:
            return self._d == other._d
        f = self.field if not self.field.exact else other.field
        return all(f.is_zero(float(a) - float(b))
                   for r, s in zip(self._d, other._d) for a, b in zip(r, s))

    __hash__ = None

    def column_sums(self) -> list:
        z = self.field.zero
        out = [z] * self.cols
        for r in self._d:
            out = [a + b for a, b in zip(out, r)]
        return out

    def row_sums(self) -> list:
        z = self.field.zero
        out = []
        for r in self._d:
            s = z
            for a in r:
                s = s + a
            out.append(s)
        return out

    def is_nonnegative(self) -> bool:
        sg = self.field.sign
        return all(sg(a) >= 0 for r in self._d for a in r)

    def min_entry_sign(self) -> int:
        sg = self.field.sign
        return min((sg(a) for r in self._d for a in r), default=0)

    # -- elimination --------------------------------------------------------
    def rref(self) -> tuple["Matrix", list[int]]:
        """Reduced row echelon form and pivot columns (left-to-right)."""
        f = self.field
        a = [list(r) for r in self._d]
        m, n = self.rows, self.cols
        pivots: list[int] = []
        row = 0
        for col in range(n):
            if row >= m:
                break
            if f.exact:
                piv = next((i for i in range(row, m) if f.sign(a[i][col]) != 0), None)
            else:
                cand = max(range(row, m), key=lambda i: abs(a[i][col]))
                piv = cand if f.sign(a[cand][col]) != 0 else None
            if piv is None:
                continue
            a[row], a[piv] = a[piv], a[row]
            inv = f.one / a[row][col]
            a[row] = [x * inv for x in a[row]]
            a[row][col] = f.one
            rr = a[row]
            for i in range(m):
                factor = a[i][col]
                if i == row or not factor:
                    continue
                a[i] = [x - factor * y for x, y in zip(a[i], rr)]
                a[i][col] = f.zero
            pivots.append(col)
            row += 1
        if not f.exact:
            a = [[0.0 if f.is_zero(x) else x for x in r] for r in a]
        return Matrix._wrap(a, f), pivots

    def rank(self) -> int:
        return rank(self)

    def nullspace(self) -> list[list]:
        """Basis of the right kernel read off the RREF."""
        r, piv = self.rref()
        f = self.field
        free = [j for j in range(self.cols) if j not in piv]
        basis = []
        for fj in free:
            v = [f.zero] * self.cols
            v[fj] = f.one
            for i, pj in enumerate(piv):
                v[pj] = -r[i, fj]
            basis.append(v)
        return basis

    def inverse(self) -> "Matrix":
        if self.rows != self.cols:
            raise MatrixError("inverse of non-square matrix")
        n = self.rows
        aug = Matrix.hstack([self, Matrix.identity(n, self.field)])
        r, piv = aug.rref()
        if piv[:n] != list(range(n)) or len(piv) < n:
            raise MatrixError("singular matrix")
        return r.submatrix(0, n, n, 2 * n)

    def solve(self, b: Sequence) -> list:
        """Solve a square nonsingular system ``self @ x = b``."""
        if self.rows != self.cols:
            raise MatrixError("solve needs a square matrix")
        n = self.rows
        aug = Matrix.hstack([self, Matrix._wrap([[x] for x in b], self.field)])
        r, piv = aug.rref()
        if piv != list(range(n)):
            raise MatrixError("singular system")
        return [r[i, n] for i in range(n)]

    def __repr__(self):
        body = "; ".join(", ".join(self.field.format(x) for x in r) for r in self._d)
        return f"Matrix({self.rows}x{self.cols}: [{body}])"


def rank(m: Matrix) -> int:
    """Rank; fraction-free (Bareiss) elimination in exact mode."""
    f = m.field
    if not f.exact:
        return len(m.rref()[1])
    a = [list(r) for r in m.row_list()]
    rows, cols = m.rows, m.cols
    prev = f.one
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        piv = next((i for i in range(r, rows) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        p = a[r][c]
        for i in range(r + 1, rows):
            aic = a[i][c]
            ri, rr = a[i], a[r]
            # exact division by the previous pivot keeps entries small
            a[i] = [(p * ri[j] - aic * rr[j]) / prev if j > c else f.zero
                    for j in range(cols)]
        prev = p
        r += 1
    return r


# ---------------------------------------------------------------------------
# COPE matrices

class CopeValidationError(MatrixError):
    """Structured diagnosis of an invalid COPE matrix."""

    def __init__(self, kind: str, message: str, *, block: int | None = None,
                 row: int | None = None, column: int | None = None):
        super().__init__(message)
        self.kind = kind
        self.block = block
        self.row = row
        self.column = column

    def as_dict(self) -> dict:
        return {"kind": self.kind, "message": str(self), "block": self.block,
                "row": self.row, "column": self.column}


@dataclass(frozen=True)
class CopeMatrix:
    data: Matrix
    block_heights: tuple[int, ...]
    form: str = "A"

    @property
    def l(self) -> int:  # noqa: E743
        return len(self.block_heights)

    @property
    def field(self):
        return self.data.field

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    @property
    def column_total(self) -> int:
        """Common column sum: ``l`` in A-form, 1 in B-form."""
        return self.l if self.form == "A" else 1

    def blocks(self) -> list[range]:
        out, start = [], 0
        for h in self.block_heights:
            out.append(range(start, start + h))
            start += h
        return out


def validate_cope(data: Matrix, block_heights: Sequence[int], form: str = "A") -> CopeMatrix:
    """Check the COPE conditions; raise :class:`CopeValidationError` on failure."""
    heights = tuple(int(h) for h in block_heights)
    if form not in ("A", "B"):
        raise CopeValidationError("form", f"unknown form {form!r}")
    if any(h <= 0 for h in heights) or sum(heights) != data.rows:
        raise CopeValidationError(
            "blocks", f"block heights {list(heights)} do not sum to {data.rows} rows")
    f = data.field
    for i in range(data.rows):
        for j in range(data.cols):
            if f.sign(data[i, j]) < 0:
                raise CopeValidationError(
                    "negative", f"negative entry {f.format(data[i, j])} at row {i}, column {j}",
                    row=i, column=j)
    for i in range(data.rows):
        if all(f.sign(x) == 0 for x in data.row(i)):
            raise CopeValidationError("zero_row", f"row {i} is zero", row=i)
    for j in range(data.cols):
        if all(f.sign(x) == 0 for x in data.col(j)):
            raise CopeValidationError("zero_column", f"column {j} is zero", column=j)
    if form == "A":
        start = 0
        for b, h in enumerate(heights):
            for j in range(data.cols):
                s = f.zero
                for i in range(start, start + h):
                    s = s + data[i, j]
                if f.sign(s - f.one) != 0:
                    raise CopeValidationError(
                        "stochastic",
                        f"block {b}, column {j} sums to {f.format(s)} instead of 1",
                        block=b, column=j)
            start += h
    else:
        for j, s in enumerate(data.column_sums()):
            if f.sign(s - f.one) != 0:
                raise CopeValidationError(
                    "stochastic", f"column {j} sums to {f.format(s)} instead of 1", column=j)
    return CopeMatrix(data, heights, form)


def to_b_form(c: CopeMatrix) -> CopeMatrix:
    """Divide by the number of measurements; one column-stochastic block."""
    if c.form == "B":
        return c
    if c.l == 1:
        return CopeMatrix(c.data, c.block_heights, "B")
    f = c.field
    inv = f.one / f(c.l)
    return CopeMatrix(c.data.scale(inv), (c.data.rows,), "B")


# ---------------------------------------------------------------------------
# rank factorization

@dataclass(frozen=True)
class RankFactorization:
    left: Matrix
    right: Matrix
    pivots: tuple[int, ...] = dc_field(default=())

    @property
    def inner_dim(self) -> int:
        return self.left.cols

    def product(self) -> Matrix:
        return self.left @ self.right


def normalize_factorization(left: Matrix, right: Matrix, total) -> tuple[Matrix, Matrix]:
    """Rescale ``C = left @ right`` so ``right`` becomes column-stochastic.

    ``total`` is the common column sum of ``C``.  The unit functional
    ``u = left^T 1 / total`` satisfies ``u^T right = 1^T``; when ``u`` has no
    zero entry the rescaling is the diagonal ``diag(u)``.
    """
    f = left.field
    inv_total = f.one / f(total)
    u = [s * inv_total for s in left.column_sums()]
    r = len(u)
    if all(f.sign(x - f.one) == 0 for x in u):
        return left, right
    if all(f.sign(x) != 0 for x in u):
        t = Matrix._wrap([[u[i] if i == j else f.zero for j in range(r)] for i in range(r)], f)
        t_inv = Matrix._wrap([[f.one / u[i] if i == j else f.zero for j in range(r)]
                              for i in range(r)], f)
    else:
        # elementary transform I + e_i (u - 1)^T with u_i != 0
        i0 = next(i for i in range(r) if f.sign(u[i]) != 0)
        rows = [[(f.one if i == j else f.zero) + (u[j] - f.one if i == i0 else f.zero)
                 for j in range(r)] for i in range(r)]
        t = Matrix._wrap(rows, f)
        t_inv = t.inverse()
    return left @ t_inv, t @ right


def rank_factorize(c: CopeMatrix) -> RankFactorization:
    """``C = A B`` with inner dimension ``rank C`` and ``B`` column-stochastic.

    ``A`` is the first maximal independent set of columns of ``C`` (left to
    right) and ``B`` the nonzero rows of the reduced row echelon form.
    """
    data = c.data
    red, piv = data.rref()
    left = data.select_columns(piv)
    right = red.submatrix(0, len(piv), 0, data.cols)
    left, right = normalize_factorization(left, right, c.column_total)
    return RankFactorization(left, right, tuple(piv))


# ---------------------------------------------------------------------------
# pseudoinverse and orthogonal bases

def pseudoinverse_full_col_rank(g: Matrix) -> Matrix:
    """``(G^T G)^{-1} G^T`` for ``G`` of full column rank."""
    _, piv = g.rref()
    if len(piv) < g.cols:
        dep = next(j for j in range(g.cols) if j not in piv)
        raise MatrixError(f"matrix is not of full column rank: column {dep} is dependent")
    gt = g.T
    return (gt @ g).inverse() @ gt


def _gram_schmidt(vectors: Sequence[Sequence], f) -> list[list]:
    basis: list[list] = []
    norms: list = []
    for v in vectors:
        w = list(v)
        for b, nb in zip(basis, norms):
            coef = dot(w, b, f.zero) / nb
            w = [x - coef * y for x, y in zip(w, b)]
        nw = dot(w, w, f.zero)
        if f.sign(nw) != 0 and any(f.sign(x) != 0 for x in w):
            basis.append(w)
            norms.append(nw)
    return basis


def orthogonal_bases(g: Matrix) -> tuple[list[list], list[list]]:
    """Orthogonal (unnormalized) bases of the row space and the right kernel."""
    f = g.field
    row_basis = _gram_schmidt(g.row_list(), f)
    kernel_basis = _gram_schmidt(g.nullspace(), f)
    return row_basis, kernel_basis


# ---------------------------------------------------------------------------
# rank separation

@dataclass(frozen=True)
class RankSeparation:
    rank_r: int
    rank_e: int

    @property
    def equal_ranks(self) -> bool:
        return self.rank_r == self.rank_e

    def __str__(self):
        if self.equal_ranks:
            return f"equal_ranks({self.rank_r})"
        return f"separated({self.rank_r}, {self.rank_e})"


def check_rank_separation(r_factor: Matrix, e_factor: Matrix) -> RankSeparation:
    if r_factor.cols != e_factor.rows:
        raise MatrixError(f"factors {r_factor.shape} and {e_factor.shape} do not compose")
    return RankSeparation(rank(r_factor), rank(e_factor))

