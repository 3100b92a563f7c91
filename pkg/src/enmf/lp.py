"""Dense tableau simplex over an ordered field.

Problems are in the standard inequality form

    minimize   c^T x
    subject to A x >= b,  x >= 0

and every optimal answer carries a dual point ``y >= 0`` with
``A^T y <= c`` and ``b^T y`` equal to the primal value.  Bland's rule
makes pivoting deterministic and guarantees termination.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Sequence

from .field import bit_size
from .matrix import Matrix, dot

__all__ = [
    "LinearProgram",
    "LpSolution",
    "LpResourceError",
    "solve",
    "verify_certificate",
    "find_nonnegative_solution",
    "DEFAULT_MAX_BITS",
]

DEFAULT_MAX_BITS = 1 << 16

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


class LpResourceError(RuntimeError):
    """A tableau entry outgrew the configured bit budget."""


@dataclass(frozen=True)
class LinearProgram:
    objective: tuple
    constraint_matrix: Matrix
    rhs: tuple

    def __post_init__(self):
        a = self.constraint_matrix
        if len(self.objective) != a.cols or len(self.rhs) != a.rows:
            raise ValueError(
                f"inconsistent LP: {a.rows}x{a.cols} constraints, "
                f"{len(self.objective)} costs, {len(self.rhs)} right-hand sides")

    @classmethod
    def build(cls, objective: Sequence, constraint_matrix: Matrix, rhs: Sequence):
        f = constraint_matrix.field
        return cls(tuple(f(x) for x in objective), constraint_matrix, tuple(f(x) for x in rhs))

    @property
    def field(self):
        return self.constraint_matrix.field

    @property
    def num_vars(self) -> int:
        return self.constraint_matrix.cols

    @property
    def num_constraints(self) -> int:
        return self.constraint_matrix.rows


@dataclass
class LpSolution:
    status: str
    primal_point: list | None = None
    primal_value: object = None
    dual_point: list | None = None
    dual_value: object = None
    certificate: list | None = None
    pivots: int = 0
    extra: dict = dc_field(default_factory=dict)

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


class _Tableau:
    """Equality-form tableau ``M z = beta, z >= 0`` with an objective row."""

    def __init__(self, rows, rhs, basis, field, max_bits):
        self.rows = rows
        self.rhs = rhs
        self.basis = basis
        self.f = field
        self.max_bits = max_bits
        self.pivots = 0
        self.obj: list = []
        self.obj_rhs = field.zero

    def set_objective(self, cost):
        f = self.f
        d = list(cost)
        val = f.zero
        for i, b in enumerate(self.basis):
            cb = cost[b]
            if cb:
                row = self.rows[i]
                d = [dj - cb * rj for dj, rj in zip(d, row)]
                val = val + cb * self.rhs[i]
        self.obj = d
        self.obj_rhs = -val

    @property
    def value(self):
        return -self.obj_rhs

    def pivot(self, r: int, c: int):
        f = self.f
        row = self.rows[r]
        inv = f.one / row[c]
        row = [x * inv for x in row]
        row[c] = f.one
        rhs_r = self.rhs[r] * inv
        self.rows[r] = row
        self.rhs[r] = rhs_r
        for i in range(len(self.rows)):
            if i == r:
                continue
            a = self.rows[i][c]
            if not a:
                continue
            self.rows[i] = [x - a * y for x, y in zip(self.rows[i], row)]
            self.rows[i][c] = f.zero
            self.rhs[i] = self.rhs[i] - a * rhs_r
        a = self.obj[c]
        if a:
            self.obj = [x - a * y for x, y in zip(self.obj, row)]
            self.obj[c] = f.zero
            self.obj_rhs = self.obj_rhs - a * rhs_r
        self.basis[r] = c
        self.pivots += 1
        if f.exact:
            worst = max(max((bit_size(x) for x in row), default=0), bit_size(rhs_r))
            if worst > self.max_bits:
                raise LpResourceError(
                    f"tableau entry needs {worst} bits, budget is {self.max_bits}")

    def run(self, allowed) -> tuple[str, int | None]:
        """Bland's rule iterations; returns (status, unbounded column)."""
        f = self.f
        while True:
            enter = next((j for j in allowed if f.sign(self.obj[j]) < 0), None)
            if enter is None:
                return OPTIMAL, None
            best = None
            best_ratio = None
            for i, row in enumerate(self.rows):
                a = row[enter]
                if f.sign(a) <= 0:
                    continue
                ratio = self.rhs[i] / a
                if best is None:
                    best, best_ratio = i, ratio
                    continue
                s = f.sign(ratio - best_ratio)
                if s < 0 or (s == 0 and self.basis[i] < self.basis[best]):
                    best, best_ratio = i, ratio
            if best is None:
                return UNBOUNDED, enter
            self.pivot(best, enter)

    def point(self, ncols):
        z = [self.f.zero] * ncols
        for i, b in enumerate(self.basis):
            z[b] = self.rhs[i]
        return z

    def drive_out(self, is_artificial, ncols):
        """Pivot zero-level artificial variables out of the basis."""
        f = self.f
        i = 0
        while i < len(self.rows):
            if is_artificial(self.basis[i]):
                row = self.rows[i]
                j = next((j for j in range(ncols)
                          if not is_artificial(j) and f.sign(row[j]) != 0), None)
                if j is None:
                    del self.rows[i]
                    del self.rhs[i]
                    del self.basis[i]
                    continue
                self.pivot(i, j)
            i += 1


def solve(lp: LinearProgram, max_bits: int = DEFAULT_MAX_BITS) -> LpSolution:
    """Two-phase simplex with Bland's rule."""
    f = lp.field
    a = lp.constraint_matrix
    m, n = a.shape
    need_art = [f.sign(b) > 0 for b in lp.rhs]
    art_index = {}
    for i in range(m):
        if need_art[i]:
            art_index[i] = n + m + len(art_index)
    ncols = n + m + len(art_index)
    rows, rhs, basis = [], [], []
    for i in range(m):
        row = [f.zero] * ncols
        ai = a.row(i)
        if need_art[i]:
            row[:n] = list(ai)
            row[n + i] = -f.one
            row[art_index[i]] = f.one
            rhs.append(lp.rhs[i])
            basis.append(art_index[i])
        else:
            row[:n] = [-x for x in ai]
            row[n + i] = f.one
            rhs.append(-lp.rhs[i])
            basis.append(n + i)
        rows.append(row)
    tab = _Tableau(rows, rhs, basis, f, max_bits)

    def is_art(j):
        return j >= n + m

    if art_index:
        cost1 = [f.zero] * (n + m) + [f.one] * len(art_index)
        tab.set_objective(cost1)
        tab.run(range(ncols))
        if f.sign(tab.value) > 0:
            y = [tab.obj[n + i] for i in range(m)]
            return LpSolution(INFEASIBLE, certificate=y, pivots=tab.pivots,
                              dual_value=dot(lp.rhs, y, f.zero))
        tab.drive_out(is_art, n + m)
    cost2 = list(lp.objective) + [f.zero] * (ncols - n)
    tab.set_objective(cost2)
    status, col = tab.run([j for j in range(ncols) if not is_art(j)])
    if status == UNBOUNDED:
        ray = [f.zero] * ncols
        ray[col] = f.one
        for i, b in enumerate(tab.basis):
            ray[b] = -tab.rows[i][col]
        return LpSolution(UNBOUNDED, certificate=ray[:n], pivots=tab.pivots)
    z = tab.point(ncols)
    x = z[:n]
    y = [tab.obj[n + i] for i in range(m)]
    primal = dot(lp.objective, x, f.zero)
    dual = dot(lp.rhs, y, f.zero)
    if f.exact and primal != dual:
        raise AssertionError("strong duality violated; solver bug")
    return LpSolution(OPTIMAL, x, primal, y, dual, pivots=tab.pivots)


def verify_certificate(lp: LinearProgram, candidate_dual: Sequence) -> tuple[bool, object]:
    """Check ``y >= 0`` and ``A^T y <= c``; return feasibility and ``b^T y``."""
    f = lp.field
    y = [f(v) if f.exact else float(v) for v in candidate_dual]
    if len(y) != lp.num_constraints:
        raise ValueError(f"dual vector has length {len(y)}, expected {lp.num_constraints}")
    value = dot(lp.rhs, y, f.zero)
    if any(f.sign(v) < 0 for v in y):
        return False, value
    aty = lp.constraint_matrix.T @ y
    ok = all(f.sign(c - s) >= 0 for c, s in zip(lp.objective, aty))
    return ok, value


def find_nonnegative_solution(m: Matrix, rhs: Sequence,
                              max_bits: int = DEFAULT_MAX_BITS) -> list | None:
    """Some ``z >= 0`` with ``m z = rhs``, or ``None`` when none exists."""
    f = m.field
    rows_n, n = m.shape
    ncols = n + rows_n
    rows, b, basis = [], [], []
    for i in range(rows_n):
        sgn = -1 if f.sign(rhs[i]) < 0 else 1
        row = [x if sgn > 0 else -x for x in m.row(i)] + [f.zero] * rows_n
        row[n + i] = f.one
        rows.append(row)
        b.append(rhs[i] if sgn > 0 else -rhs[i])
        basis.append(n + i)
    tab = _Tableau(rows, b, basis, f, max_bits)
    tab.set_objective([f.zero] * n + [f.one] * rows_n)
    tab.run(range(ncols))
    if f.sign(tab.value) > 0:
        return None
    z = tab.point(ncols)
    return z[:n]
