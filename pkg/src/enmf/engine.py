"""Noncontextuality decisions for COPE matrices.

The pipeline:

* ``build_shear_lp`` / ``decide_nonneg_map`` decide whether a rank-preserving
  nonnegative ``E`` with ``G E = B`` exists, returning either ``E`` or a dual
  certificate of impossibility.
* ``enmf_exists_fixed_rank`` applies that test with ``G`` the vertices of the
  outer polytope, which settles whether any noncontextual model exists.
* ``reduce_to_nnr`` builds the padded matrix ``C_bar`` whose nonnegative rank
  equals ``k`` exactly when a noncontextual model of size ``k`` exists.
* ``ennr`` scans ``k`` upward using an NNR oracle on ``C_bar``.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from .field import make_field, pow2_exponent
from .geometry import (
    GeometryError, HPolytope, VPolytope, affine_basis, barycenter, contains,
    distances, enumerate_vertices, inscribed_simplex, outer_from_effects,
    section_simplex,
)
from .io import digest, matrix_rows_text
from .lp import LinearProgram, solve, verify_certificate
from .matrix import (
    CopeMatrix, Matrix, MatrixError, _gram_schmidt, check_rank_separation,
    orthogonal_bases, rank, rank_factorize, validate_cope,
)
from . import oracle as _oracle

__all__ = [
    "ShearProblem",
    "EnmfCertificate",
    "ReductionOutput",
    "ModelVerdict",
    "EnnrStep",
    "EnnrResult",
    "build_shear_lp",
    "decide_nonneg_map",
    "enmf_exists_fixed_rank",
    "embed_cone",
    "bound_outer",
    "extend_inner",
    "reduce_to_nnr",
    "ennr",
    "verify_model",
    "lp_to_json",
    "CornerCutResult",
    "corner_cut_refutation",
]

EXISTS, NOT_EXISTS, UNKNOWN = "exists", "not_exists", "unknown"


def _fmt_vec(f, v):
    return [f.format(x) for x in v]


def lp_to_json(lp: LinearProgram) -> dict:
    f = lp.field
    return {"sense": "minimize c.x subject to A x >= b, x >= 0",
            "c": _fmt_vec(f, lp.objective), "b": _fmt_vec(f, lp.rhs),
            "A": matrix_rows_text(lp.constraint_matrix)}


# ---------------------------------------------------------------------------
# shear LP

@dataclass(frozen=True)
class ShearProblem:
    """Shear LP for ``G E = B``; ``G`` is ``r x k`` with vertex columns."""

    g: Matrix
    b: Matrix
    e_bar: Matrix
    row_basis: list
    kernel_basis: list
    lp: LinearProgram

    @property
    def r(self) -> int:
        return self.g.rows

    @property
    def k(self) -> int:
        return self.g.cols

    @property
    def n(self) -> int:
        return self.b.cols

    def coefficient(self, p: int, s: int, i: int, j: int):
        """Coefficient of ``D_ij`` in entry ``(p, s)``: ``b^i_p (a^j . E_bar[:, s])``."""
        f = self.g.field
        a = self.row_basis[j]
        col = self.e_bar.col(s)
        proj = f.zero
        for x, y in zip(a, col):
            proj = proj + x * y
        return self.kernel_basis[i][p] * proj

    def reconstruct(self, d) -> Matrix:
        """``E = L E_bar`` with ``L = I - sum_ij D_ij b^i a^j^T``."""
        f = self.g.field
        k, n, r = self.k, self.n, self.r
        rows = [list(self.e_bar.row(p)) for p in range(k)]
        for i in range(k - r):
            for j in range(r):
                dij = d[i * r + j]
                if f.sign(dij) == 0:
                    continue
                for s in range(n):
                    proj = f.zero
                    for x, y in zip(self.row_basis[j], self.e_bar.col(s)):
                        proj = proj + x * y
                    for p in range(k):
                        rows[p][s] = rows[p][s] - dij * self.kernel_basis[i][p] * proj
        return Matrix(rows, f)


def _orient(g: Matrix, b: Matrix) -> Matrix:
    # accept G either as r x k (vertex columns) or as its k x r transpose
    if g.rows == b.rows:
        return g
    if g.cols == b.rows:
        return g.T
    raise MatrixError(f"G {g.shape} does not match B {b.shape}")


def build_shear_lp(g: Matrix, b: Matrix, normalize: bool = False) -> ShearProblem:
    """Primal LP over ``(S, D+, D-)`` minimising total negativity of ``L E_bar``.

    ``S`` is ``k x n`` stored column by column (index ``s*k + p``); ``D+`` and
    ``D-`` are ``(k-r) x r`` stored row by row (index ``i*r + j``).  Row
    ``t = s*k + p`` reads ``S_ps - sum R_t,u D+_u + sum R_t,u D-_u >= -E_bar_ps``.
    With ``normalize`` the float bases are scaled to unit length.
    """
    g = _orient(g, b)
    f = g.field
    r, k = g.shape
    if rank(g) != r:
        raise MatrixError(f"G must have full rank {r}; it has rank {rank(g)}")
    ggt = g @ g.T
    e_bar = g.T @ (ggt.inverse() @ b)
    row_basis, kernel_basis = orthogonal_bases(g)
    if normalize:
        if f.exact:
            raise ValueError("basis normalization is only available on the float backend")
        row_basis = [[x / (sum(y * y for y in v) ** 0.5) for x in v] for v in row_basis]
        kernel_basis = [[x / (sum(y * y for y in v) ** 0.5) for x in v] for v in kernel_basis]
    n = b.cols
    nd = (k - r) * r
    nvar = k * n + 2 * nd
    rows = []
    rhs = []
    for s in range(n):
        col = e_bar.col(s)
        proj = []
        for a in row_basis:
            acc = f.zero
            for x, y in zip(a, col):
                acc = acc + x * y
            proj.append(acc)
        for p in range(k):
            row = [f.zero] * nvar
            row[s * k + p] = f.one
            for i in range(k - r):
                for j in range(r):
                    coef = kernel_basis[i][p] * proj[j]
                    row[k * n + i * r + j] = -coef
                    row[k * n + nd + i * r + j] = coef
            rows.append(row)
            rhs.append(-e_bar[p, s])
    objective = [f.one] * (k * n) + [f.zero] * (2 * nd)
    lp = LinearProgram.build(objective, Matrix(rows, f), rhs)
    return ShearProblem(g, b, e_bar, row_basis, kernel_basis, lp)


@dataclass
class EnmfCertificate:
    verdict: str
    k: int
    r_factor: Matrix | None = None
    e_factor: Matrix | None = None
    dual_certificate: list | None = None
    dual_value: object = None
    reason: str = ""
    lp: LinearProgram | None = None
    extra: dict = dc_field(default_factory=dict)

    @property
    def exists(self) -> bool:
        return self.verdict == EXISTS

    def to_json(self, include_lp: bool = True) -> dict:
        out = {"verdict": self.verdict, "k": self.k}
        if self.reason:
            out["reason"] = self.reason
        if self.r_factor is not None:
            out["R"] = matrix_rows_text(self.r_factor)
        if self.e_factor is not None:
            out["E"] = matrix_rows_text(self.e_factor)
        if self.dual_certificate is not None:
            f = self.lp.field
            out["dual_certificate"] = _fmt_vec(f, self.dual_certificate)
            out["dual_value"] = f.format(self.dual_value)
        if include_lp and self.lp is not None:
            out["lp"] = lp_to_json(self.lp)
        out.update(self.extra)
        return out


def decide_nonneg_map(g: Matrix, b: Matrix, problem: ShearProblem | None = None) -> EnmfCertificate:
    """Find ``E >= 0`` with ``G E = B`` and ``rank E = rank B``, or refute it."""
    prob = problem or build_shear_lp(g, b)
    f = prob.g.field
    k = prob.k
    if prob.e_bar.is_nonnegative():
        e = prob.e_bar
        reason = "least-squares preimage is already nonnegative"
    else:
        sol = solve(prob.lp)
        if not sol.optimal:
            raise AssertionError(f"shear LP is always feasible and bounded; got {sol.status}")
        if f.sign(sol.primal_value) > 0:
            ok, value = verify_certificate(prob.lp, sol.dual_point)
            if not ok or f.sign(value) <= 0:
                raise AssertionError("dual certificate failed verification")
            return EnmfCertificate(NOT_EXISTS, k, dual_certificate=sol.dual_point,
                                   dual_value=value, lp=prob.lp,
                                   reason="shear LP optimum is positive")
        nd = (k - prob.r) * prob.r
        base = k * prob.n
        d = [sol.primal_point[base + u] - sol.primal_point[base + nd + u] for u in range(nd)]
        e = prob.reconstruct(d)
        if not f.exact:
            e = Matrix([[x if x > 0 else 0.0 for x in row] for row in e.row_list()], f)
        reason = "shear LP optimum is zero"
    if not (prob.g @ e) == prob.b:
        raise AssertionError("reconstructed map does not satisfy G E = B")
    if not e.is_nonnegative():
        raise AssertionError("reconstructed map is not nonnegative")
    if rank(e) != rank(prob.b):
        raise AssertionError("reconstructed map does not preserve rank")
    return EnmfCertificate(EXISTS, k, e_factor=e, lp=prob.lp, reason=reason)


# ---------------------------------------------------------------------------
# model verification

@dataclass(frozen=True)
class ModelVerdict:
    ok: bool
    failed_check: str | None
    message: str
    ranks: tuple | None = None

    def to_json(self) -> dict:
        out = {"ok": self.ok, "failed_check": self.failed_check, "message": self.message}
        if self.ranks is not None:
            out["ranks"] = {"C": self.ranks[0], "R": self.ranks[1], "E": self.ranks[2]}
        return out


def verify_model(c: CopeMatrix, r_factor: Matrix, e_factor: Matrix,
                 require_noncontextual: bool = False) -> ModelVerdict:
    """Check that ``(R, E)`` is an ontological model of ``C``."""
    f = c.field
    data = c.data
    if r_factor.rows != data.rows:
        return ModelVerdict(False, "shape", f"R has {r_factor.rows} rows, C has {data.rows}")
    if e_factor.cols != data.cols:
        return ModelVerdict(False, "shape", f"E has {e_factor.cols} columns, C has {data.cols}")
    if r_factor.cols != e_factor.rows:
        return ModelVerdict(False, "shape",
                            f"R has {r_factor.cols} columns but E has {e_factor.rows} rows")
    if not (r_factor @ e_factor) == data:
        return ModelVerdict(False, "product", "R E differs from C")
    if not r_factor.is_nonnegative():
        return ModelVerdict(False, "nonnegative_R", "R has a negative entry")
    if not e_factor.is_nonnegative():
        return ModelVerdict(False, "nonnegative_E", "E has a negative entry")
    for j, s in enumerate(e_factor.column_sums()):
        if f.sign(s - f.one) != 0:
            return ModelVerdict(False, "stochastic_E", f"column {j} of E sums to {f.format(s)}")
    total = f(c.column_total)
    for j, s in enumerate(r_factor.column_sums()):
        if f.sign(s - total) != 0:
            return ModelVerdict(False, "response_sums",
                                f"column {j} of R sums to {f.format(s)}, expected {c.column_total}")
    for blk in c.blocks():
        for t in range(r_factor.cols):
            s = f.zero
            for i in blk:
                s = s + r_factor[i, t]
            if f.sign(s - f.one) != 0 and c.form == "A":
                return ModelVerdict(False, "response_sums",
                                    f"responses of ontic state {t} in block starting at row "
                                    f"{blk.start} sum to {f.format(s)}")
    sep = check_rank_separation(r_factor, e_factor)
    ranks = (rank(data), sep.rank_r, sep.rank_e)
    if require_noncontextual and not (ranks[0] == ranks[1] == ranks[2]):
        return ModelVerdict(False, "equal_ranks",
                            f"ranks differ: C {ranks[0]}, R {ranks[1]}, E {ranks[2]}", ranks)
    return ModelVerdict(True, None, "model verified", ranks)


def _assert_model(c: CopeMatrix, r: Matrix, e: Matrix) -> None:
    v = verify_model(c, r, e, require_noncontextual=True)
    if not v.ok:
        raise AssertionError(f"engine produced an invalid noncontextual model: {v.message}")


# ---------------------------------------------------------------------------
# fixed-rank existence

def _stochastic_factors(c: CopeMatrix):
    fac = rank_factorize(c)
    return fac.left, fac.right


def enmf_exists_fixed_rank(c: CopeMatrix) -> EnmfCertificate:
    """Decide whether any noncontextual model of ``C`` exists.

    ``G`` ranges over the vertices of the outer polytope, so a positive answer
    comes with a model whose size is the number of those vertices.
    """
    a, b = _stochastic_factors(c)
    outer = outer_from_effects(a, c.column_total)
    verts = enumerate_vertices(outer)
    g = verts.vertices
    cert = decide_nonneg_map(g, b)
    cert.extra["outer_vertices"] = matrix_rows_text(g)
    if cert.exists:
        cert.r_factor = a @ g
        _assert_model(c, cert.r_factor, cert.e_factor)
    return cert


# ---------------------------------------------------------------------------
# reduction to nonnegative rank

def embed_cone(a: Matrix, b: Matrix, k: int) -> tuple[Matrix, Matrix]:
    """Pad to inner dimension ``k``: ``[0 | A]`` and ``[0 ; B]``."""
    r = a.cols
    if k < r:
        raise MatrixError(f"k = {k} is smaller than the rank {r}")
    if k == r:
        return a, b
    f = a.field
    return (Matrix.hstack([Matrix.zeros(a.rows, k - r, f), a]),
            Matrix.vstack([Matrix.zeros(k - r, b.cols, f), b]))


def _unit_effect(a_bar: Matrix, l: int) -> list:
    f = a_bar.field
    inv = f.one / f(l)
    return [s * inv for s in a_bar.column_sums()]


def bound_outer(a_bar: Matrix, k: int, r: int, l: int) -> Matrix:
    """Append rows ``-h^i/2 + u/2`` then ``h^i/2 + u/2`` for ``i = 1..k-r``."""
    f = a_bar.field
    if k == r:
        return a_bar
    u = _unit_effect(a_bar, l)
    half = f.one / f(2)
    minus, plus = [], []
    for i in range(k - r):
        h = [f.one if t == i else f.zero for t in range(k)]
        minus.append([(uu - hh) * half for uu, hh in zip(u, h)])
        plus.append([(uu + hh) * half for uu, hh in zip(u, h)])
    return Matrix.vstack([a_bar, Matrix(minus + plus, f)])


def _outer_h(a_bar_b: Matrix, u: list) -> HPolytope:
    f = a_bar_b.field
    return HPolytope(a_bar_b.cols, a_bar_b, tuple([f.zero] * a_bar_b.rows),
                     ((tuple(u), f.one),))


def _pow2(z: int, f):
    from fractions import Fraction
    return f(Fraction(2) ** z) if f.exact else 2.0 ** z


def extend_inner(b_bar: Matrix, a_h: HPolytope, k: int, r: int) -> tuple[Matrix, list]:
    """Add ``k - r`` raised points ``c^i + h_i e_i`` to the padded inner polytope."""
    f = b_bar.field
    pts = [list(col) for col in b_bar.columns()]
    for p in pts:
        if not contains(a_h, p):
            raise GeometryError("inner polytope is not contained in the outer polytope")
    heights = []
    rows = [list(x) for x in a_h.inequality_matrix.row_list()]
    zeros = [f.zero] * len(rows)
    for i in range(k - r):
        poly = VPolytope.from_points(pts, f)
        c = barycenter(poly)
        w = affine_basis(poly.points(), c, f)
        s1 = inscribed_simplex(poly, c, w)
        s2 = section_simplex(rows, zeros, c, w, f)
        d1, d2 = distances(s1, s2, c)
        z1 = pow2_exponent(d1, "down") // 2
        z2 = -((-pow2_exponent(d2, "up")) // 2)
        h = _pow2(z1 - z2, f)
        v = list(c)
        v[i] = v[i] + h
        if not contains(a_h, v):
            raise GeometryError(f"raised point {i} left the outer polytope")
        heights.append(h)
        pts.append(v)
    return Matrix.from_columns(pts, f), heights


@dataclass
class ReductionOutput:
    c_bar: Matrix
    a_bar_b: Matrix
    b_bar_b: Matrix
    heights: list
    k: int
    r: int
    l: int
    outer: HPolytope

    def dichotomic_order(self) -> list[int]:
        """Row order pairing each added ``-h`` row with its ``+h`` partner."""
        m = self.c_bar.rows - 2 * (self.k - self.r)
        extra = self.k - self.r
        order = list(range(m))
        for i in range(extra):
            order += [m + i, m + extra + i]
        return order

    def as_cope(self, heights_of_c: tuple) -> CopeMatrix:
        """``C_bar`` as an A-form COPE with ``l + k - r`` measurements."""
        data = self.c_bar.select_rows(self.dichotomic_order())
        return validate_cope(data, tuple(heights_of_c) + (2,) * (self.k - self.r), "A")

    def checks(self) -> dict:
        f = self.c_bar.field
        m = self.c_bar.rows - 2 * (self.k - self.r)
        return {
            "nonnegative": self.c_bar.is_nonnegative(),
            "rank": rank(self.c_bar),
            "shape": list(self.c_bar.shape),
            "inner_in_outer": all(contains(self.outer, p) for p in self.b_bar_b.columns()),
            "heights_positive": all(f.sign(h) > 0 for h in self.heights),
            "m": m,
        }

    def to_json(self) -> dict:
        f = self.c_bar.field
        return {"k": self.k, "r": self.r, "l": self.l,
                "heights": [f.format(h) for h in self.heights],
                "C_bar": matrix_rows_text(self.c_bar),
                "A_bar_b": matrix_rows_text(self.a_bar_b),
                "B_bar_b": matrix_rows_text(self.b_bar_b)}


def reduce_to_nnr(c: CopeMatrix, k: int) -> ReductionOutput:
    """Padded matrix whose nonnegative rank is ``k`` iff a size-``k`` model exists."""
    a, b = _stochastic_factors(c)
    r = a.cols
    if not r <= k <= r * r:
        raise MatrixError(f"k must satisfy {r} <= k <= {r * r}; got {k}")
    a_bar, b_bar = embed_cone(a, b, k)
    l = c.column_total
    a_bar_b = bound_outer(a_bar, k, r, l)
    u = _unit_effect(a_bar, l)
    outer = _outer_h(a_bar_b, u)
    b_bar_b, heights = extend_inner(b_bar, outer, k, r)
    c_bar = a_bar_b @ b_bar_b
    out = ReductionOutput(c_bar, a_bar_b, b_bar_b, heights, k, r, l, outer)
    if rank(c_bar) != k:
        raise AssertionError(f"padded matrix has rank {rank(c_bar)}, expected {k}")
    if not c_bar.is_nonnegative():
        raise AssertionError("padded matrix has a negative entry")
    m, n = c.shape
    if not c_bar.submatrix(0, m, 0, n) == c.data:
        raise AssertionError("padded matrix does not contain C in its top-left corner")
    return out


# ---------------------------------------------------------------------------
# corner cuts (rank 3)

@dataclass
class CornerCutResult:
    """Outcome of refuting every model smaller than the outer polygon."""

    refuted: bool
    outer_count: int
    reason: str
    certificates: list = dc_field(default_factory=list)

    def to_json(self) -> dict:
        out = {"refuted": self.refuted, "outer_vertices": self.outer_count,
               "reason": self.reason}
        if self.certificates:
            out["cuts"] = [c.to_json(include_lp=False) for c in self.certificates]
        return out


def _side(f, a, b, p):
    return f.sign((b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]))


def corner_cut_refutation(c: CopeMatrix) -> CornerCutResult:
    """Try to show that no noncontextual model has fewer states than outer vertices.

    Cut each corner of the outer polygon along the segment joining the
    midpoints of its two edges.  When the open corner caps are pairwise
    disjoint, any polygon with fewer vertices misses one cap and so lies in
    the matching cut polygon.  A model of that size would then give one for
    the cut polygon, so a positive shear-LP value for every cut rules it out.
    """
    f = c.field
    pic = _oracle.planar_picture(c.data)
    q = enumerate_vertices(pic.outer).points()
    n_out = len(q)
    half = f.one / f(2)
    mids = [[(a + b) * half for a, b in zip(q[i], q[(i + 1) % n_out])] for i in range(n_out)]
    # cap i sits beyond the chord mids[i-1] -> mids[i]; orientation from the polygon
    inner_sign = _side(f, mids[-1], mids[0], q[1])
    caps = [(mids[i - 1], q[i], mids[i]) for i in range(n_out)]
    for i in range(n_out):
        a, b = mids[i - 1], mids[i]
        for j in range(n_out):
            if j != i and any(_side(f, a, b, p) == -inner_sign for p in caps[j]):
                return CornerCutResult(False, n_out, "corner caps overlap")
    certs = []
    for i in range(n_out):
        pts = [q[t] for t in range(n_out) if t != i] + [mids[i - 1], mids[i]]
        cut = VPolytope.from_points(pts, f).points()
        g = Matrix.from_columns([[p[0], p[1], f.one - p[0] - p[1]] for p in cut], f)
        cert = decide_nonneg_map(g, pic.right)
        if cert.exists:
            return CornerCutResult(False, n_out, f"cut polygon {i} admits a rank-preserving map")
        cert.reason = f"cut polygon {i}: shear LP optimum is positive"
        certs.append(cert)
    return CornerCutResult(True, n_out, "every corner-cut polygon has a positive shear-LP value",
                           certs)


# ---------------------------------------------------------------------------
# the ENNR scan

@dataclass
class EnnrStep:
    k: int
    answer: str          # yes / no / unknown
    method: str
    reason: str
    certificate: dict | None = None

    def to_json(self) -> dict:
        out = {"k": self.k, "answer": self.answer, "method": self.method, "reason": self.reason}
        if self.certificate is not None:
            out["certificate"] = self.certificate
        return out


@dataclass
class EnnrResult:
    value: int | None
    status: str                      # exact, unknown_below, no_model, not_found
    transcript: list
    model: tuple | None = None       # (R, E)
    fixed_rank: EnmfCertificate | None = None
    unknown_at: list = dc_field(default_factory=list)

    def to_json(self) -> dict:
        out = {"value": self.value, "status": self.status, "unknown_at": self.unknown_at,
               "transcript": [s.to_json() for s in self.transcript]}
        if self.model is not None:
            out["model"] = {"R": matrix_rows_text(self.model[0]),
                            "E": matrix_rows_text(self.model[1])}
        if self.fixed_rank is not None:
            out["fixed_rank"] = self.fixed_rank.to_json(include_lp=False)
        return out


def _extract_model(c: CopeMatrix, red: ReductionOutput, r_bar: Matrix, e_bar: Matrix):
    """Restrict an NMF of ``C_bar`` to ``C`` and renormalise it into a model."""
    m, n = c.shape
    r = r_bar.submatrix(0, m, 0, r_bar.cols)
    e = e_bar.submatrix(0, e_bar.rows, 0, n)
    return _renormalize(c, r, e)


def _renormalize(c: CopeMatrix, r: Matrix, e: Matrix):
    f = r.field
    total = f(c.column_total)
    rho = r.column_sums()
    keep = [t for t in range(r.cols) if f.sign(rho[t]) != 0]
    r = r.select_columns(keep)
    e = e.select_rows(keep)
    rho = [rho[t] for t in keep]
    r2 = Matrix([[x * total / p for x, p in zip(row, rho)] for row in r.row_list()], f)
    e2 = Matrix([[x * p / total for x in e.row(t)] for t, p in enumerate(rho)], f)
    return r2, e2


def _lifted_witness(c: CopeMatrix, red: ReductionOutput, model):
    """NMF of ``C_bar`` built from a known noncontextual model of size ``k``."""
    f = c.field
    a, _ = _stochastic_factors(c)
    r_factor, e_factor = model
    k = red.k
    if e_factor.rows != k:
        return None
    # G with A G = R (A has full column rank)
    g = (a.T @ a).inverse() @ (a.T @ r_factor)
    left_kernel = _gram_schmidt(e_factor.T.nullspace(), f)
    if len(left_kernel) != k - red.r:
        return None
    n_rows = []
    for v in left_kernel:
        big = max(v, key=lambda x: abs(f.to_float(x)))
        big = big if f.sign(big) > 0 else -big
        n_rows.append([x / big for x in v])
    g_lift = Matrix.vstack([Matrix(n_rows, f), g]) if n_rows else g
    if rank(g_lift) != k:
        return None
    r_bar = red.a_bar_b @ g_lift
    e_bar = g_lift.inverse() @ red.b_bar_b
    if not (r_bar.is_nonnegative() and e_bar.is_nonnegative()):
        return None
    if not (r_bar @ e_bar) == red.c_bar:
        return None
    return r_bar, e_bar


def ennr(c: CopeMatrix, strategy: str = "auto", max_k: int | None = None,
         seed: int | None = None, restarts: int = _oracle.HEURISTIC_RESTARTS,
         iterations: int = _oracle.HEURISTIC_ITERATIONS) -> EnnrResult:
    """Smallest size of a noncontextual model, scanning ``k = r, r+1, ...``."""
    f = c.field
    a, b = _stochastic_factors(c)
    r = a.cols
    transcript: list[EnnrStep] = []
    if r == 1:
        model = _renormalize(c, a, b)
        _assert_model(c, *model)
        transcript.append(EnnrStep(1, "yes", "trivial", "rank one"))
        return EnnrResult(1, "exact", transcript, model)
    fixed = enmf_exists_fixed_rank(c)
    if not fixed.exists:
        transcript.append(EnnrStep(r, "no", "fixed_rank",
                                   "no rank-preserving nonnegative map onto the outer vertices",
                                   fixed.to_json(include_lp=False)))
        return EnnrResult(None, "no_model", transcript, fixed_rank=fixed)
    k0 = fixed.k
    top = r * r if max_k is None else min(max_k, r * r)
    unknown_at = []
    cut = corner_cut_refutation(c) if r == 3 else None
    for k in range(r, top + 1):
        if cut is not None and cut.refuted and k < cut.outer_count:
            transcript.append(EnnrStep(k, "no", "corner_cut", cut.reason,
                                       cut.to_json() if k == r else None))
            continue
        if k == r:
            v = _oracle.decide_nnr(c.data, k, strategy, seed, restarts, iterations)
            if v.answer == "yes":
                model = _renormalize(c, v.r_factor, v.e_factor)
                _assert_model(c if v.exact else _as_float(c, v.r_factor.field), *model)
                transcript.append(EnnrStep(k, "yes", v.method, v.reason, v.to_json()))
                return _finish(k, transcript, model, fixed, unknown_at)
            transcript.append(EnnrStep(k, v.answer, v.method, v.reason, v.to_json()))
            if v.answer == "unknown":
                unknown_at.append(k)
            continue
        red = reduce_to_nnr(c, k)
        if k == k0:
            lifted = _lifted_witness(c, red, (fixed.r_factor, fixed.e_factor))
            if lifted is not None:
                model = _extract_model(c, red, *lifted)
                _assert_model(c, *model)
                transcript.append(EnnrStep(k, "yes", "lifted_model",
                                           "padded matrix factors through the outer-vertex model",
                                           {"digest": digest(red.c_bar)}))
                return _finish(k, transcript, model, fixed, unknown_at)
        v = _oracle.decide_nnr(red.c_bar, k, strategy, seed, restarts, iterations)
        if v.answer == "yes":
            if v.exact:
                model = _extract_model(c, red, v.r_factor, v.e_factor)
                _assert_model(c, *model)
            else:
                fc = _as_float(c, v.r_factor.field)
                fred = ReductionOutput(red.c_bar.with_field(fc.field), red.a_bar_b, red.b_bar_b,
                                       red.heights, k, r, red.l, red.outer)
                model = _extract_model(fc, fred, v.r_factor, v.e_factor)
                _assert_model(fc, *model)
            transcript.append(EnnrStep(k, "yes", v.method, v.reason, v.to_json()))
            return _finish(k, transcript, model, fixed, unknown_at)
        if k == k0:
            model = (fixed.r_factor, fixed.e_factor)
            transcript.append(EnnrStep(k, "yes", "fixed_rank",
                                       "outer-vertex model has this size",
                                       fixed.to_json(include_lp=False)))
            return _finish(k, transcript, model, fixed, unknown_at)
        transcript.append(EnnrStep(k, v.answer, v.method, v.reason, v.to_json()))
        if v.answer == "unknown":
            unknown_at.append(k)
    return EnnrResult(None, "not_found", transcript, fixed_rank=fixed, unknown_at=unknown_at)


def _finish(k, transcript, model, fixed, unknown_at) -> EnnrResult:
    status = "exact" if not unknown_at else "unknown_below"
    return EnnrResult(k, status, transcript, model, fixed, list(unknown_at))


def _as_float(c: CopeMatrix, ff) -> CopeMatrix:
    return CopeMatrix(c.data.with_field(ff), c.block_heights, c.form)
